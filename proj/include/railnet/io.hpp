#pragma once

/**
 * @file io.hpp
 * @brief Instance and plan documents (strict, versioned JSON).
 */

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "railnet/core.hpp"
#include "railnet/validate.hpp"

namespace railnet {

inline constexpr int kSchemaVersion = 1;

/// Schema or consistency problems, each with a JSON path or entity location.
class DocumentError : public std::runtime_error {
public:
    explicit DocumentError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

struct Instance {
    InfrastructureSpec spec;
    TimetableFamily family;
    BuildConfig config;
    /// Preset letter the config came from, 0 for explicit fields.
    char preset = 0;
    /// Build the robust model even for a deterministic family.
    bool force_robust = false;
};

/// Sets the track limit and reduction switch of preset 'A', 'B' or 'C'.
void apply_preset(BuildConfig& config, char preset);

Instance instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const Instance& instance);

/// Parses text; JSON syntax errors carry the byte offset.
Instance parse_instance(const std::string& text);
/// Canonical text: two-space indentation, trailing newline.
std::string dump_instance(const Instance& instance);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

nlohmann::json plan_to_json(const PlanSolution& plan);
PlanSolution plan_from_json(const nlohmann::json& doc);
PlanSolution load_plan(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace railnet
