#pragma once

/**
 * @file generator.hpp
 * @brief Seeded synthetic instances at oracle or stress scale.
 */

#include <cstdint>
#include <map>

#include "railnet/io.hpp"

namespace railnet {

struct GeneratorParams {
    int nodes = 5;
    int sections = 6;
    /// Train pool per type; every scenario draws a subset of the pool.
    std::map<TrainType, int> trains_per_type{{"IC", 1}, {"RE", 2}};
    int scenarios = 1;
    double optional_share = 0.0;
    Minutes horizon = 120;
    double coverage_share = 1.0;
    /// Chance that a scenario receives one timing relation.
    double relation_probability = 0.3;
    /// Chance that a section admits four tracks instead of two.
    double four_track_share = 0.3;
    /// Extra minutes on top of the fastest run: [min_slack, max_slack].
    Minutes min_slack = 2;
    Minutes max_slack = 12;
    char preset = 'B';
};

/**
 * @brief Builds a connected instance deterministically from `seed`.
 *
 * Node ids are consecutive capital letters. Every train can reach its
 * destination on the fastest unreduced path within its time budget.
 * Relations join mandatory trains of one scenario only. Penalties stay
 * below every nonzero infrastructure price. Throws InputError for
 * contradictory parameters.
 */
Instance generate_instance(std::uint64_t seed, const GeneratorParams& params = {});

}  // namespace railnet
