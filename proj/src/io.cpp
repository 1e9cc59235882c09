#include "railnet/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace railnet {

using nlohmann::json;

namespace {

std::string join_messages(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics) {
        if (!out.empty()) out += "\n";
        out += d.location + ": " + d.message;
    }
    return out.empty() ? "invalid document" : out;
}

/// Collects schema diagnostics while walking a document.
class Reader {
public:
    std::vector<Diagnostic> diagnostics;

    void fail(const std::string& path, const std::string& message) { diagnostics.push_back({path, message}); }

    bool object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed,
                std::initializer_list<std::string_view> required = {}) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& [key, value] : j.items()) {
            (void)value;
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(path + "." + key, "unknown field");
        }
        bool ok = true;
        for (auto key : required)
            if (!j.contains(key)) {
                fail(path + "." + std::string(key), "missing required field");
                ok = false;
            }
        return ok;
    }

    const json* array(const json& j, std::string_view key, const std::string& path, bool required = true) {
        if (!j.contains(key)) {
            if (required) fail(path + "." + std::string(key), "missing required field");
            return nullptr;
        }
        const json& v = j.at(std::string(key));
        if (!v.is_array()) {
            fail(path + "." + std::string(key), "expected an array");
            return nullptr;
        }
        return &v;
    }

    std::string string(const json& j, std::string_view key, const std::string& path, std::string fallback = {}) {
        if (!j.contains(key)) return fallback;
        const json& v = j.at(std::string(key));
        if (!v.is_string()) {
            fail(path + "." + std::string(key), "expected a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    int integer(const json& j, std::string_view key, const std::string& path, int fallback = 0) {
        if (!j.contains(key)) return fallback;
        const json& v = j.at(std::string(key));
        if (!v.is_number_integer()) {
            fail(path + "." + std::string(key), "expected an integer");
            return fallback;
        }
        return v.get<int>();
    }

    double number(const json& j, std::string_view key, const std::string& path, double fallback = 0.0) {
        if (!j.contains(key)) return fallback;
        const json& v = j.at(std::string(key));
        if (!v.is_number()) {
            fail(path + "." + std::string(key), "expected a number");
            return fallback;
        }
        return v.get<double>();
    }

    bool boolean(const json& j, std::string_view key, const std::string& path, bool fallback = false) {
        if (!j.contains(key)) return fallback;
        const json& v = j.at(std::string(key));
        if (!v.is_boolean()) {
            fail(path + "." + std::string(key), "expected a boolean");
            return fallback;
        }
        return v.get<bool>();
    }

    std::vector<std::string> strings(const json& j, std::string_view key, const std::string& path) {
        std::vector<std::string> out;
        const json* arr = array(j, key, path, false);
        if (!arr) return out;
        for (std::size_t i = 0; i < arr->size(); ++i) {
            if (!(*arr)[i].is_string())
                fail(path + "." + std::string(key) + "[" + std::to_string(i) + "]", "expected a string");
            else
                out.push_back((*arr)[i].get<std::string>());
        }
        return out;
    }
};

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

BuildConfig read_config(Reader& r, const json& doc, char& preset, Minutes default_horizon) {
    BuildConfig config = BuildConfig::preset('B', default_horizon);
    preset = 'B';
    if (!doc.contains("config")) return config;
    const json& c = doc.at("config");
    auto preset_from = [&](const std::string& text, const std::string& path) {
        if (text == "A" || text == "B" || text == "C") {
            preset = text[0];
            apply_preset(config, preset);
        } else {
            r.fail(path, "unknown preset '" + text + "'");
        }
    };
    if (c.is_string()) {
        preset_from(c.get<std::string>(), "$.config");
        return config;
    }
    if (!r.object(c, "$.config",
                  {"preset", "max_tracks", "reductions", "headway_floor_minutes", "horizon_end_minutes",
                   "track_rules", "cross_scenario_headways", "max_paths_per_triple", "tight_linking"}))
        return config;
    preset = 0;
    if (c.contains("preset")) preset_from(r.string(c, "preset", "$.config"), "$.config.preset");
    const std::string p = "$.config";
    config.max_tracks_global = r.integer(c, "max_tracks", p, config.max_tracks_global);
    config.reductions_allowed = r.boolean(c, "reductions", p, config.reductions_allowed);
    if (preset) {
        const BuildConfig named = BuildConfig::preset(preset);
        if (named.max_tracks_global != config.max_tracks_global ||
            named.reductions_allowed != config.reductions_allowed)
            preset = 0;
    }
    config.headway_floor_minutes = r.integer(c, "headway_floor_minutes", p, config.headway_floor_minutes);
    config.planning_horizon_end_minutes = r.integer(c, "horizon_end_minutes", p, config.planning_horizon_end_minutes);
    config.track_rules = r.boolean(c, "track_rules", p, config.track_rules);
    config.cross_scenario_headways = r.boolean(c, "cross_scenario_headways", p, config.cross_scenario_headways);
    config.max_paths_per_triple = r.integer(c, "max_paths_per_triple", p, config.max_paths_per_triple);
    config.tight_linking = r.boolean(c, "tight_linking", p, config.tight_linking);
    return config;
}

Section read_section(Reader& r, const json& j, const std::string& p, const BuildConfig& config) {
    Section s;
    r.object(j, p,
             {"from", "to", "length_km", "max_tracks", "travel_time_minutes", "headways", "track_costs",
              "time_reduction_cost_per_minute", "headway_reduction_cost_per_minute", "max_time_reduction_minutes",
              "max_headway_reduction_minutes"},
             {"from", "to", "length_km", "max_tracks", "travel_time_minutes", "headways", "track_costs"});
    if (!j.is_object()) return s;
    s.a = r.string(j, "from", p);
    s.b = r.string(j, "to", p);
    s.length_km = r.number(j, "length_km", p);
    s.max_tracks = r.integer(j, "max_tracks", p, 1);
    if (j.contains("travel_time_minutes")) {
        const json& tt = j.at("travel_time_minutes");
        if (!tt.is_object()) {
            r.fail(p + ".travel_time_minutes", "expected an object");
        } else {
            for (const auto& [type, v] : tt.items()) {
                if (!v.is_number_integer())
                    r.fail(p + ".travel_time_minutes." + type, "expected an integer");
                else
                    s.travel_time_minutes[type] = v.get<int>();
            }
        }
    }
    if (const json* hw = r.array(j, "headways", p)) {
        for (std::size_t i = 0; i < hw->size(); ++i) {
            const std::string hp = at(p + ".headways", i);
            const json& h = (*hw)[i];
            if (!r.object(h, hp, {"leading", "following", "minutes"}, {"leading", "following", "minutes"})) continue;
            auto key = std::make_pair(r.string(h, "leading", hp), r.string(h, "following", hp));
            if (s.base_headway_minutes.count(key)) r.fail(hp, "duplicate headway entry");
            s.base_headway_minutes[key] = r.integer(h, "minutes", hp);
        }
    }
    if (const json* tc = r.array(j, "track_costs", p)) {
        for (std::size_t i = 0; i < tc->size(); ++i) {
            if (!(*tc)[i].is_number())
                r.fail(at(p + ".track_costs", i), "expected a number");
            else
                s.track_cost[static_cast<int>(i) + 1] = (*tc)[i].get<double>();
        }
    }
    s.time_reduction_cost_per_minute = r.number(j, "time_reduction_cost_per_minute", p);
    s.headway_reduction_cost_per_minute = r.number(j, "headway_reduction_cost_per_minute", p);

    const Minutes per_ten_km = s.length_km > 0 ? static_cast<Minutes>(std::floor(s.length_km / 10.0)) : 0;
    Minutes time_default = per_ten_km;
    for (const auto& [type, minutes] : s.travel_time_minutes) time_default = std::min(time_default, minutes - 1);
    Minutes headway_default = per_ten_km;
    for (const auto& [pair, minutes] : s.base_headway_minutes)
        headway_default = std::min(headway_default, minutes - config.headway_floor_minutes);
    s.max_time_reduction_minutes = r.integer(j, "max_time_reduction_minutes", p, std::max(0, time_default));
    s.max_headway_reduction_minutes = r.integer(j, "max_headway_reduction_minutes", p, std::max(0, headway_default));
    if (s.a > s.b) std::swap(s.a, s.b);
    return s;
}

Train read_train(Reader& r, const json& j, const std::string& p) {
    Train t;
    r.object(j, p,
             {"id", "type", "origin", "destination", "earliest_departure_minutes", "latest_arrival_minutes", "via",
              "optional", "penalty"},
             {"id", "type", "origin", "destination", "earliest_departure_minutes", "latest_arrival_minutes"});
    if (!j.is_object()) return t;
    t.id = r.string(j, "id", p);
    t.train_type = r.string(j, "type", p);
    t.origin = r.string(j, "origin", p);
    t.destination = r.string(j, "destination", p);
    t.earliest_departure_minutes = r.integer(j, "earliest_departure_minutes", p);
    t.latest_arrival_minutes = r.integer(j, "latest_arrival_minutes", p);
    for (auto& v : r.strings(j, "via", p)) t.via_nodes.insert(std::move(v));
    t.optional = r.boolean(j, "optional", p);
    t.penalty = r.number(j, "penalty", p);
    return t;
}

TimingRelation read_relation(Reader& r, const json& j, const std::string& p) {
    TimingRelation rel;
    r.object(j, p, {"kind", "first", "second", "at", "min_minutes", "max_minutes"},
             {"kind", "first", "second", "at", "min_minutes", "max_minutes"});
    if (!j.is_object()) return rel;
    const std::string kind = r.string(j, "kind", p);
    if (auto k = relation_kind_from_string(kind))
        rel.kind = *k;
    else
        r.fail(p + ".kind", "unknown relation kind '" + kind + "'");
    rel.first_train = r.string(j, "first", p);
    rel.second_train = r.string(j, "second", p);
    rel.at_node = r.string(j, "at", p);
    rel.min_minutes = r.integer(j, "min_minutes", p);
    rel.max_minutes = r.integer(j, "max_minutes", p);
    return rel;
}

Scenario* scenario_by_id(TimetableFamily& family, const std::string& id) {
    for (auto& sc : family.scenarios)
        if (sc.id == id) return &sc;
    return nullptr;
}

void read_robust(Reader& r, const json& doc, Instance& inst) {
    if (!doc.contains("robust")) return;
    const json& j = doc.at("robust");
    const std::string p = "$.robust";
    if (!r.object(j, p,
                  {"coverage_share", "scenario_penalties", "demanded_optional_counts", "chosen_optional", "force"}))
        return;
    inst.family.coverage_share = r.number(j, "coverage_share", p, 1.0);
    inst.force_robust = r.boolean(j, "force", p, false);
    auto each = [&](std::string_view key, auto&& apply) {
        if (!j.contains(key)) return;
        const json& m = j.at(std::string(key));
        const std::string mp = p + "." + std::string(key);
        if (!m.is_object()) {
            r.fail(mp, "expected an object keyed by scenario id");
            return;
        }
        for (const auto& [id, v] : m.items()) {
            Scenario* sc = scenario_by_id(inst.family, id);
            if (!sc)
                r.fail(mp + "." + id, "unknown scenario");
            else
                apply(*sc, v, mp + "." + id);
        }
    };
    each("scenario_penalties", [&](Scenario& sc, const json& v, const std::string& vp) {
        if (!v.is_number())
            r.fail(vp, "expected a number");
        else
            sc.penalty = v.get<double>();
    });
    each("demanded_optional_counts", [&](Scenario& sc, const json& v, const std::string& vp) {
        if (!v.is_number_integer())
            r.fail(vp, "expected an integer");
        else
            sc.demanded_optional_count = v.get<int>();
    });
    each("chosen_optional", [&](Scenario& sc, const json& v, const std::string& vp) {
        if (!v.is_array()) {
            r.fail(vp, "expected an array");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string())
                r.fail(at(vp, i), "expected a string");
            else
                sc.chosen_optional.insert(v[i].get<std::string>());
        }
    });
}

json config_to_json(const BuildConfig& c, char preset) {
    json j = json::object();
    if (preset) j["preset"] = std::string(1, preset);
    j["max_tracks"] = c.max_tracks_global;
    j["reductions"] = c.reductions_allowed;
    j["headway_floor_minutes"] = c.headway_floor_minutes;
    j["horizon_end_minutes"] = c.planning_horizon_end_minutes;
    j["track_rules"] = c.track_rules;
    j["cross_scenario_headways"] = c.cross_scenario_headways;
    j["max_paths_per_triple"] = c.max_paths_per_triple;
    j["tight_linking"] = c.tight_linking;
    return j;
}

/// Whole numbers are written without a fractional part.
json number(double v) {
    if (v == std::round(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
    return v;
}

}  // namespace

DocumentError::DocumentError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

void apply_preset(BuildConfig& config, char preset) {
    const BuildConfig p = BuildConfig::preset(preset, config.planning_horizon_end_minutes);
    config.max_tracks_global = p.max_tracks_global;
    config.reductions_allowed = p.reductions_allowed;
}

Instance instance_from_json(const json& doc) {
    Reader r;
    Instance inst;
    if (!r.object(doc, "$", {"schema_version", "infrastructure", "scenarios", "config", "robust"},
                  {"schema_version", "infrastructure", "scenarios"}))
        throw DocumentError(r.diagnostics);
    const json& version = doc.at("schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
        throw DocumentError(std::vector<Diagnostic>{{"$.schema_version", "unsupported schema version " + version.dump() + ", expected " +
                                                      std::to_string(kSchemaVersion)}});

    // Scenarios first: the default horizon depends on the latest arrival.
    if (const json* scs = r.array(doc, "scenarios", "$")) {
        for (std::size_t i = 0; i < scs->size(); ++i) {
            const std::string p = at("$.scenarios", i);
            const json& j = (*scs)[i];
            Scenario sc;
            if (!r.object(j, p, {"id", "trains", "relations"}, {"id", "trains"})) continue;
            sc.id = r.string(j, "id", p);
            if (const json* ts = r.array(j, "trains", p))
                for (std::size_t k = 0; k < ts->size(); ++k)
                    sc.trains.push_back(read_train(r, (*ts)[k], at(p + ".trains", k)));
            if (const json* rs = r.array(j, "relations", p, false))
                for (std::size_t k = 0; k < rs->size(); ++k)
                    sc.relations.push_back(read_relation(r, (*rs)[k], at(p + ".relations", k)));
            inst.family.scenarios.push_back(std::move(sc));
        }
    }
    read_robust(r, doc, inst);

    Minutes horizon = 1;
    for (const auto& sc : inst.family.scenarios)
        for (const auto& t : sc.trains) horizon = std::max(horizon, t.latest_arrival_minutes);
    inst.config = read_config(r, doc, inst.preset, horizon);

    const json& infra = doc.at("infrastructure");
    std::vector<Node> nodes;
    std::vector<Section> sections;
    std::vector<NodeLink> links;
    if (r.object(infra, "$.infrastructure", {"nodes", "sections", "links"}, {"nodes", "sections"})) {
        if (const json* ns = r.array(infra, "nodes", "$.infrastructure")) {
            for (std::size_t i = 0; i < ns->size(); ++i) {
                const std::string p = at("$.infrastructure.nodes", i);
                const json& j = (*ns)[i];
                if (!r.object(j, p, {"id", "max_stop_minutes", "crossing_time_minutes"}, {"id"})) continue;
                nodes.push_back({r.string(j, "id", p), r.integer(j, "max_stop_minutes", p),
                                 r.integer(j, "crossing_time_minutes", p)});
            }
        }
        if (const json* ss = r.array(infra, "sections", "$.infrastructure"))
            for (std::size_t i = 0; i < ss->size(); ++i)
                sections.push_back(read_section(r, (*ss)[i], at("$.infrastructure.sections", i), inst.config));
        if (const json* ls = r.array(infra, "links", "$.infrastructure", false)) {
            for (std::size_t i = 0; i < ls->size(); ++i) {
                const std::string p = at("$.infrastructure.links", i);
                const json& j = (*ls)[i];
                if (!r.object(j, p, {"at", "from", "to", "cost"}, {"at", "from", "to"})) continue;
                NodeLink l{r.string(j, "at", p), r.string(j, "from", p), r.string(j, "to", p), r.number(j, "cost", p)};
                if (l.from > l.to) std::swap(l.from, l.to);
                links.push_back(std::move(l));
            }
        }
    }
    if (!r.diagnostics.empty()) throw DocumentError(r.diagnostics);

    inst.spec = InfrastructureSpec(std::move(nodes), std::move(sections), std::move(links));
    auto diagnostics = validate_instance(inst.spec, inst.family);
    auto config_diagnostics = validate_config(inst.spec, inst.family, inst.config);
    diagnostics.insert(diagnostics.end(), config_diagnostics.begin(), config_diagnostics.end());
    if (!diagnostics.empty()) throw DocumentError(std::move(diagnostics));
    return inst;
}

json instance_to_json(const Instance& inst) {
    json doc = json::object();
    doc["schema_version"] = kSchemaVersion;

    json nodes = json::array();
    for (const auto& n : inst.spec.nodes())
        nodes.push_back({{"id", n.id},
                         {"max_stop_minutes", n.max_stop_minutes},
                         {"crossing_time_minutes", n.crossing_time_minutes}});
    json sections = json::array();
    for (const auto& s : inst.spec.sections()) {
        json tt = json::object();
        for (const auto& [type, m] : s.travel_time_minutes) tt[type] = m;
        json hw = json::array();
        for (const auto& [pair, m] : s.base_headway_minutes)
            hw.push_back({{"leading", pair.first}, {"following", pair.second}, {"minutes", m}});
        json tc = json::array();
        for (int tr = 1; tr <= s.max_tracks; ++tr) tc.push_back(number(s.cost_of_track(tr)));
        sections.push_back({{"from", s.a},
                            {"to", s.b},
                            {"length_km", number(s.length_km)},
                            {"max_tracks", s.max_tracks},
                            {"travel_time_minutes", tt},
                            {"headways", hw},
                            {"track_costs", tc},
                            {"time_reduction_cost_per_minute", number(s.time_reduction_cost_per_minute)},
                            {"headway_reduction_cost_per_minute", number(s.headway_reduction_cost_per_minute)},
                            {"max_time_reduction_minutes", s.max_time_reduction_minutes},
                            {"max_headway_reduction_minutes", s.max_headway_reduction_minutes}});
    }
    json links = json::array();
    for (const auto& l : inst.spec.links())
        links.push_back({{"at", l.at}, {"from", l.from}, {"to", l.to}, {"cost", number(l.cost)}});
    doc["infrastructure"] = {{"nodes", nodes}, {"sections", sections}, {"links", links}};

    json scenarios = json::array();
    json penalties = json::object();
    json demanded = json::object();
    json chosen = json::object();
    for (const auto& sc : inst.family.scenarios) {
        json trains = json::array();
        for (const auto& t : sc.trains) {
            json tj = {{"id", t.id},
                       {"type", t.train_type},
                       {"origin", t.origin},
                       {"destination", t.destination},
                       {"earliest_departure_minutes", t.earliest_departure_minutes},
                       {"latest_arrival_minutes", t.latest_arrival_minutes}};
            if (!t.via_nodes.empty()) tj["via"] = std::vector<std::string>(t.via_nodes.begin(), t.via_nodes.end());
            if (t.optional) tj["optional"] = true;
            if (t.penalty != 0.0) tj["penalty"] = number(t.penalty);
            trains.push_back(std::move(tj));
        }
        json relations = json::array();
        for (const auto& rel : sc.relations)
            relations.push_back({{"kind", std::string(to_string(rel.kind))},
                                 {"first", rel.first_train},
                                 {"second", rel.second_train},
                                 {"at", rel.at_node},
                                 {"min_minutes", rel.min_minutes},
                                 {"max_minutes", rel.max_minutes}});
        json sj = {{"id", sc.id}, {"trains", trains}};
        if (!relations.empty()) sj["relations"] = relations;
        scenarios.push_back(std::move(sj));
        if (sc.penalty != 0.0) penalties[sc.id] = number(sc.penalty);
        if (sc.demanded_optional_count != 0) demanded[sc.id] = sc.demanded_optional_count;
        if (!sc.chosen_optional.empty())
            chosen[sc.id] = std::vector<std::string>(sc.chosen_optional.begin(), sc.chosen_optional.end());
    }
    doc["scenarios"] = scenarios;
    doc["config"] = config_to_json(inst.config, inst.preset);

    json robust = {{"coverage_share", number(inst.family.coverage_share)}};
    if (!penalties.empty()) robust["scenario_penalties"] = penalties;
    if (!demanded.empty()) robust["demanded_optional_counts"] = demanded;
    if (!chosen.empty()) robust["chosen_optional"] = chosen;
    if (inst.force_robust) robust["force"] = true;
    doc["robust"] = robust;
    return doc;
}

Instance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DocumentError(std::vector<Diagnostic>{{"$", std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " + e.what()}});
    }
    return instance_from_json(doc);
}

std::string dump_instance(const Instance& instance) { return instance_to_json(instance).dump(2) + "\n"; }

Instance load_instance(const std::filesystem::path& path) { return parse_instance(read_text_file(path)); }

void save_instance(const Instance& instance, const std::filesystem::path& path) {
    write_text_file(path, dump_instance(instance));
}

json plan_to_json(const PlanSolution& plan) {
    json arcs = json::array();
    for (const auto& a : plan.built_arcs) arcs.push_back({{"a", a.a}, {"b", a.b}, {"track", a.track}});
    json links = json::array();
    for (const auto& l : plan.built_links) links.push_back({{"at", l.at}, {"from", l.from}, {"to", l.to}});
    json reductions = json::array();
    for (const auto& [pair, red] : plan.reductions)
        reductions.push_back({{"a", pair.first},
                              {"b", pair.second},
                              {"time_minutes", red.time_minutes},
                              {"headway_minutes", red.headway_minutes}});
    json trains = json::array();
    for (const auto& k : plan.active_trains) trains.push_back({{"scenario", k.scenario}, {"train", k.train}});
    json routes = json::array();
    for (const auto& [key, legs] : plan.routes) {
        json lj = json::array();
        for (const auto& leg : legs)
            lj.push_back({{"from", leg.from},
                          {"to", leg.to},
                          {"track", leg.track},
                          {"departure", leg.departure},
                          {"arrival", leg.arrival}});
        routes.push_back({{"scenario", key.scenario}, {"train", key.train}, {"legs", lj}});
    }
    return {{"schema_version", kSchemaVersion},
            {"arcs", arcs},
            {"links", links},
            {"reductions", reductions},
            {"active_scenarios", std::vector<std::string>(plan.active_scenarios.begin(), plan.active_scenarios.end())},
            {"active_trains", trains},
            {"routes", routes}};
}

PlanSolution plan_from_json(const json& doc) {
    Reader r;
    PlanSolution plan;
    if (!r.object(doc, "$", {"schema_version", "arcs", "links", "reductions", "active_scenarios", "active_trains", "routes"},
                  {"schema_version", "arcs", "routes"}))
        throw DocumentError(r.diagnostics);
    if (r.integer(doc, "schema_version", "$", -1) != kSchemaVersion)
        throw DocumentError(std::vector<Diagnostic>{{"$.schema_version", "unsupported schema version"}});
    if (const json* arr = r.array(doc, "arcs", "$"))
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const std::string p = at("$.arcs", i);
            const json& j = (*arr)[i];
            if (!r.object(j, p, {"a", "b", "track"}, {"a", "b", "track"})) continue;
            BuiltArc a{r.string(j, "a", p), r.string(j, "b", p), r.integer(j, "track", p)};
            if (a.a > a.b) std::swap(a.a, a.b);
            plan.built_arcs.insert(std::move(a));
        }
    if (const json* arr = r.array(doc, "links", "$", false))
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const std::string p = at("$.links", i);
            const json& j = (*arr)[i];
            if (!r.object(j, p, {"at", "from", "to"}, {"at", "from", "to"})) continue;
            BuiltLink l{r.string(j, "at", p), r.string(j, "from", p), r.string(j, "to", p)};
            if (l.from > l.to) std::swap(l.from, l.to);
            plan.built_links.insert(std::move(l));
        }
    if (const json* arr = r.array(doc, "reductions", "$", false))
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const std::string p = at("$.reductions", i);
            const json& j = (*arr)[i];
            if (!r.object(j, p, {"a", "b", "time_minutes", "headway_minutes"}, {"a", "b"})) continue;
            auto key = std::make_pair(r.string(j, "a", p), r.string(j, "b", p));
            if (key.first > key.second) std::swap(key.first, key.second);
            plan.reductions[key] = {r.integer(j, "time_minutes", p), r.integer(j, "headway_minutes", p)};
        }
    for (auto& s : r.strings(doc, "active_scenarios", "$")) plan.active_scenarios.insert(std::move(s));
    if (const json* arr = r.array(doc, "active_trains", "$", false))
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const std::string p = at("$.active_trains", i);
            const json& j = (*arr)[i];
            if (!r.object(j, p, {"scenario", "train"}, {"scenario", "train"})) continue;
            plan.active_trains.insert({r.string(j, "scenario", p), r.string(j, "train", p)});
        }
    if (const json* arr = r.array(doc, "routes", "$"))
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const std::string p = at("$.routes", i);
            const json& j = (*arr)[i];
            if (!r.object(j, p, {"scenario", "train", "legs"}, {"scenario", "train", "legs"})) continue;
            std::vector<RouteLeg> legs;
            if (const json* ls = r.array(j, "legs", p))
                for (std::size_t k = 0; k < ls->size(); ++k) {
                    const std::string lp = at(p + ".legs", k);
                    const json& l = (*ls)[k];
                    if (!r.object(l, lp, {"from", "to", "track", "departure", "arrival"},
                                  {"from", "to", "track", "departure", "arrival"}))
                        continue;
                    legs.push_back({r.string(l, "from", lp), r.string(l, "to", lp), r.integer(l, "track", lp),
                                    r.integer(l, "departure", lp), r.integer(l, "arrival", lp)});
                }
            plan.routes[{r.string(j, "scenario", p), r.string(j, "train", p)}] = std::move(legs);
        }
    if (!r.diagnostics.empty()) throw DocumentError(r.diagnostics);
    return plan;
}

PlanSolution load_plan(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw DocumentError(std::vector<Diagnostic>{{"$", std::string("malformed JSON at byte ") + std::to_string(e.byte)}});
    }
    return plan_from_json(doc);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

}  // namespace railnet
