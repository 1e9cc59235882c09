#include "railnet/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>

namespace railnet {

namespace {

bool valid_identifier(std::string_view id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

std::string section_label(const Section& s) { return "section " + s.a + "-" + s.b; }

}  // namespace

std::optional<Minutes> Section::travel_time(const TrainType& type) const {
    auto it = travel_time_minutes.find(type);
    if (it == travel_time_minutes.end()) return std::nullopt;
    return it->second;
}

std::optional<Minutes> Section::headway(const TrainType& leading, const TrainType& following) const {
    auto it = base_headway_minutes.find({leading, following});
    if (it == base_headway_minutes.end()) return std::nullopt;
    return it->second;
}

double Section::cost_of_track(int track) const {
    auto it = track_cost.find(track);
    return it == track_cost.end() ? 0.0 : it->second;
}

InfrastructureSpec::InfrastructureSpec(std::vector<Node> nodes, std::vector<Section> sections,
                                       std::vector<NodeLink> links)
    : nodes_(std::move(nodes)), sections_(std::move(sections)), links_(std::move(links)) {
    std::stable_sort(nodes_.begin(), nodes_.end(), [](const Node& l, const Node& r) { return l.id < r.id; });
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) node_lookup_.emplace(nodes_[i].id, i);

    for (auto& s : sections_) {
        if (s.b < s.a) std::swap(s.a, s.b);
    }
    std::stable_sort(sections_.begin(), sections_.end(), [](const Section& l, const Section& r) {
        return std::tie(l.a, l.b) < std::tie(r.a, r.b);
    });
    adjacency_.assign(nodes_.size(), {});
    section_a_.assign(sections_.size(), -1);
    section_b_.assign(sections_.size(), -1);
    for (int s = 0; s < static_cast<int>(sections_.size()); ++s) {
        auto u = node_index(sections_[s].a);
        auto v = node_index(sections_[s].b);
        if (!u || !v || *u == *v) continue;
        section_a_[s] = *u;
        section_b_[s] = *v;
        if (section_lookup_.emplace(std::pair{*u, *v}, s).second) {
            adjacency_[*u].emplace_back(*v, s);
            adjacency_[*v].emplace_back(*u, s);
        }
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());

    for (auto& l : links_) {
        if (l.to < l.from) std::swap(l.from, l.to);
    }
    std::stable_sort(links_.begin(), links_.end(), [](const NodeLink& l, const NodeLink& r) {
        return std::tie(l.at, l.from, l.to) < std::tie(r.at, r.from, r.to);
    });
    for (int k = 0; k < static_cast<int>(links_.size()); ++k) {
        auto at = node_index(links_[k].at);
        auto u = node_index(links_[k].from);
        auto v = node_index(links_[k].to);
        if (!at || !u || !v) continue;
        link_lookup_.emplace(std::tuple{*at, std::min(*u, *v), std::max(*u, *v)}, k);
    }
}

std::optional<int> InfrastructureSpec::node_index(std::string_view id) const {
    auto it = node_lookup_.find(id);
    if (it == node_lookup_.end()) return std::nullopt;
    return it->second;
}

int InfrastructureSpec::require_node(std::string_view id) const {
    auto idx = node_index(id);
    if (!idx) throw InputError("unknown node '" + std::string(id) + "'");
    return *idx;
}

std::optional<int> InfrastructureSpec::section_index(int u, int v) const {
    auto it = section_lookup_.find({std::min(u, v), std::max(u, v)});
    if (it == section_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> InfrastructureSpec::link_index(int at, int u, int v) const {
    auto it = link_lookup_.find({at, std::min(u, v), std::max(u, v)});
    if (it == link_lookup_.end()) return std::nullopt;
    return it->second;
}

std::set<TrainType> InfrastructureSpec::train_types() const {
    std::set<TrainType> types;
    for (const auto& s : sections_)
        for (const auto& [type, minutes] : s.travel_time_minutes) types.insert(type);
    return types;
}

std::string_view to_string(RelationKind kind) {
    switch (kind) {
        case RelationKind::ArrivalFrequency: return "arrival_frequency";
        case RelationKind::DepartureFrequency: return "departure_frequency";
        case RelationKind::Transfer: return "transfer";
    }
    return "unknown";
}

std::optional<RelationKind> relation_kind_from_string(std::string_view text) {
    if (text == "arrival_frequency") return RelationKind::ArrivalFrequency;
    if (text == "departure_frequency") return RelationKind::DepartureFrequency;
    if (text == "transfer") return RelationKind::Transfer;
    return std::nullopt;
}

const Train* Scenario::find_train(std::string_view train_id) const {
    for (const auto& t : trains)
        if (t.id == train_id) return &t;
    return nullptr;
}

int Scenario::mandatory_count() const {
    return static_cast<int>(std::count_if(trains.begin(), trains.end(), [](const Train& t) { return !t.optional; }));
}

int Scenario::optional_count() const { return static_cast<int>(trains.size()) - mandatory_count(); }

bool Scenario::must_run(const Train& train) const { return !train.optional || chosen_optional.count(train.id) > 0; }

bool TimetableFamily::is_deterministic() const {
    return scenarios.size() == 1 && scenarios.front().optional_count() == 0;
}

int TimetableFamily::required_active_scenarios() const {
    const double n = static_cast<double>(scenarios.size());
    return static_cast<int>(std::ceil(coverage_share * n - 1e-9));
}

std::size_t TimetableFamily::train_count() const {
    std::size_t n = 0;
    for (const auto& s : scenarios) n += s.trains.size();
    return n;
}

BuildConfig BuildConfig::preset(char name, Minutes horizon_end) {
    BuildConfig c;
    c.planning_horizon_end_minutes = horizon_end;
    switch (name) {
        case 'A': case 'a': c.max_tracks_global = 4; c.reductions_allowed = true; break;
        case 'B': case 'b': c.max_tracks_global = 2; c.reductions_allowed = true; break;
        case 'C': case 'c': c.max_tracks_global = 2; c.reductions_allowed = false; break;
        default: throw InputError(std::string("unknown configuration '") + name + "'");
    }
    return c;
}

std::vector<Diagnostic> validate_instance(const InfrastructureSpec& spec, const TimetableFamily& family) {
    std::vector<Diagnostic> out;
    auto report = [&](std::string location, std::string message) {
        out.push_back({std::move(location), std::move(message)});
    };

    const auto& nodes = spec.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        const std::string loc = "node " + n.id;
        if (!valid_identifier(n.id)) report(loc, "invalid identifier");
        if (i > 0 && nodes[i - 1].id == n.id) report(loc, "duplicate node id");
        if (n.max_stop_minutes < 0) report(loc, "negative max stop time");
        if (n.crossing_time_minutes < 0) report(loc, "negative crossing time");
    }

    std::set<TrainType> used_types;
    for (const auto& sc : family.scenarios)
        for (const auto& t : sc.trains) used_types.insert(t.train_type);

    const auto& sections = spec.sections();
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const auto& s = sections[i];
        const std::string loc = section_label(s);
        if (s.a == s.b) report(loc, "section endpoints must differ");
        if (!spec.node_index(s.a)) report(loc, "unknown endpoint " + s.a);
        if (!spec.node_index(s.b)) report(loc, "unknown endpoint " + s.b);
        if (i > 0 && sections[i - 1].a == s.a && sections[i - 1].b == s.b) report(loc, "duplicate section");
        if (!(s.length_km > 0.0)) report(loc, "length must be positive");
        if (s.max_tracks < 1 || s.max_tracks > 4) report(loc, "max tracks must be within [1,4]");
        for (const auto& [type, minutes] : s.travel_time_minutes) {
            if (minutes <= 0) report(loc, "non-positive travel time for " + type);
            else if (minutes - s.max_time_reduction_minutes < 1)
                report(loc, "time reduction cap leaves no travel time for " + type);
        }
        for (const auto& [pair, minutes] : s.base_headway_minutes)
            if (minutes <= 0) report(loc, "non-positive headway " + pair.first + ">" + pair.second);
        for (const auto& type : used_types) {
            if (!s.travel_time(type)) report(loc, "missing travel time for train type " + type);
            for (const auto& other : used_types)
                if (!s.headway(type, other)) report(loc, "missing headway " + type + ">" + other);
        }
        for (int tr = 1; tr <= std::clamp(s.max_tracks, 0, 4); ++tr)
            if (!s.track_cost.count(tr)) report(loc, "missing cost for track " + std::to_string(tr));
        for (const auto& [tr, cost] : s.track_cost) {
            if (tr < 1 || tr > s.max_tracks) report(loc, "cost given for nonexistent track " + std::to_string(tr));
            if (cost < 0) report(loc, "negative track cost");
        }
        if (s.time_reduction_cost_per_minute < 0 || s.headway_reduction_cost_per_minute < 0)
            report(loc, "negative reduction cost");
        if (s.max_time_reduction_minutes < 0 || s.max_headway_reduction_minutes < 0)
            report(loc, "negative reduction cap");
        if (s.max_headway_reduction_minutes > static_cast<int>(std::floor(s.length_km / 10.0)))
            report(loc, "headway reduction exceeds one minute per ten km");
    }

    const auto& links = spec.links();
    for (std::size_t i = 0; i < links.size(); ++i) {
        const auto& l = links[i];
        const std::string loc = "link " + l.at + ":" + l.from + "-" + l.to;
        auto at = spec.node_index(l.at);
        auto u = spec.node_index(l.from);
        auto v = spec.node_index(l.to);
        if (!at || !u || !v) {
            report(loc, "link references unknown node");
            continue;
        }
        if (*u == *v) report(loc, "link must join two different neighbours");
        if (*at == *u || *at == *v) report(loc, "link endpoint equals link node");
        if (!spec.section_index(*u, *at) || !spec.section_index(*at, *v))
            report(loc, "link requires sections to both neighbours");
        if (i > 0 && links[i - 1].at == l.at && links[i - 1].from == l.from && links[i - 1].to == l.to)
            report(loc, "duplicate link");
        if (l.cost < 0) report(loc, "negative link cost");
    }

    if (!nodes.empty()) {
        std::vector<char> seen(nodes.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (auto [v, s] : spec.neighbors(u))
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (!seen[i]) report("node " + nodes[i].id, "network is disconnected");
    }

    if (family.scenarios.empty()) report("family", "no scenarios");
    if (!(family.coverage_share > 0.0 && family.coverage_share <= 1.0))
        report("family", "coverage share must be within (0,1]");

    std::set<std::string> scenario_ids;
    for (const auto& sc : family.scenarios) {
        const std::string sloc = "scenario " + sc.id;
        if (!valid_identifier(sc.id)) report(sloc, "invalid identifier");
        if (!scenario_ids.insert(sc.id).second) report(sloc, "duplicate scenario id");
        if (sc.penalty < 0) report(sloc, "negative scenario penalty");
        if (sc.demanded_optional_count < 0 || sc.demanded_optional_count > sc.optional_count())
            report(sloc, "demanded optional count exceeds optional trains");
        for (const auto& id : sc.chosen_optional) {
            const Train* t = sc.find_train(id);
            if (!t || !t->optional) report(sloc, "chosen train " + id + " is not an optional train");
        }
        std::set<std::string> train_ids;
        for (const auto& t : sc.trains) {
            const std::string loc = sloc + " train " + t.id;
            if (!valid_identifier(t.id)) report(loc, "invalid identifier");
            if (!train_ids.insert(t.id).second) report(loc, "duplicate train id");
            if (!spec.node_index(t.origin)) report(loc, "unknown origin " + t.origin);
            if (!spec.node_index(t.destination)) report(loc, "unknown destination " + t.destination);
            if (t.origin == t.destination) report(loc, "degenerate train");
            if (t.earliest_departure_minutes < 0) report(loc, "negative earliest departure");
            if (t.earliest_departure_minutes >= t.latest_arrival_minutes)
                report(loc, "earliest departure not before latest arrival");
            for (const auto& via : t.via_nodes) {
                if (!spec.node_index(via)) report(loc, "unknown via node " + via);
                if (via == t.origin || via == t.destination) report(loc, "via node equals origin or destination");
            }
            if (t.penalty < 0) report(loc, "negative penalty");
            if (!valid_identifier(t.train_type)) report(loc, "invalid train type");
        }
        for (std::size_t r = 0; r < sc.relations.size(); ++r) {
            const auto& rel = sc.relations[r];
            const std::string loc = sloc + " relation " + std::to_string(r);
            const Train* k1 = sc.find_train(rel.first_train);
            const Train* k2 = sc.find_train(rel.second_train);
            if (!k1 || !k2) {
                report(loc, "relation references unknown train");
                continue;
            }
            if (rel.first_train == rel.second_train) report(loc, "relation joins a train to itself");
            if (k1->optional || k2->optional) report(loc, "relation on optional train");
            if (!spec.node_index(rel.at_node)) report(loc, "unknown relation node " + rel.at_node);
            if (rel.min_minutes > rel.max_minutes) report(loc, "relation minimum exceeds maximum");
        }
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Diagnostic> validate_config(const InfrastructureSpec& spec, const TimetableFamily& family,
                                        const BuildConfig& config) {
    std::vector<Diagnostic> out;
    if (config.max_tracks_global < 1 || config.max_tracks_global > 4)
        out.push_back({"config", "max tracks must be within [1,4]"});
    if (config.headway_floor_minutes < 1) out.push_back({"config", "headway floor must be positive"});
    if (config.planning_horizon_end_minutes < 1) out.push_back({"config", "planning horizon must be positive"});
    if (config.max_paths_per_triple < 1) out.push_back({"config", "path cap must be positive"});
    for (const auto& sc : family.scenarios)
        for (const auto& t : sc.trains)
            if (t.latest_arrival_minutes > config.planning_horizon_end_minutes)
                out.push_back({"scenario " + sc.id + " train " + t.id, "latest arrival beyond planning horizon"});
    for (const auto& s : spec.sections()) {
        for (const auto& [pair, minutes] : s.base_headway_minutes)
            if (minutes - s.max_headway_reduction_minutes < config.headway_floor_minutes &&
                s.max_headway_reduction_minutes > 0)
                out.push_back({section_label(s), "headway reduction undercuts headway floor"});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::vector<std::optional<Minutes>>> travel_time_matrix(const InfrastructureSpec& spec,
                                                                    const TrainType& train_type,
                                                                    bool assume_max_reductions) {
    const int n = static_cast<int>(spec.nodes().size());
    std::vector<std::vector<std::optional<Minutes>>> out(n);
    for (int source = 0; source < n; ++source) {
        std::vector<std::optional<Minutes>> dist(n);
        using Item = std::pair<Minutes, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        dist[source] = 0;
        queue.emplace(0, source);
        while (!queue.empty()) {
            auto [d, u] = queue.top();
            queue.pop();
            if (d != dist[u]) continue;
            for (auto [v, s] : spec.neighbors(u)) {
                const Section& sec = spec.sections()[s];
                auto t = sec.travel_time(train_type);
                if (!t) continue;
                Minutes w = *t - (assume_max_reductions ? sec.max_time_reduction_minutes : 0);
                if (!dist[v] || d + w < *dist[v]) {
                    dist[v] = d + w;
                    queue.emplace(d + w, v);
                }
            }
        }
        out[source] = std::move(dist);
    }
    return out;
}

std::optional<Minutes> min_travel_time(const InfrastructureSpec& spec, const TrainType& train_type,
                                       std::string_view from, std::string_view to,
                                       bool assume_max_reductions) {
    const int u = spec.require_node(from);
    const int v = spec.require_node(to);
    return travel_time_matrix(spec, train_type, assume_max_reductions)[u][v];
}

std::vector<int> allowed_tracks(Direction direction, int max_tracks) {
    if (max_tracks < 1 || max_tracks > 4)
        throw InputError("max tracks out of range: " + std::to_string(max_tracks));
    if (direction == Direction::Ascending) return max_tracks <= 2 ? std::vector<int>{1} : std::vector<int>{1, 3};
    switch (max_tracks) {
        case 1: return {1};
        case 2:
        case 3: return {1, 2};
        default: return {1, 2, 4};
    }
}

std::vector<int> track_options(Direction direction, int max_tracks, bool track_rules) {
    if (track_rules) return allowed_tracks(direction, max_tracks);
    if (max_tracks < 1 || max_tracks > 4)
        throw InputError("max tracks out of range: " + std::to_string(max_tracks));
    std::vector<int> all(max_tracks);
    for (int i = 0; i < max_tracks; ++i) all[i] = i + 1;
    return all;
}

int effective_max_tracks(const Section& section, const BuildConfig& config) {
    return std::clamp(std::min(section.max_tracks, config.max_tracks_global), 1, 4);
}

Minutes time_reduction_cap(const Section& section, const BuildConfig& config) {
    return config.reductions_allowed ? std::max(0, section.max_time_reduction_minutes) : 0;
}

Minutes headway_reduction_cap(const Section& section, const BuildConfig& config) {
    if (!config.reductions_allowed) return 0;
    Minutes cap = std::min(section.max_headway_reduction_minutes,
                           static_cast<Minutes>(std::floor(section.length_km / 10.0)));
    for (const auto& [pair, minutes] : section.base_headway_minutes)
        cap = std::min(cap, minutes - config.headway_floor_minutes);
    return std::max(0, cap);
}

Minutes max_separation(const InfrastructureSpec& spec) {
    Minutes m = 0;
    for (const auto& s : spec.sections())
        for (const auto& [pair, minutes] : s.base_headway_minutes) m = std::max(m, minutes);
    for (const auto& n : spec.nodes()) m = std::max(m, n.crossing_time_minutes);
    return m;
}

std::string qualified_train_name(const TimetableFamily& family, int scenario, int train) {
    const auto& sc = family.scenarios.at(scenario);
    if (family.scenarios.size() == 1) return sc.trains.at(train).id;
    return sc.id + "." + sc.trains.at(train).id;
}

}  // namespace railnet
