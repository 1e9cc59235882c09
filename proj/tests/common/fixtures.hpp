#pragma once

/**
 * @file fixtures.hpp
 * @brief Small hand-built instances shared by the unit tests.
 */

#include <random>
#include <string>
#include <vector>

#include "railnet/core.hpp"
#include "railnet/generator.hpp"
#include "railnet/io.hpp"

namespace railnet::testing {

inline Section make_section(const NodeId& a, const NodeId& b, Minutes minutes, double track_cost = 100.0,
                            int max_tracks = 2, Minutes headway = 3) {
    Section s;
    s.a = a;
    s.b = b;
    s.length_km = 10.0;
    s.max_tracks = max_tracks;
    s.travel_time_minutes["IC"] = minutes;
    s.base_headway_minutes[{"IC", "IC"}] = headway;
    for (int tr = 1; tr <= max_tracks; ++tr) s.track_cost[tr] = track_cost;
    s.time_reduction_cost_per_minute = 50.0;
    s.headway_reduction_cost_per_minute = 50.0;
    return s;
}

inline Train make_train(const std::string& id, const NodeId& origin, const NodeId& destination, Minutes earliest,
                        Minutes latest) {
    Train t;
    t.id = id;
    t.train_type = "IC";
    t.origin = origin;
    t.destination = destination;
    t.earliest_departure_minutes = earliest;
    t.latest_arrival_minutes = latest;
    return t;
}

/// A(10)B(10)C with one link at B.
inline InfrastructureSpec chain_spec(Minutes reduction = 0, double link_cost = 10.0) {
    std::vector<Node> nodes{{"A", 0, 1}, {"B", 5, 1}, {"C", 0, 1}};
    Section ab = make_section("A", "B", 10);
    Section bc = make_section("B", "C", 10);
    ab.max_time_reduction_minutes = reduction;
    bc.max_time_reduction_minutes = reduction;
    return InfrastructureSpec(nodes, {ab, bc}, {{"B", "A", "C", link_cost}});
}

/// Diamond A-B-D / A-C-D with links at B and C.
inline InfrastructureSpec diamond_spec() {
    std::vector<Node> nodes{{"A", 0, 1}, {"B", 5, 1}, {"C", 5, 1}, {"D", 0, 1}};
    return InfrastructureSpec(nodes,
                              {make_section("A", "B", 10), make_section("B", "D", 10), make_section("A", "C", 12),
                               make_section("C", "D", 12)},
                              {{"B", "A", "D", 0.0}, {"C", "A", "D", 0.0}});
}

inline TimetableFamily single(std::vector<Train> trains) {
    TimetableFamily f;
    Scenario s;
    s.id = "base";
    s.trains = std::move(trains);
    f.scenarios.push_back(std::move(s));
    return f;
}

inline BuildConfig config_c(Minutes horizon = 120) { return BuildConfig::preset('C', horizon); }

/// Oracle-scale generator parameters used across suites.
inline GeneratorParams suite_params(int seed, char preset = 'B') {
    GeneratorParams p;
    p.nodes = 4 + seed % 3;
    p.sections = p.nodes - 1 + seed % 3;
    p.trains_per_type = {{"IC", 2 + seed % 2}, {"RE", 2 + (seed / 2) % 2}};
    p.relation_probability = 0.6;
    p.max_slack = 15;
    p.preset = preset;
    return p;
}

/**
 * @brief Random connected multigraph with unit-free travel times for one
 *        train type and links on every neighbour pair unless `link_share`
 *        drops some.
 */
inline InfrastructureSpec random_spec(std::uint64_t seed, int node_count, int extra_edges, double link_share = 1.0) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    std::vector<Node> nodes;
    for (int i = 0; i < node_count; ++i) nodes.push_back({std::string(1, static_cast<char>('A' + i)), 3, 1});
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i < node_count; ++i) pairs.emplace_back(pick(0, i - 1), i);
    for (int e = 0; e < extra_edges; ++e) {
        const int u = pick(0, node_count - 1);
        const int v = pick(0, node_count - 1);
        if (u == v) continue;
        const auto key = std::make_pair(std::min(u, v), std::max(u, v));
        bool seen = false;
        for (const auto& p : pairs) seen |= std::make_pair(std::min(p.first, p.second), std::max(p.first, p.second)) == key;
        if (!seen) pairs.push_back(key);
    }
    std::vector<Section> sections;
    for (const auto& [u, v] : pairs) {
        Section s = make_section(nodes[u].id, nodes[v].id, pick(2, 15), 100.0, pick(0, 1) ? 4 : 2);
        s.length_km = pick(10, 30);
        s.max_time_reduction_minutes = pick(0, 1);
        sections.push_back(s);
    }
    std::vector<NodeLink> links;
    for (int at = 0; at < node_count; ++at) {
        std::vector<int> nb;
        for (const auto& [u, v] : pairs) {
            if (u == at) nb.push_back(v);
            if (v == at) nb.push_back(u);
        }
        std::sort(nb.begin(), nb.end());
        for (std::size_t x = 0; x < nb.size(); ++x)
            for (std::size_t y = x + 1; y < nb.size(); ++y)
                if (static_cast<double>(rng() % 1000) < link_share * 1000.0)
                    links.push_back({nodes[at].id, nodes[nb[x]].id, nodes[nb[y]].id, 10.0});
    }
    return InfrastructureSpec(nodes, sections, links);
}

}  // namespace railnet::testing
