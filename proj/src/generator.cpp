#include "railnet/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace railnet {

namespace {

/// Portable draws on top of the standardised engine output.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : engine_(seed) {}

    int uniform(int lo, int hi) {
        if (hi <= lo) return lo;
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }

    bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

private:
    std::mt19937_64 engine_;
};

void check_params(const GeneratorParams& p) {
    if (p.nodes < 2 || p.nodes > 26) throw InputError("generator: nodes must be within [2,26]");
    const int max_sections = p.nodes * (p.nodes - 1) / 2;
    if (p.sections < p.nodes - 1 || p.sections > max_sections)
        throw InputError("generator: sections must be within [nodes-1, nodes*(nodes-1)/2]");
    if (p.scenarios < 1) throw InputError("generator: at least one scenario required");
    if (!(p.optional_share >= 0.0 && p.optional_share <= 1.0))
        throw InputError("generator: optional share must be within [0,1]");
    if (!(p.coverage_share > 0.0 && p.coverage_share <= 1.0))
        throw InputError("generator: coverage share must be within (0,1]");
    if (p.min_slack < 0 || p.max_slack < p.min_slack) throw InputError("generator: invalid slack range");
    if (p.preset != 'A' && p.preset != 'B' && p.preset != 'C') throw InputError("generator: unknown preset");
    int pool = 0;
    for (const auto& [type, count] : p.trains_per_type) {
        if (count < 0) throw InputError("generator: negative train count for " + type);
        pool += count;
    }
    if (pool < 1) throw InputError("generator: no trains requested");
    if (p.horizon < 30) throw InputError("generator: horizon must be at least 30 minutes");
}

/// Speed in km/h per type; faster types get higher speeds by name rank.
double speed_of(int type_rank) { return 100.0 - 20.0 * (type_rank % 3); }

}  // namespace

Instance generate_instance(std::uint64_t seed, const GeneratorParams& p) {
    check_params(p);
    Draw draw(seed);

    std::vector<NodeId> ids;
    std::vector<Node> nodes;
    for (int i = 0; i < p.nodes; ++i) {
        ids.emplace_back(1, static_cast<char>('A' + i));
        nodes.push_back({ids.back(), draw.uniform(0, 4), draw.uniform(1, 2)});
    }

    // Random spanning tree, then extra chords.
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i < p.nodes; ++i) pairs.emplace_back(draw.uniform(0, i - 1), i);
    std::vector<std::pair<int, int>> chords;
    for (int i = 0; i < p.nodes; ++i)
        for (int j = i + 1; j < p.nodes; ++j)
            if (std::find(pairs.begin(), pairs.end(), std::make_pair(i, j)) == pairs.end()) chords.emplace_back(i, j);
    while (static_cast<int>(pairs.size()) < p.sections) {
        const int pick = draw.uniform(0, static_cast<int>(chords.size()) - 1);
        pairs.push_back(chords[pick]);
        chords.erase(chords.begin() + pick);
    }

    std::vector<TrainType> types;
    for (const auto& [type, count] : p.trains_per_type) types.push_back(type);

    const BuildConfig defaults = BuildConfig::preset(p.preset, p.horizon);
    std::vector<Section> sections;
    for (const auto& [u, v] : pairs) {
        Section s;
        s.a = ids[u];
        s.b = ids[v];
        s.length_km = draw.uniform(8, 25);
        s.max_tracks = draw.chance(p.four_track_share) ? 4 : 2;
        Minutes fastest = p.horizon;
        for (std::size_t t = 0; t < types.size(); ++t) {
            const Minutes minutes =
                std::max(2, static_cast<Minutes>(std::ceil(s.length_km * 60.0 / speed_of(static_cast<int>(t)))));
            s.travel_time_minutes[types[t]] = minutes;
            fastest = std::min(fastest, minutes);
        }
        Minutes smallest_headway = p.horizon;
        for (const auto& lead : types)
            for (const auto& follow : types) {
                const Minutes h = draw.uniform(3, 5);
                s.base_headway_minutes[{lead, follow}] = h;
                smallest_headway = std::min(smallest_headway, h);
            }
        const double first = 100.0 * draw.uniform(1, 3);
        s.track_cost[1] = first;
        s.track_cost[2] = first + 100.0 * draw.uniform(0, 1);
        for (int tr = 3; tr <= s.max_tracks; ++tr) s.track_cost[tr] = 100.0 * draw.uniform(2, 4);
        s.time_reduction_cost_per_minute = 10.0 * draw.uniform(3, 9);
        s.headway_reduction_cost_per_minute = 10.0 * draw.uniform(3, 9);
        const Minutes per_ten_km = static_cast<Minutes>(std::floor(s.length_km / 10.0));
        s.max_time_reduction_minutes = std::clamp(per_ten_km, 0, fastest - 1);
        s.max_headway_reduction_minutes =
            std::clamp(per_ten_km, 0, std::max(0, smallest_headway - defaults.headway_floor_minutes));
        sections.push_back(std::move(s));
    }

    std::vector<NodeLink> links;
    {
        std::vector<std::vector<int>> adjacent(p.nodes);
        for (const auto& [u, v] : pairs) {
            adjacent[u].push_back(v);
            adjacent[v].push_back(u);
        }
        for (int at = 0; at < p.nodes; ++at) {
            auto& nb = adjacent[at];
            std::sort(nb.begin(), nb.end());
            for (std::size_t x = 0; x < nb.size(); ++x)
                for (std::size_t y = x + 1; y < nb.size(); ++y)
                    links.push_back({ids[at], ids[nb[x]], ids[nb[y]], 10.0 * draw.uniform(0, 3)});
        }
    }

    Instance inst;
    inst.spec = InfrastructureSpec(std::move(nodes), sections, std::move(links));
    inst.preset = p.preset;
    inst.config = defaults;
    inst.family.coverage_share = p.coverage_share;

    // Train pool with a reference run at the earliest departure.
    struct PoolTrain {
        Train train;
        Minutes reference_arrival = 0;
    };
    std::vector<PoolTrain> pool;
    for (const auto& [type, count] : p.trains_per_type) {
        for (int n = 1; n <= count; ++n) {
            Train t;
            t.id = type + std::to_string(n);
            t.train_type = type;
            Minutes run = 0;
            for (int attempt = 0;; ++attempt) {
                const int o = draw.uniform(0, p.nodes - 1);
                int d = draw.uniform(0, p.nodes - 2);
                if (d >= o) ++d;
                t.origin = ids[o];
                t.destination = ids[d];
                run = *min_travel_time(inst.spec, type, t.origin, t.destination, false);
                if (run + p.min_slack <= p.horizon || attempt > 50) break;
            }
            if (run + p.min_slack > p.horizon) throw InputError("generator: horizon too short for the network");
            const Minutes slack = std::min(draw.uniform(p.min_slack, p.max_slack), p.horizon - run);
            const Minutes latest_start = p.horizon - run - slack;
            t.earliest_departure_minutes = draw.uniform(0, std::min(latest_start, p.horizon / 3));
            t.latest_arrival_minutes = t.earliest_departure_minutes + run + slack;
            if (draw.chance(p.optional_share)) {
                t.optional = true;
                t.penalty = draw.uniform(1, 5);
            }
            pool.push_back({t, t.earliest_departure_minutes + run});
        }
    }

    for (int s = 0; s < p.scenarios; ++s) {
        Scenario sc;
        sc.id = p.scenarios == 1 ? "base" : "s" + std::to_string(s + 1);
        std::vector<const PoolTrain*> members;
        for (const auto& pt : pool)
            if (p.scenarios == 1 || draw.chance(0.6)) members.push_back(&pt);
        if (members.empty()) members.push_back(&pool[draw.uniform(0, static_cast<int>(pool.size()) - 1)]);
        for (const auto* pt : members) sc.trains.push_back(pt->train);
        if (p.scenarios > 1) sc.penalty = draw.uniform(1, 5);

        if (draw.chance(p.relation_probability)) {
            std::vector<TimingRelation> candidates;
            for (const auto* k1 : members)
                for (const auto* k2 : members) {
                    if (k1 == k2 || k1->train.optional || k2->train.optional) continue;
                    const Train& t1 = k1->train;
                    const Train& t2 = k2->train;
                    TimingRelation rel;
                    rel.first_train = t1.id;
                    rel.second_train = t2.id;
                    Minutes gap = 0;
                    if (t1.origin == t2.origin && t1.id < t2.id) {
                        rel.kind = RelationKind::DepartureFrequency;
                        rel.at_node = t1.origin;
                        gap = t2.earliest_departure_minutes - t1.earliest_departure_minutes;
                    } else if (t1.destination == t2.destination && t1.id < t2.id) {
                        rel.kind = RelationKind::ArrivalFrequency;
                        rel.at_node = t1.destination;
                        gap = k2->reference_arrival - k1->reference_arrival;
                    } else if (t1.destination == t2.origin) {
                        rel.kind = RelationKind::Transfer;
                        rel.at_node = t1.destination;
                        gap = t2.earliest_departure_minutes - k1->reference_arrival;
                    } else {
                        continue;
                    }
                    rel.min_minutes = gap - 5;
                    rel.max_minutes = gap + 10;
                    candidates.push_back(rel);
                }
            if (!candidates.empty())
                sc.relations.push_back(candidates[draw.uniform(0, static_cast<int>(candidates.size()) - 1)]);
        }
        inst.family.scenarios.push_back(std::move(sc));
    }

    Minutes horizon = 1;
    for (const auto& sc : inst.family.scenarios)
        for (const auto& t : sc.trains) horizon = std::max(horizon, t.latest_arrival_minutes);
    inst.config.planning_horizon_end_minutes = std::max(horizon, p.horizon);
    return inst;
}

}  // namespace railnet
