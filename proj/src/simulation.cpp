#include "qslam/simulation.hpp"

#include "qslam/angles.hpp"
#include "qslam/errors.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>

namespace qslam {

std::vector<TripletId> observed_triplets(const Scenario& s)
{
    std::set<TripletId> ids;
    for (const Observation& o : s.observations)
        ids.insert(o.triplet);
    return {ids.begin(), ids.end()};
}

TripletFrameData to_triplet_frame(const Scenario& s, TripletId id)
{
    auto find = [&](int lid) {
        auto it = s.landmarks.find(lid);
        if (it == s.landmarks.end())
            throw ArgumentError("scenario has no landmark " + std::to_string(lid));
        return it->second;
    };
    TripletFrameData d;
    d.triplet = id;
    d.frame = FrameMap::spanning(find(id.a), find(id.b));
    d.landmark_c = d.frame.inverse(find(id.c));
    for (const Observation& o : s.observations)
        if (o.triplet == id)
            d.observations.push_back(o);
    std::stable_sort(d.observations.begin(), d.observations.end(),
                     [](const Observation& a, const Observation& b) { return a.time_index < b.time_index; });
    for (const Observation& o : d.observations) {
        if (o.time_index < 0 || std::size_t(o.time_index) >= s.trajectory.size())
            throw ArgumentError("observation refers to a missing pose");
        d.poses.push_back(d.frame.inverse(s.trajectory[std::size_t(o.time_index)]));
    }
    for (std::size_t i = 1; i < d.observations.size(); ++i) {
        int from = d.observations[i - 1].time_index, to = d.observations[i].time_index;
        for (const Action& a : s.actions)
            if (a.from_index == from && a.time_index == to) {
                d.actions.push_back({a.time_index, a.from_index, d.frame.inverse_heading(a.psi)});
                break;
            }
    }
    return d;
}

TripletTruth triplet_truth(const TripletFrameData& data, const SpacePartition& partition)
{
    TripletTruth t;
    t.landmark_state = partition.classify(data.landmark_c);
    for (const Pose2& p : data.poses)
        t.camera_states.push_back(partition.classify(p.position()));
    return t;
}

namespace {

Vec2 draw_point(const WorldBounds& b, const std::vector<Vec2>& taken, Rng& rng)
{
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Vec2 p{uniform(rng, b.xmin, b.xmax), uniform(rng, b.ymin, b.ymax)};
        if (std::all_of(taken.begin(), taken.end(), [&](Vec2 q) { return distance(p, q) >= b.min_distance; }))
            return p;
    }
    throw GenerationError("could not place an object respecting the minimum distance");
}

} // namespace

Scenario gen_triplet_scenario(const NoiseConfig& noise, int views, Rng& rng, const WorldBounds& bounds)
{
    if (views < 1)
        throw ArgumentError("a scenario needs at least one view");
    Scenario s;
    s.noise = noise;
    std::vector<Vec2> taken;
    for (int id = 0; id < 3; ++id) {
        Vec2 p = draw_point(bounds, taken, rng);
        taken.push_back(p);
        s.landmarks[id] = p;
    }
    for (int v = 0; v < views; ++v) {
        Vec2 p = draw_point(bounds, taken, rng);
        taken.push_back(p);
        s.trajectory.push_back({p.x, p.y, wrap_angle(uniform(rng, -kPi, kPi))});
    }
    const std::array<Vec2, 3> lm{s.landmarks[0], s.landmarks[1], s.landmarks[2]};
    for (int v = 0; v < views; ++v) {
        s.observations.push_back(sample_observation(s.trajectory[std::size_t(v)], lm, {0, 1, 2}, v, noise, rng));
        if (v > 0)
            s.actions.push_back(sample_action(s.trajectory[std::size_t(v - 1)], s.trajectory[std::size_t(v)], v - 1, v,
                                              noise, rng));
    }
    return s;
}

std::vector<NoiseConfig> default_noise_grid()
{
    std::vector<NoiseConfig> g;
    for (int v = 0; v <= 10; v += 2)
        for (int w = 0; w <= 20; w += 4)
            g.push_back({deg2rad(v), deg2rad(w)});
    return g;
}

std::vector<Scenario> gen_experiment_grid(const std::vector<NoiseConfig>& grid, std::size_t scenarios_per_cell,
                                          int views, std::uint64_t seed, const WorldBounds& bounds)
{
    std::vector<Scenario> out;
    out.reserve(grid.size() * scenarios_per_cell);
    std::size_t k = 0;
    for (std::size_t c = 0; c < grid.size(); ++c)
        for (std::size_t i = 0; i < scenarios_per_cell; ++i, ++k) {
            Rng rng = stream_rng(seed, k);
            Scenario s = gen_triplet_scenario(grid[c], views, rng, bounds);
            s.id = "s" + std::to_string(k);
            s.seed = seed;
            out.push_back(std::move(s));
        }
    return out;
}

GraphScenario gen_graph_scenario(const GraphScenarioConfig& config, Rng& rng, const WorldBounds& bounds)
{
    const int n = config.landmarks;
    if (n < 4)
        throw ArgumentError("composition needs at least four landmarks");
    if (config.candidates < 1)
        throw ArgumentError("at least one candidate graph is needed");
    if (!(config.coverage_rate >= 0.0 && config.coverage_rate <= 1.0))
        throw ArgumentError("coverage rate must lie in [0, 1]");
    const std::size_t available = std::size_t(n) * std::size_t(n - 1) * std::size_t(n - 2) * std::size_t(n - 3);
    if (config.factors > available)
        throw GenerationError("more composition factors requested than landmark quadruples exist");
    if (config.views < 1)
        throw ArgumentError("seen triplets need at least one view");

    GraphScenario out;
    out.coverage_rate = config.coverage_rate;
    out.scenario.noise = config.noise;
    std::vector<Vec2> taken;
    for (int id = 0; id < n; ++id) {
        Vec2 p = draw_point(bounds, taken, rng);
        taken.push_back(p);
        out.scenario.landmarks[id] = p;
    }

    std::uniform_int_distribution<int> pick(0, n - 1);
    bool have = false;
    for (std::size_t c = 0; c < config.candidates; ++c) {
        // distinct ordered quadruples (A, B, C, D) -> factor over AB:C, BC:D, AB:D
        std::set<std::array<int, 4>> quads;
        while (quads.size() < config.factors) {
            std::array<int, 4> q{pick(rng), pick(rng), pick(rng), pick(rng)};
            std::set<int> distinct(q.begin(), q.end());
            if (distinct.size() == 4)
                quads.insert(q);
        }
        std::vector<std::array<int, 4>> order(quads.begin(), quads.end());
        std::shuffle(order.begin(), order.end(), rng);

        std::vector<TripletId> triplets;
        std::vector<std::array<TripletId, 3>> factor_triplets;
        for (const auto& q : order) {
            std::array<TripletId, 3> f{TripletId{q[0], q[1], q[2]}, TripletId{q[1], q[2], q[3]}, TripletId{q[0], q[1], q[3]}};
            for (const TripletId& t : f)
                if (std::find(triplets.begin(), triplets.end(), t) == triplets.end())
                    triplets.push_back(t);
            factor_triplets.push_back(f);
        }
        const std::size_t n_seen = std::size_t(std::lround(double(triplets.size()) * config.coverage_rate));
        std::vector<std::size_t> idx(triplets.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<char> seen(triplets.size(), 0);
        for (std::size_t i = 0; i < n_seen; ++i)
            seen[idx[i]] = 1;

        QualitativeFactorGraph g;
        std::map<TripletId, int> ids;
        for (std::size_t i = 0; i < triplets.size(); ++i)
            ids[triplets[i]] = g.add_variable(triplets[i], seen[i] ? std::optional<StateVector>(StateVector::uniform(g.states()))
                                                                 : std::nullopt);
        for (const auto& f : factor_triplets)
            g.add_factor({ids[f[0]], ids[f[1]], ids[f[2]]});
        topology_score(g, 0.5, true);
        double score = connectivity_score(g);
        if (!have || score > out.connectivity) {
            out.graph = std::move(g);
            out.connectivity = score;
            have = true;
        }
    }

    // each seen triplet gets its own short trajectory
    Scenario& s = out.scenario;
    for (const VariableNode& v : out.graph.variables()) {
        if (!v.seen)
            continue;
        const std::array<Vec2, 3> lm{s.landmarks[v.triplet.a], s.landmarks[v.triplet.b], s.landmarks[v.triplet.c]};
        const int first = int(s.trajectory.size());
        for (int k = 0; k < config.views; ++k) {
            Vec2 p = draw_point(bounds, taken, rng);
            taken.push_back(p);
            s.trajectory.push_back({p.x, p.y, wrap_angle(uniform(rng, -kPi, kPi))});
        }
        for (int k = 0; k < config.views; ++k) {
            const int t = first + k;
            s.observations.push_back(sample_observation(s.trajectory[std::size_t(t)], lm, v.triplet, t, config.noise, rng));
            if (k > 0)
                s.actions.push_back(sample_action(s.trajectory[std::size_t(t - 1)], s.trajectory[std::size_t(t)], t - 1, t,
                                                  config.noise, rng));
        }
    }
    return out;
}

} // namespace qslam
