#pragma once

#include "qslam/models.hpp"
#include "qslam/partition.hpp"
#include "qslam/qfactor_graph.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qslam {

struct WorldBounds {
    double xmin = -3.0;
    double xmax = 3.0;
    double ymin = -3.0;
    double ymax = 4.0;
    double min_distance = 0.01;
};

/// Ground truth and measurements in world coordinates. Angles are radians in memory,
/// degrees in files.
struct Scenario {
    std::string id;
    std::map<int, Vec2> landmarks;
    std::vector<Pose2> trajectory;
    std::vector<Observation> observations;
    std::vector<Action> actions;
    NoiseConfig noise;
    std::uint64_t seed = 0;
};

/// One triplet seen from a trajectory, re-expressed in the triplet's AB frame.
struct TripletFrameData {
    TripletId triplet;
    std::vector<Observation> observations;
    std::vector<Action> actions;
    Vec2 landmark_c;              // ground truth
    std::vector<Pose2> poses;     // ground truth, one per observation, time order
    FrameMap frame;               // AB frame -> world
};

std::vector<TripletId> observed_triplets(const Scenario& s);
TripletFrameData to_triplet_frame(const Scenario& s, TripletId id);

/// Ground-truth states of the landmark and of each observing pose.
struct TripletTruth {
    std::size_t landmark_state = 0;
    std::vector<std::size_t> camera_states;
};
TripletTruth triplet_truth(const TripletFrameData& data, const SpacePartition& partition);

/// Landmarks 0, 1, 2 form the triplet; `views` random poses each observe all three.
Scenario gen_triplet_scenario(const NoiseConfig& noise, int views, Rng& rng, const WorldBounds& bounds = {});

/// 6 x 6 grid: sigma_v in {0, 2, ..., 10} deg, sigma_w in {0, 4, ..., 20} deg.
std::vector<NoiseConfig> default_noise_grid();

/// Scenario k is drawn from its own stream of `seed`, so any subset can be regenerated alone.
std::vector<Scenario> gen_experiment_grid(const std::vector<NoiseConfig>& grid, std::size_t scenarios_per_cell,
                                          int views, std::uint64_t seed, const WorldBounds& bounds = {});

/// A random factor graph over one landmark layout. Seen variables carry uniform placeholder
/// estimates until a solver fills them from the scenario's observations.
struct GraphScenario {
    Scenario scenario;
    QualitativeFactorGraph graph;
    double coverage_rate = 0.5;
    double connectivity = 0.0;
};

struct GraphScenarioConfig {
    int landmarks = 6;
    std::size_t factors = 12;
    double coverage_rate = 0.5;
    std::size_t candidates = 20; // random graphs drawn; the best connectivity score wins
    int views = 3;
    NoiseConfig noise;
};

GraphScenario gen_graph_scenario(const GraphScenarioConfig& config, Rng& rng, const WorldBounds& bounds = {});

} // namespace qslam
