#pragma once

#include "qslam/angles.hpp"
#include "qslam/models.hpp"
#include "qslam/partition.hpp"
#include "qslam/state_vector.hpp"

#include <span>
#include <string>
#include <vector>

namespace qslam {

enum class SolverVariant { full, fast, baseline };

std::string to_string(SolverVariant v);
SolverVariant solver_variant_from_string(const std::string& s);

struct SolverParams {
    std::size_t pose_samples = 200;       // per view
    std::size_t match_circles = 128;      // view samples each hypothesis is matched against
    double gate_sigmas = 2.0;             // heading spread explored around the measured azimuth
    double circle_spread = 0.25;          // bearing perturbation for circle samples, in units of sigma_v
    double prune_ratio = 1e-3;            // relative to the heaviest live hypothesis
    std::size_t max_hypotheses = 5000;
    std::size_t baseline_candidates = 100; // landmark candidates per view
    std::size_t exact_grid = 2000;        // arc resolution of the noise-free root search
    /// Stand-in deviation when a noise level is exactly zero but a density is still needed.
    double sigma_floor = deg2rad(0.05);
};

/// One camera pose per view and the landmark triangulated from them. Weights are logs.
struct TrajectoryHypothesis {
    std::vector<Pose2> poses;
    Vec2 landmark_c;
    std::vector<double> motion_logw;    // entry i: move into view i; entry 0 is 0
    std::vector<double> resection_logw; // entry i: bearing to C from view i

    double log_weight() const;
};

struct TripletPosterior {
    StateVector landmark_state;
    std::vector<StateVector> camera_states; // one per view, in time order
    std::size_t hypothesis_count = 0;
    std::vector<std::size_t> live_hypotheses; // after each view
    SolverVariant variant = SolverVariant::full;
    bool degraded = false;                    // nothing survived; states are uniform
};

/// Views of one triplet in time order and the headings between them, AB frame.
struct TripletTrack {
    std::vector<Observation> views;
    std::vector<double> headings; // headings[i] moves from view i-1 to view i; headings[0] unused
};

/// Orders the observations and pairs each gap with its action. Throws ArgumentError on gaps
/// when `need_actions` is set.
TripletTrack make_track(std::span<const Observation> observations, std::span<const Action> actions,
                        bool need_actions);

TripletPosterior solve_full(std::span<const Observation> observations, std::span<const Action> actions,
                            const NoiseConfig& noise, const SpacePartition& partition,
                            const SolverParams& params, Rng& rng);
TripletPosterior solve_fast(std::span<const Observation> observations, std::span<const Action> actions,
                            const NoiseConfig& noise, const SpacePartition& partition,
                            const SolverParams& params, Rng& rng);
TripletPosterior solve_baseline(std::span<const Observation> observations, const NoiseConfig& noise,
                                const SpacePartition& partition, const SolverParams& params, Rng& rng);

TripletPosterior solve(SolverVariant variant, std::span<const Observation> observations,
                       std::span<const Action> actions, const NoiseConfig& noise,
                       const SpacePartition& partition, const SolverParams& params, Rng& rng);

/// Hypotheses behind a full or fast solve, for inspection and tests.
std::vector<TrajectoryHypothesis> trajectory_hypotheses(SolverVariant variant, const TripletTrack& track,
                                                        const NoiseConfig& noise, const SpacePartition& partition,
                                                        const SolverParams& params, Rng& rng,
                                                        std::vector<std::size_t>* live = nullptr);

} // namespace qslam
