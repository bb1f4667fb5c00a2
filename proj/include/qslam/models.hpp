#pragma once

#include "qslam/geometry.hpp"
#include "qslam/rng.hpp"

#include <array>

namespace qslam {

/// Noise standard deviations in radians.
struct NoiseConfig {
    double sigma_v = 0.0; // bearing measurements
    double sigma_w = 0.0; // motion heading
};

struct TripletId {
    int a = 0;
    int b = 0;
    int c = 0;
    friend auto operator<=>(const TripletId&, const TripletId&) = default;
};

/// Body-frame bearings to the three landmarks of a triplet from one pose.
struct Observation {
    int time_index = 0;
    TripletId triplet;
    std::array<double, 3> bearings{}; // A, B, C
};

/// Global heading of the move from pose `from_index` to pose `time_index`.
struct Action {
    int time_index = 0;
    int from_index = 0;
    double psi = 0.0;
};

/// Body-frame bearing of a landmark seen from a pose.
double bearing_to(Vec2 landmark, const Pose2& pose);

/// Log density of a zero-mean Gaussian at the wrapped residual. sigma == 0 is a point mass:
/// 0 for a (numerically) zero residual and -inf otherwise.
double wrapped_gaussian_loglik(double residual, double sigma);

double bearing_loglik(double phi, Vec2 landmark, const Pose2& pose, double sigma_v);
double motion_loglik(const Pose2& prev, const Pose2& next, double psi, double sigma_w);

Observation sample_observation(const Pose2& pose, const std::array<Vec2, 3>& landmarks, TripletId id,
                               int time_index, const NoiseConfig& noise, Rng& rng);
Action sample_action(const Pose2& prev, const Pose2& next, int from_index, int time_index,
                     const NoiseConfig& noise, Rng& rng);

} // namespace qslam
