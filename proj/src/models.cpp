#include "qslam/models.hpp"

#include "qslam/angles.hpp"
#include "qslam/errors.hpp"

#include <cmath>
#include <limits>

namespace qslam {

namespace {
constexpr double kPointMassTolerance = 1e-9;
}

double bearing_to(Vec2 landmark, const Pose2& pose)
{
    if (distance(landmark, pose.position()) == 0.0)
        throw DegenerateGeometry("camera coincides with the observed landmark");
    return wrap_angle(azimuth(pose.position(), landmark) - pose.alpha);
}

double wrapped_gaussian_loglik(double residual, double sigma)
{
    double r = wrap_angle(residual);
    if (sigma == 0.0)
        return std::abs(r) < kPointMassTolerance ? 0.0 : -std::numeric_limits<double>::infinity();
    return -0.5 * (r * r) / (sigma * sigma) - std::log(std::sqrt(kTwoPi) * sigma);
}

double bearing_loglik(double phi, Vec2 landmark, const Pose2& pose, double sigma_v)
{
    return wrapped_gaussian_loglik(phi - bearing_to(landmark, pose), sigma_v);
}

double motion_loglik(const Pose2& prev, const Pose2& next, double psi, double sigma_w)
{
    if (distance(prev.position(), next.position()) == 0.0)
        throw DegenerateGeometry("consecutive poses coincide");
    return wrapped_gaussian_loglik(psi - azimuth(prev.position(), next.position()), sigma_w);
}

Observation sample_observation(const Pose2& pose, const std::array<Vec2, 3>& landmarks, TripletId id,
                               int time_index, const NoiseConfig& noise, Rng& rng)
{
    Observation o;
    o.time_index = time_index;
    o.triplet = id;
    for (std::size_t i = 0; i < 3; ++i)
        o.bearings[i] = wrap_angle(bearing_to(landmarks[i], pose) + gaussian(rng, noise.sigma_v));
    return o;
}

Action sample_action(const Pose2& prev, const Pose2& next, int from_index, int time_index,
                     const NoiseConfig& noise, Rng& rng)
{
    if (distance(prev.position(), next.position()) == 0.0)
        throw DegenerateGeometry("consecutive poses coincide");
    return {time_index, from_index, wrap_angle(azimuth(prev.position(), next.position()) + gaussian(rng, noise.sigma_w))};
}

} // namespace qslam
