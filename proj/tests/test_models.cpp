#include "qslam/angles.hpp"
#include "qslam/errors.hpp"
#include "qslam/models.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace qslam;

namespace {

double gauss_log(double r, double s) { return -0.5 * (r / s) * (r / s) - std::log(s) - 0.5 * std::log(2.0 * kPi); }

} // namespace

TEST_CASE("bearing log-likelihood at the mode")
{
    const double s = deg2rad(2.0);
    const Pose2 pose{1.0, 0.5, 0.3};
    const Vec2 lm{-0.4, 2.0};
    CHECK(bearing_loglik(bearing_to(lm, pose), lm, pose, s) ==
          doctest::Approx(std::log(1.0 / (std::sqrt(2.0 * kPi) * s))).epsilon(1e-12));
}

TEST_CASE("wrapped residuals")
{
    const double s = deg2rad(3.0), eps = 0.01;
    CHECK(wrapped_gaussian_loglik(kTwoPi - eps, s) == doctest::Approx(wrapped_gaussian_loglik(-eps, s)).epsilon(1e-12));
    CHECK(wrapped_gaussian_loglik(-eps, s) == doctest::Approx(wrapped_gaussian_loglik(eps, s)).epsilon(1e-12));
    const Pose2 pose{1.0, 0.5, 0.3};
    const Vec2 lm{-0.4, 2.0};
    const double phi = bearing_to(lm, pose) + 0.02;
    CHECK(bearing_loglik(phi + kTwoPi, lm, pose, s) == doctest::Approx(bearing_loglik(phi, lm, pose, s)).epsilon(1e-12));
    Pose2 turned = pose;
    turned.alpha += kTwoPi;
    CHECK(bearing_loglik(phi, lm, turned, s) == doctest::Approx(bearing_loglik(phi, lm, pose, s)).epsilon(1e-12));
}

TEST_CASE("closed-form Gaussian values")
{
    CHECK(std::abs(wrapped_gaussian_loglik(deg2rad(1.0), deg2rad(2.0)) - gauss_log(deg2rad(1.0), deg2rad(2.0))) < 1e-12);
    Rng rng(31);
    for (int n = 0; n < 100; ++n) {
        const Pose2 a{uniform(rng, -3, 3), uniform(rng, -3, 4), 0.0}, b{uniform(rng, -3, 3), uniform(rng, -3, 4), 0.0};
        const double psi = uniform(rng, -kPi, kPi), s = uniform(rng, 0.01, 0.4);
        const double r = wrap_angle(psi - std::atan2(b.y - a.y, b.x - a.x));
        CHECK(motion_loglik(a, b, psi, s) == doctest::Approx(gauss_log(r, s)).epsilon(1e-12));
    }
}

TEST_CASE("zero deviation is a point mass")
{
    CHECK(wrapped_gaussian_loglik(0.0, 0.0) == 0.0);
    CHECK(wrapped_gaussian_loglik(1e-3, 0.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("motion likelihood ignores orientation")
{
    const Pose2 a{0.0, 0.0, 0.0}, b{1.0, 1.0, 0.0};
    const double s = deg2rad(5.0);
    CHECK(motion_loglik(a, b, kPi / 4, s) == doctest::Approx(gauss_log(0.0, s)).epsilon(1e-12));
    const Pose2 a2{0.0, 0.0, 2.0}, b2{1.0, 1.0, -1.0};
    CHECK(motion_loglik(a2, b2, 0.3, s) == motion_loglik(a, b, 0.3, s));
    CHECK_THROWS_AS(motion_loglik(a, a, 0.3, s), DegenerateGeometry);
}

TEST_CASE("bearing density integrates to one")
{
    for (double deg : {0.5, 2.0, 5.0, 10.0}) {
        const double s = deg2rad(deg);
        const int n = 200000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = -kPi + (i + 0.5) * kTwoPi / n;
            sum += std::exp(wrapped_gaussian_loglik(r, s));
        }
        CHECK(std::abs(sum * kTwoPi / n - 1.0) < 1e-6);
    }
}

TEST_CASE("noise-free sampling reproduces the truth")
{
    Rng rng(32);
    const Pose2 p0{0.3, -1.0, 0.5}, p1{1.2, 0.4, -2.0};
    const std::array<Vec2, 3> lms{kLandmarkA, kLandmarkB, Vec2{0.8, 0.9}};
    const Observation o = sample_observation(p0, lms, {0, 1, 2}, 4, NoiseConfig{}, rng);
    CHECK(o.time_index == 4);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(o.bearings[k] == bearing_to(lms[k], p0));
    const Action a = sample_action(p0, p1, 0, 1, NoiseConfig{}, rng);
    CHECK(a.psi == doctest::Approx(azimuth(p0.position(), p1.position())).epsilon(1e-15));
    CHECK(a.from_index == 0);
    CHECK(a.time_index == 1);
}

TEST_CASE("sampled noise has the configured spread")
{
    Rng rng(33);
    const NoiseConfig noise{deg2rad(4.0), deg2rad(7.0)};
    const Pose2 p0{0.3, -1.0, 0.5}, p1{1.2, 0.4, -2.0};
    const std::array<Vec2, 3> lms{kLandmarkA, kLandmarkB, Vec2{0.8, 0.9}};
    const int n = 100000;
    double sv = 0.0, sw = 0.0, ll_true = 0.0, ll_shift = 0.0;
    for (int i = 0; i < n; ++i) {
        const Observation o = sample_observation(p0, lms, {0, 1, 2}, 0, noise, rng);
        const double r = wrap_angle(o.bearings[2] - bearing_to(lms[2], p0));
        sv += r * r;
        ll_true += bearing_loglik(o.bearings[2], lms[2], p0, noise.sigma_v);
        ll_shift += bearing_loglik(o.bearings[2] + 5.0 * noise.sigma_v, lms[2], p0, noise.sigma_v);
        const Action a = sample_action(p0, p1, 0, 1, noise, rng);
        const double q = wrap_angle(a.psi - azimuth(p0.position(), p1.position()));
        sw += q * q;
    }
    CHECK(std::sqrt(sv / n) == doctest::Approx(noise.sigma_v).epsilon(0.02));
    CHECK(std::sqrt(sw / n) == doctest::Approx(noise.sigma_w).epsilon(0.02));
    CHECK(ll_true > ll_shift);
}
