#pragma once

#include "qslam/vec2.hpp"

#include <span>
#include <vector>

namespace qslam {

/// Camera pose; alpha is the heading, and a body-frame bearing phi points along alpha + phi.
struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double alpha = 0.0;

    Vec2 position() const { return {x, y}; }
};

inline constexpr Vec2 kLandmarkA{0.0, 0.0};
inline constexpr Vec2 kLandmarkB{0.0, 1.0};

/// Circle through A and B holding every camera that sees AB under a fixed signed angle.
/// Only the arc on one side of the AB line is consistent with the bearing order.
struct LocusCircle {
    Vec2 center;
    double radius = 0.0;
    int side = 1;                     // +1: valid arc has x > 0, -1: x < 0
    double bearing_difference = 0.0;  // wrap(phi_B - phi_A)

    bool on_valid_arc(Vec2 p, double tol = 1e-9) const;
    /// Arc length parameter in (0, 1), running from A to B on the valid side (side > 0)
    /// or from B to A (side < 0).
    Vec2 point_at(double t) const;
    double parameter_of(Vec2 p) const;

private:
    double start_angle() const;
    double span() const;
};

/// Throws DegenerateGeometry when the bearings leave the camera on the AB line.
LocusCircle locus_from_bearings(double phi_a, double phi_b);

/// Heading that makes the global bearing to A equal alpha + phi_a.
double orientation_on_circle(Vec2 p, double phi_a);

/// Centroid of forward pairwise intersections of the lines of sight alpha + bearing.
/// Throws NoIntersection when no pair meets in front of both cameras.
Vec2 triangulate(std::span<const Pose2> poses, std::span<const double> bearings);

/// Intersections of the line origin + t*dir with a circle, sorted by t (0, 1 or 2 points).
struct LinePoint {
    double t;
    Vec2 p;
};
std::vector<LinePoint> line_circle_intersections(Vec2 origin, Vec2 dir, Vec2 center, double radius);

/// Points reached by moving forward from `origin` along global heading psi that lie on the
/// valid arc of `circle`, nearest first.
std::vector<Vec2> intersect_motion_ray(const Pose2& origin, double psi, const LocusCircle& circle);
std::vector<Vec2> intersect_motion_ray(Vec2 origin, double psi, const LocusCircle& circle);

} // namespace qslam

namespace qslam {

/// Similarity from the frame spanned by two landmarks to the enclosing coordinates:
/// (0,0) maps to `origin`, (0,1) maps to `origin + ey`.
struct FrameMap {
    Vec2 origin;
    Vec2 ex; // image of the frame's unit x vector
    Vec2 ey; // image of the frame's unit y vector

    static FrameMap spanning(Vec2 origin, Vec2 target);

    Vec2 operator()(Vec2 q) const { return origin + q.x * ex + q.y * ey; }
    Vec2 inverse(Vec2 p) const;
    double scale() const { return norm(ey); }
    /// Enclosing-frame heading of the frame's +x axis.
    double rotation() const;
    /// Pose given in the enclosing coordinates, expressed in the frame.
    Pose2 inverse(const Pose2& p) const;
    /// Heading given in the enclosing coordinates, expressed in the frame.
    double inverse_heading(double psi) const;
};

} // namespace qslam
