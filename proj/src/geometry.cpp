#include "qslam/geometry.hpp"

#include "qslam/angles.hpp"
#include "qslam/errors.hpp"

#include <cmath>

namespace qslam {

LocusCircle locus_from_bearings(double phi_a, double phi_b)
{
    double delta = wrap_angle(phi_b - phi_a);
    double s = std::sin(delta);
    if (std::abs(s) < 1e-12)
        throw DegenerateGeometry("bearings to A and B are parallel; camera on the AB line");
    LocusCircle c;
    c.center = {-0.5 * std::cos(delta) / s, 0.5};
    c.radius = 0.5 / std::abs(s);
    c.side = delta < 0 ? 1 : -1;
    c.bearing_difference = delta;
    return c;
}

double LocusCircle::start_angle() const
{
    Vec2 from = side > 0 ? kLandmarkA : kLandmarkB;
    return std::atan2(from.y - center.y, from.x - center.x);
}

double LocusCircle::span() const
{
    double a = std::atan2(kLandmarkA.y - center.y, kLandmarkA.x - center.x);
    double b = std::atan2(kLandmarkB.y - center.y, kLandmarkB.x - center.x);
    double s = side > 0 ? b - a : a - b;
    s = std::fmod(s, kTwoPi);
    if (s <= 0.0)
        s += kTwoPi;
    return s;
}

Vec2 LocusCircle::point_at(double t) const
{
    double th = start_angle() + t * span();
    return center + radius * heading(th);
}

double LocusCircle::parameter_of(Vec2 p) const
{
    double th = std::atan2(p.y - center.y, p.x - center.x) - start_angle();
    th = std::fmod(th, kTwoPi);
    if (th < 0.0)
        th += kTwoPi;
    return th / span();
}

bool LocusCircle::on_valid_arc(Vec2 p, double tol) const
{
    return std::abs(distance(p, center) - radius) <= tol * std::max(1.0, radius) && side * p.x > 0.0;
}

double orientation_on_circle(Vec2 p, double phi_a)
{
    if (distance(p, kLandmarkA) < 1e-12 || distance(p, kLandmarkB) < 1e-12)
        throw DegenerateGeometry("camera coincides with a frame landmark");
    return wrap_angle(azimuth(p, kLandmarkA) - phi_a);
}

Vec2 triangulate(std::span<const Pose2> poses, std::span<const double> bearings)
{
    if (poses.size() != bearings.size() || poses.size() < 2)
        throw NoIntersection("triangulation needs at least two views");
    Vec2 sum;
    std::size_t n = 0;
    for (std::size_t i = 0; i < poses.size(); ++i) {
        Vec2 pi = poses[i].position();
        Vec2 di = heading(poses[i].alpha + bearings[i]);
        for (std::size_t j = i + 1; j < poses.size(); ++j) {
            Vec2 pj = poses[j].position();
            Vec2 dj = heading(poses[j].alpha + bearings[j]);
            double den = cross(di, dj);
            if (std::abs(den) < 1e-12)
                continue;
            Vec2 w = pj - pi;
            double t1 = cross(w, dj) / den;
            double t2 = cross(w, di) / den;
            if (t1 <= 0.0 || t2 <= 0.0)
                continue;
            sum += pi + t1 * di;
            ++n;
        }
    }
    if (n == 0)
        throw NoIntersection("no pair of lines of sight meets in front of both cameras");
    return sum / double(n);
}

std::vector<LinePoint> line_circle_intersections(Vec2 origin, Vec2 dir, Vec2 center, double radius)
{
    std::vector<LinePoint> out;
    double dd = dot(dir, dir);
    if (dd == 0.0)
        return out;
    Vec2 f = origin - center;
    double b = dot(f, dir) / dd;
    double c = (dot(f, f) - radius * radius) / dd;
    double disc = b * b - c;
    double scale = radius * radius / dd;
    if (disc < -1e-14 * scale)
        return out;
    if (disc <= 1e-14 * scale) {
        out.push_back({-b, origin + (-b) * dir});
        return out;
    }
    double r = std::sqrt(disc);
    // numerically stable pair of roots
    double q = b > 0 ? -b - r : -b + r;
    double t1 = q, t2 = q != 0.0 ? c / q : -b - r;
    if (t1 > t2)
        std::swap(t1, t2);
    for (double t : {t1, t2}) {
        Vec2 p = origin + t * dir;
        // one Newton step back onto the circle along the radius
        Vec2 rp = p - center;
        double len = norm(rp);
        if (len > 0.0)
            p = center + (radius / len) * rp;
        out.push_back({t, p});
    }
    return out;
}

std::vector<Vec2> intersect_motion_ray(Vec2 origin, double psi, const LocusCircle& circle)
{
    std::vector<Vec2> out;
    for (const LinePoint& lp : line_circle_intersections(origin, heading(psi), circle.center, circle.radius))
        if (lp.t > 1e-12 && circle.side * lp.p.x > 0.0)
            out.push_back(lp.p);
    return out;
}

std::vector<Vec2> intersect_motion_ray(const Pose2& origin, double psi, const LocusCircle& circle)
{
    return intersect_motion_ray(origin.position(), psi, circle);
}

} // namespace qslam

namespace qslam {

FrameMap FrameMap::spanning(Vec2 origin, Vec2 target)
{
    Vec2 ey = target - origin;
    if (norm(ey) == 0.0)
        throw DegenerateGeometry("frame landmarks coincide");
    return {origin, {ey.y, -ey.x}, ey};
}

Vec2 FrameMap::inverse(Vec2 p) const
{
    Vec2 r = p - origin;
    double s2 = dot(ey, ey);
    return {dot(r, ex) / s2, dot(r, ey) / s2};
}

double FrameMap::rotation() const { return std::atan2(ex.y, ex.x); }

double FrameMap::inverse_heading(double psi) const { return wrap_angle(psi - rotation()); }

Pose2 FrameMap::inverse(const Pose2& p) const
{
    Vec2 q = inverse(p.position());
    return {q.x, q.y, inverse_heading(p.alpha)};
}

} // namespace qslam
