#pragma once

#include "qslam/vec2.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace qslam {

using Polygon = std::vector<Vec2>;

/// Closed half-plane a*x + b*y + c >= 0 with (a, b) of unit length.
struct HalfPlane {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double signed_distance(Vec2 p) const { return a * p.x + b * p.y + c; }
    bool contains(Vec2 p, double eps = 1e-12) const { return signed_distance(p) >= -eps; }
};

/// Half-plane to the left of the directed line through origin along dir.
HalfPlane left_of(Vec2 origin, Vec2 dir);

struct Box {
    double xmin = 0.0;
    double xmax = 0.0;
    double ymin = 0.0;
    double ymax = 0.0;

    double area() const { return (xmax - xmin) * (ymax - ymin); }
    bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
    bool overlaps(const Box& o) const
    {
        return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
    }
    Polygon polygon() const { return {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}}; }
    bool operator==(const Box&) const = default;
    std::array<HalfPlane, 4> half_planes() const;
};

Box bounding_box(std::span<const Vec2> poly);

double signed_area(std::span<const Vec2> poly);
inline double area(std::span<const Vec2> poly)
{
    double a = signed_area(poly);
    return a < 0 ? -a : a;
}
Vec2 centroid(std::span<const Vec2> poly);

/// Sutherland-Hodgman step: keeps the part of a convex polygon inside h.
/// `scratch` is reused storage; the result is written back into `poly`.
void clip(Polygon& poly, const HalfPlane& h, Polygon& scratch);
Polygon clip(Polygon poly, std::span<const HalfPlane> planes);

/// Convex, possibly unbounded polygon. The vertex chain runs counter-clockwise;
/// when rays are present the boundary arrives from infinity along -rays[0]
/// into vertices.front() and leaves vertices.back() along rays[1].
class ConvexPiece {
public:
    ConvexPiece(std::vector<Vec2> vertices, std::optional<std::array<Vec2, 2>> rays);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::optional<std::array<Vec2, 2>>& rays() const { return rays_; }
    bool bounded() const { return !rays_.has_value(); }
    const std::vector<HalfPlane>& bounds() const { return bounds_; }

    bool contains(Vec2 p, double eps = 1e-12) const;
    /// Largest violation over the bounding half-planes; <= 0 inside.
    double violation(Vec2 p) const;
    Polygon clipped(const Box& box) const;

private:
    std::vector<Vec2> vertices_;
    std::optional<std::array<Vec2, 2>> rays_;
    std::vector<HalfPlane> bounds_;
};

} // namespace qslam
