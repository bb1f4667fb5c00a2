#include "qslam/polygon.hpp"

#include "qslam/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qslam {

HalfPlane left_of(Vec2 origin, Vec2 dir)
{
    double len = norm(dir);
    if (len == 0.0)
        throw DegenerateGeometry("half-plane with zero direction");
    Vec2 d = dir / len;
    // cross(d, p - origin) >= 0
    return {-d.y, d.x, d.y * origin.x - d.x * origin.y};
}

std::array<HalfPlane, 4> Box::half_planes() const
{
    return {HalfPlane{1, 0, -xmin}, HalfPlane{-1, 0, xmax}, HalfPlane{0, 1, -ymin}, HalfPlane{0, -1, ymax}};
}

Box bounding_box(std::span<const Vec2> poly)
{
    Box b{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (Vec2 p : poly) {
        b.xmin = std::min(b.xmin, p.x);
        b.xmax = std::max(b.xmax, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.ymax = std::max(b.ymax, p.y);
    }
    return b;
}

double signed_area(std::span<const Vec2> poly)
{
    if (poly.size() < 3)
        return 0.0;
    double s = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i)
        s += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * s;
}

Vec2 centroid(std::span<const Vec2> poly)
{
    double a = 0.0;
    Vec2 c;
    // shift to the first vertex for conditioning
    Vec2 o = poly.empty() ? Vec2{} : poly[0];
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        Vec2 p = poly[i] - o, q = poly[(i + 1) % n] - o;
        double w = cross(p, q);
        a += w;
        c += w * (p + q);
    }
    if (a == 0.0)
        throw DegenerateGeometry("centroid of a polygon with zero area");
    return o + c / (3.0 * a);
}

void clip(Polygon& poly, const HalfPlane& h, Polygon& scratch)
{
    scratch.clear();
    const std::size_t n = poly.size();
    if (n == 0)
        return;
    Vec2 prev = poly[n - 1];
    double dp = h.signed_distance(prev);
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 cur = poly[i];
        double dc = h.signed_distance(cur);
        if (dc >= 0.0) {
            if (dp < 0.0)
                scratch.push_back(prev + (dp / (dp - dc)) * (cur - prev));
            scratch.push_back(cur);
        } else if (dp >= 0.0) {
            scratch.push_back(prev + (dp / (dp - dc)) * (cur - prev));
        }
        prev = cur;
        dp = dc;
    }
    poly.swap(scratch);
}

Polygon clip(Polygon poly, std::span<const HalfPlane> planes)
{
    Polygon scratch;
    for (const HalfPlane& h : planes) {
        clip(poly, h, scratch);
        if (poly.size() < 3) {
            poly.clear();
            break;
        }
    }
    return poly;
}

ConvexPiece::ConvexPiece(std::vector<Vec2> vertices, std::optional<std::array<Vec2, 2>> rays)
    : vertices_(std::move(vertices)), rays_(rays)
{
    if (vertices_.empty())
        throw ConfigError("region piece without vertices");
    if (rays_) {
        bounds_.push_back(left_of(vertices_.front(), -(*rays_)[0]));
        for (std::size_t i = 0; i + 1 < vertices_.size(); ++i)
            bounds_.push_back(left_of(vertices_[i], vertices_[i + 1] - vertices_[i]));
        bounds_.push_back(left_of(vertices_.back(), (*rays_)[1]));
    } else {
        if (vertices_.size() < 3)
            throw ConfigError("bounded region piece needs at least three vertices");
        for (std::size_t i = 0, n = vertices_.size(); i < n; ++i)
            bounds_.push_back(left_of(vertices_[i], vertices_[(i + 1) % n] - vertices_[i]));
    }
    // every vertex must lie inside every bounding half-plane for the chain to be convex and ccw
    for (const HalfPlane& h : bounds_)
        for (Vec2 v : vertices_)
            if (h.signed_distance(v) < -1e-9)
                throw ConfigError("region piece is not convex or not counter-clockwise");
}

bool ConvexPiece::contains(Vec2 p, double eps) const
{
    return std::all_of(bounds_.begin(), bounds_.end(), [&](const HalfPlane& h) { return h.contains(p, eps); });
}

double ConvexPiece::violation(Vec2 p) const
{
    double worst = -INFINITY;
    for (const HalfPlane& h : bounds_)
        worst = std::max(worst, -h.signed_distance(p));
    return worst;
}

Polygon ConvexPiece::clipped(const Box& box) const
{
    Polygon poly = clip(box.polygon(), bounds_);
    return poly;
}

} // namespace qslam
