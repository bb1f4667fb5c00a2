#include "qslam/partition.hpp"

#include "qslam/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef QSLAM_DATA_DIR
#define QSLAM_DATA_DIR "data"
#endif

namespace qslam {
namespace {

Vec2 read_point(const nlohmann::json& j)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError("expected [x, y] pair in partition file");
    return {j[0].get<double>(), j[1].get<double>()};
}

ConvexPiece read_piece(const nlohmann::json& j)
{
    std::vector<Vec2> verts;
    for (const auto& v : j.at("vertices"))
        verts.push_back(read_point(v));
    std::optional<std::array<Vec2, 2>> rays;
    if (j.contains("rays") && !j["rays"].empty()) {
        if (j["rays"].size() != 2)
            throw ConfigError("an unbounded piece needs exactly two rays");
        rays = std::array<Vec2, 2>{read_point(j["rays"][0]), read_point(j["rays"][1])};
    }
    return ConvexPiece(std::move(verts), rays);
}

nlohmann::json piece_json(const ConvexPiece& p)
{
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (Vec2 v : p.vertices())
        j["vertices"].push_back({v.x, v.y});
    if (p.rays())
        j["rays"] = {{(*p.rays())[0].x, (*p.rays())[0].y}, {(*p.rays())[1].x, (*p.rays())[1].y}};
    return j;
}

} // namespace

SpacePartition SpacePartition::from_json(const nlohmann::json& doc)
{
    SpacePartition sp;
    try {
        sp.name_ = doc.at("name").get<std::string>();
        const auto& b = doc.at("borders");
        sp.borders_ = {b.at("xmin").get<double>(), b.at("xmax").get<double>(), b.at("ymin").get<double>(),
                       b.at("ymax").get<double>()};
        sp.metric_borders_ = sp.borders_;
        if (doc.contains("metric_borders")) {
            const auto& m = doc["metric_borders"];
            sp.metric_borders_ = {m.at("xmin").get<double>(), m.at("xmax").get<double>(), m.at("ymin").get<double>(),
                                  m.at("ymax").get<double>()};
        }
        for (const auto& r : doc.at("regions")) {
            Region reg;
            reg.index = r.at("index").get<int>();
            reg.label = r.value("label", "");
            if (r.contains("pieces")) {
                for (const auto& p : r["pieces"])
                    reg.pieces.push_back(read_piece(p));
            } else {
                reg.pieces.push_back(read_piece(r));
            }
            sp.regions_.push_back(std::move(reg));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed partition definition: ") + e.what());
    }
    for (const Box& b : {sp.borders_, sp.metric_borders_})
        if (b.xmin >= b.xmax || b.ymin >= b.ymax)
            throw ConfigError("empty partition borders");
    std::sort(sp.regions_.begin(), sp.regions_.end(), [](const Region& a, const Region& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < sp.regions_.size(); ++i)
        if (sp.regions_[i].index != int(i) + 1)
            throw ConfigError("region indices must be 1..d without gaps");
    sp.clip_regions();
    return sp;
}

SpacePartition SpacePartition::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open partition file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), e.byte);
    }
    return from_json(doc);
}

std::filesystem::path SpacePartition::data_dir()
{
    if (const char* env = std::getenv("QSLAM_DATA_DIR"))
        return env;
    return QSLAM_DATA_DIR;
}

SpacePartition SpacePartition::bundled(const std::string& name)
{
    std::filesystem::path p(name);
    if (p.has_extension() || p.has_parent_path())
        return load(p);
    return load(data_dir() / "partitions" / (name + ".json"));
}

void SpacePartition::clip_regions()
{
    for (Region& r : regions_) {
        r.clipped.clear();
        r.clipped_areas.clear();
        double a = 0.0;
        Vec2 m;
        for (const ConvexPiece& p : r.pieces) {
            Polygon poly = p.clipped(borders_);
            double pa = area(poly);
            if (pa <= 0.0)
                continue;
            a += pa;
            m += pa * qslam::centroid(poly);
            r.clipped.push_back(std::move(poly));
            r.clipped_areas.push_back(pa);
        }
        r.area = a;
        r.centroid = a > 0.0 ? m / a : Vec2{NAN, NAN};
        double ma = 0.0;
        Vec2 mm;
        for (const ConvexPiece& p : r.pieces) {
            Polygon poly = p.clipped(metric_borders_);
            double pa = area(poly);
            if (pa <= 0.0)
                continue;
            ma += pa;
            mm += pa * qslam::centroid(poly);
        }
        r.metric_centroid = ma > 0.0 ? mm / ma : Vec2{NAN, NAN};
    }
}

std::size_t SpacePartition::classify(Vec2 p) const
{
    std::size_t best = 0;
    double best_violation = INFINITY;
    for (std::size_t s = 0; s < regions_.size(); ++s) {
        for (const ConvexPiece& piece : regions_[s].pieces) {
            double v = piece.violation(p);
            if (v <= 1e-12)
                return s;
            if (v < best_violation) {
                best_violation = v;
                best = s;
            }
        }
    }
    // numerical gap between neighbouring pieces: nearest region wins
    return best;
}

Vec2 SpacePartition::centroid(std::size_t state) const
{
    const Region& r = regions_.at(state);
    if (!(r.area > 0.0))
        throw ConfigError("region " + std::to_string(r.index) + " has no area inside the borders");
    return r.centroid;
}

Vec2 SpacePartition::metric_centroid(std::size_t state) const
{
    const Region& r = regions_.at(state);
    if (!std::isfinite(r.metric_centroid.x))
        throw ConfigError("region " + std::to_string(r.index) + " has no area inside the metric borders");
    return r.metric_centroid;
}

Vec2 SpacePartition::sample_one(std::size_t state, Rng& rng) const
{
    const Region& r = regions_.at(state);
    if (!(r.area > 0.0))
        throw ConfigError("region " + std::to_string(r.index) + " has no area inside the borders");
    for (;;) {
        double u = uniform(rng, 0.0, r.area);
        std::size_t k = 0;
        while (k + 1 < r.clipped.size() && u >= r.clipped_areas[k]) {
            u -= r.clipped_areas[k];
            ++k;
        }
        const Polygon& poly = r.clipped[k];
        // fan triangulation from vertex 0
        double tri_total = 0.0;
        for (std::size_t t = 1; t + 1 < poly.size(); ++t)
            tri_total += 0.5 * std::abs(cross(poly[t] - poly[0], poly[t + 1] - poly[0]));
        double v = uniform(rng, 0.0, tri_total);
        std::size_t t = 1;
        for (; t + 2 < poly.size(); ++t) {
            double ta = 0.5 * std::abs(cross(poly[t] - poly[0], poly[t + 1] - poly[0]));
            if (v < ta)
                break;
            v -= ta;
        }
        double r1 = std::sqrt(uniform(rng, 0.0, 1.0));
        double r2 = uniform(rng, 0.0, 1.0);
        Vec2 p = (1.0 - r1) * poly[0] + r1 * (1.0 - r2) * poly[t] + r1 * r2 * poly[t + 1];
        if (classify(p) == state)
            return p;
    }
}

std::vector<Vec2> SpacePartition::sample(std::size_t state, std::size_t count, Rng& rng) const
{
    if (count == 0)
        throw ArgumentError("sample count must be at least 1");
    std::vector<Vec2> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(sample_one(state, rng));
    return out;
}

SpacePartition SpacePartition::with_borders(const Box& borders) const
{
    SpacePartition sp = *this;
    if (metric_borders_ == borders_)
        sp.metric_borders_ = borders;
    sp.borders_ = borders;
    sp.clip_regions();
    return sp;
}

SpacePartition SpacePartition::with_metric_borders(const Box& borders) const
{
    SpacePartition sp = *this;
    sp.metric_borders_ = borders;
    sp.clip_regions();
    return sp;
}

nlohmann::json SpacePartition::to_json() const
{
    nlohmann::json doc;
    doc["name"] = name_;
    doc["borders"] = {{"xmin", borders_.xmin}, {"xmax", borders_.xmax}, {"ymin", borders_.ymin}, {"ymax", borders_.ymax}};
    if (!(metric_borders_ == borders_))
        doc["metric_borders"] = {{"xmin", metric_borders_.xmin}, {"xmax", metric_borders_.xmax},
                                 {"ymin", metric_borders_.ymin}, {"ymax", metric_borders_.ymax}};
    doc["regions"] = nlohmann::json::array();
    for (const Region& r : regions_) {
        nlohmann::json jr{{"index", r.index}, {"label", r.label}, {"pieces", nlohmann::json::array()}};
        for (const ConvexPiece& p : r.pieces)
            jr["pieces"].push_back(piece_json(p));
        doc["regions"].push_back(std::move(jr));
    }
    return doc;
}

} // namespace qslam
