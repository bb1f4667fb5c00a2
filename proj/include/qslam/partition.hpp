#pragma once

#include "qslam/polygon.hpp"
#include "qslam/rng.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace qslam {

struct Region {
    int index = 0; // 1-based, as in the partition file
    std::string label;
    std::vector<ConvexPiece> pieces;
    std::vector<Polygon> clipped; // one per piece, empty polygons dropped
    std::vector<double> clipped_areas;
    double area = 0.0;
    Vec2 centroid;
    Vec2 metric_centroid; // centroid of the region clipped to the metric borders
};

/// Planar partition of the AB frame (A at the origin, B at (0, 1)).
class SpacePartition {
public:
    static SpacePartition from_json(const nlohmann::json& doc);
    static SpacePartition load(const std::filesystem::path& path);
    /// Loads a partition shipped in the data directory, e.g. "edc" or "double_cross".
    static SpacePartition bundled(const std::string& name);
    static std::filesystem::path data_dir();

    const std::string& name() const { return name_; }
    std::size_t size() const { return regions_.size(); }
    const Region& region(std::size_t state) const { return regions_.at(state); }
    const std::vector<Region>& regions() const { return regions_; }
    const Box& borders() const { return borders_; }
    /// Box used for the centroids that distance metrics compare; defaults to borders().
    const Box& metric_borders() const { return metric_borders_; }

    /// Returns the 0-based state whose closed region contains p; ties go to the lowest state.
    std::size_t classify(Vec2 p) const;
    Vec2 centroid(std::size_t state) const;
    Vec2 metric_centroid(std::size_t state) const;
    std::vector<Vec2> sample(std::size_t state, std::size_t count, Rng& rng) const;
    Vec2 sample_one(std::size_t state, Rng& rng) const;

    /// Same regions, different integration borders.
    SpacePartition with_borders(const Box& borders) const;
    SpacePartition with_metric_borders(const Box& borders) const;
    nlohmann::json to_json() const;

private:
    void clip_regions();

    std::string name_;
    Box borders_;
    Box metric_borders_;
    std::vector<Region> regions_;
};

} // namespace qslam
