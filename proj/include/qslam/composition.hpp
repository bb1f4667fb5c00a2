#pragma once

#include "qslam/geometry.hpp"
#include "qslam/partition.hpp"
#include "qslam/state_vector.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qslam {

enum class CompositionMode { probabilistic, deterministic };

std::string to_string(CompositionMode m);
CompositionMode composition_mode_from_string(const std::string& s);

/// d x d x d compatibility tensor over (AB:C, BC:D, AB:D) states, in that slot order.
class CompositionTensor {
public:
    struct Entry {
        std::uint32_t i, j, k;
        double value;
    };

    CompositionTensor() = default;
    explicit CompositionTensor(std::size_t d) : d_(d), dense_(d * d * d, 0.0) {}

    std::size_t dim() const { return d_; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return dense_[(i * d_ + j) * d_ + k]; }
    double at(std::size_t i, std::size_t j, std::size_t k) const;
    void set(std::size_t i, std::size_t j, std::size_t k, double v);
    void add(std::size_t i, std::size_t j, std::size_t k, double v) { dense_[(i * d_ + j) * d_ + k] += v; }

    std::size_t nonzero_count() const;
    double sum() const;
    /// Nonzero entries in (i, j, k) lexicographic order.
    std::vector<Entry> entries() const;
    void normalize();

    std::string partition_name;
    CompositionMode mode = CompositionMode::probabilistic;
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;

    void save(const std::filesystem::path& path) const;
    static CompositionTensor load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

private:
    std::size_t d_ = 0;
    std::vector<double> dense_;
};

struct TensorBuildOptions {
    std::size_t samples_per_region = 10000;
    CompositionMode mode = CompositionMode::probabilistic;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    /// Clip the BC-frame regions to the borders (in BC units) before mapping them.
    bool clip_bc_regions = false;
    /// Intersections smaller than this (AB units squared) count as touching, not overlapping.
    double min_area = 1e-12;
};

CompositionTensor build_tensor(const SpacePartition& partition, const TensorBuildOptions& options);

double joint_probability(const CompositionTensor& t, const StateVector& v1, const StateVector& v2,
                         const StateVector& v3, std::size_t i, std::size_t j, std::size_t k);

struct MarginalResult {
    StateVector belief;
    bool informative = true; // false when the contraction vanished and a uniform vector was returned
};

/// Contracts the tensor with beliefs on two slots and returns the normalised belief on `slot` (0, 1 or 2).
/// `first` and `second` are the beliefs of the remaining slots in increasing slot order.
MarginalResult marginal_onto(const CompositionTensor& t, int slot, const StateVector& first, const StateVector& second);

/// Marginal over the first slot given beliefs on the second and third.
inline MarginalResult marginal(const CompositionTensor& t, const StateVector& v2, const StateVector& v3)
{
    return marginal_onto(t, 0, v2, v3);
}

} // namespace qslam
