#pragma once

#include "qslam/partition.hpp"
#include "qslam/state_vector.hpp"

namespace qslam {

struct MetricReport {
    double dmse = 0.0;
    double gmd = 0.0;
    double entropy = 0.0;
    double gt_likelihood = 0.0;
    double gt_likelihood_ratio = 0.0;
    double likelihood_ratio = 0.0;
    int gt_rating = 1;
};

/// Euclidean distance between the estimate and the one-hot ground truth vector.
double dmse(const StateVector& est, std::size_t gt);
/// Probability-weighted distance between region centroids and the ground-truth centroid.
double gmd(const StateVector& est, std::size_t gt, const SpacePartition& partition);
double entropy(const StateVector& est);
/// 1-based rank of the ground truth by decreasing probability; states tied with it rank below it.
int gt_rating(const StateVector& est, std::size_t gt);
double gt_likelihood(const StateVector& est, std::size_t gt);
double gt_likelihood_ratio(const StateVector& est, std::size_t gt);
/// Second largest over largest probability.
double likelihood_ratio(const StateVector& est);

MetricReport evaluate(const StateVector& est, std::size_t gt, const SpacePartition& partition);

} // namespace qslam
