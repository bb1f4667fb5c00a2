#pragma once

#include <span>
#include <vector>

namespace qslam {

/// Linear interpolation between closest ranks; q in [0, 1]. NaN for an empty sample.
double percentile(std::vector<double> values, double q);

/// Ranks starting at 1, ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of the average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

} // namespace qslam
