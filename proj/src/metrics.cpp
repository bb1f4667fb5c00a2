#include "qslam/metrics.hpp"

#include "qslam/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qslam {

namespace {
void check(const StateVector& est, std::size_t gt)
{
    if (gt >= est.size())
        throw ArgumentError("ground-truth state out of range");
}
} // namespace

double dmse(const StateVector& est, std::size_t gt)
{
    check(est, gt);
    double s = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        double e = est[i] - (i == gt ? 1.0 : 0.0);
        s += e * e;
    }
    return std::sqrt(s);
}

double gmd(const StateVector& est, std::size_t gt, const SpacePartition& partition)
{
    check(est, gt);
    if (est.size() != partition.size())
        throw ArgumentError("state vector does not match the partition");
    Vec2 g = partition.metric_centroid(gt);
    double s = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i)
        if (est[i] > 0.0 && i != gt)
            s += est[i] * distance(partition.metric_centroid(i), g);
    return s;
}

double entropy(const StateVector& est)
{
    double h = 0.0;
    for (double p : est.values())
        if (p > 0.0)
            h -= p * std::log(p);
    return std::max(0.0, h);
}

int gt_rating(const StateVector& est, std::size_t gt)
{
    check(est, gt);
    int rank = 1;
    for (std::size_t i = 0; i < est.size(); ++i)
        if (est[i] > est[gt])
            ++rank;
    return rank;
}

double gt_likelihood(const StateVector& est, std::size_t gt)
{
    check(est, gt);
    return est[gt];
}

double gt_likelihood_ratio(const StateVector& est, std::size_t gt)
{
    check(est, gt);
    double m = *std::max_element(est.values().begin(), est.values().end());
    return m > 0.0 ? est[gt] / m : 0.0;
}

double likelihood_ratio(const StateVector& est)
{
    if (est.size() < 2)
        return 0.0;
    std::vector<double> v(est.values().begin(), est.values().end());
    std::partial_sort(v.begin(), v.begin() + 2, v.end(), std::greater<>());
    return v[0] > 0.0 ? v[1] / v[0] : 0.0;
}

MetricReport evaluate(const StateVector& est, std::size_t gt, const SpacePartition& partition)
{
    return {dmse(est, gt),         gmd(est, gt, partition),         entropy(est),
            gt_likelihood(est, gt), gt_likelihood_ratio(est, gt), likelihood_ratio(est),
            gt_rating(est, gt)};
}

} // namespace qslam
