#include "qslam/state_vector.hpp"

#include <cmath>
#include <numeric>

namespace qslam {

double StateVector::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

bool StateVector::normalize()
{
    double s = sum();
    if (!(s > 0.0) || !std::isfinite(s)) {
        std::fill(values_.begin(), values_.end(), values_.empty() ? 0.0 : 1.0 / double(values_.size()));
        return false;
    }
    for (double& v : values_)
        v /= s;
    return true;
}

std::size_t StateVector::argmax() const
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (values_[i] > values_[best])
            best = i;
    return best;
}

} // namespace qslam
