#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qslam {

/// Discrete distribution over the states of a partition. States are 0-based here;
/// files and reports use 1-based region indices.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(std::vector<double> values) : values_(std::move(values)) {}
    StateVector(std::initializer_list<double> values) : values_(values) {}

    static StateVector uniform(std::size_t d) { return StateVector(std::vector<double>(d, 1.0 / double(d))); }
    static StateVector delta(std::size_t d, std::size_t state)
    {
        std::vector<double> v(d, 0.0);
        v.at(state) = 1.0;
        return StateVector(std::move(v));
    }

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    double sum() const;

    /// Scales to unit sum. Returns false (and leaves a uniform vector) when the mass is zero or not finite.
    bool normalize();
    std::size_t argmax() const;

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    std::vector<double> values_;
};

} // namespace qslam
