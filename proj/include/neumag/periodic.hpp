#pragma once

#include <vector>

namespace neumag {

/// Trigonometric interpolant of uniformly spaced samples of a periodic
/// function: f(x_j) = values[j], x_j = j * period / M.
class PeriodicInterpolant {
public:
    PeriodicInterpolant() = default;
    PeriodicInterpolant(const std::vector<double>& values, double period);

    double period() const { return period_; }
    std::size_t size() const { return size_; }

    /// Value (order 0) or derivative of the given order, 0 <= order <= 3.
    double operator()(double x, int order = 0) const;

private:
    double period_ = 1.0;
    std::size_t size_ = 0;
    double mean_ = 0.0;
    std::vector<double> cos_;  // coefficient of cos(k w x), k = 1..
    std::vector<double> sin_;
};

}  // namespace neumag
