#include "neumag/periodic.hpp"

#include <cmath>
#include <numbers>

#include "neumag/error.hpp"

namespace neumag {

PeriodicInterpolant::PeriodicInterpolant(const std::vector<double>& values, double period)
    : period_(period), size_(values.size()) {
    if (size_ < 3 || !(period > 0.0)) throw InvalidArgument("periodic interpolant needs >= 3 samples");
    const std::size_t m = size_;
    const std::size_t kmax = m / 2;
    cos_.assign(kmax, 0.0);
    sin_.assign(kmax, 0.0);
    for (double v : values) mean_ += v;
    mean_ /= static_cast<double>(m);
    for (std::size_t k = 1; k <= kmax; ++k) {
        double c = 0.0;
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k * j % m) / static_cast<double>(m);
            c += values[j] * std::cos(angle);
            s += values[j] * std::sin(angle);
        }
        double scale = 2.0 / static_cast<double>(m);
        // The Nyquist mode of an even-sized grid is shared by +k and -k.
        if (m % 2 == 0 && k == kmax) {
            scale = 1.0 / static_cast<double>(m);
            s = 0.0;
        }
        cos_[k - 1] = scale * c;
        sin_[k - 1] = scale * s;
    }
}

double PeriodicInterpolant::operator()(double x, int order) const {
    if (order < 0 || order > 3) throw InvalidArgument("derivative order out of range");
    const double w = 2.0 * std::numbers::pi / period_;
    double sum = order == 0 ? mean_ : 0.0;
    for (std::size_t k = 1; k <= cos_.size(); ++k) {
        const double kw = static_cast<double>(k) * w;
        const double c = std::cos(kw * x);
        const double s = std::sin(kw * x);
        const double a = cos_[k - 1];
        const double b = sin_[k - 1];
        switch (order) {
            case 0: sum += a * c + b * s; break;
            case 1: sum += kw * (-a * s + b * c); break;
            case 2: sum += -kw * kw * (a * c + b * s); break;
            default: sum += kw * kw * kw * (a * s - b * c); break;
        }
    }
    return sum;
}

}  // namespace neumag
