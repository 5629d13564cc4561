#include "neumag/montgomery_table.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "neumag/error.hpp"

namespace neumag::model {

namespace {

constexpr int kDegree = 20;
constexpr double kMaxPanelWidth = 1.0;
constexpr double kMinPanelWidth = 1e-3;

// Chebyshev-Lobatto nodes x_k = cos(pi k / n) mapped to [a, b].
std::vector<double> lobatto_nodes(double a, double b, int n) {
    std::vector<double> x(n + 1);
    for (int k = 0; k <= n; ++k) x[k] = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(std::numbers::pi * k / n);
    return x;
}

std::vector<double> chebyshev_coefficients(const std::vector<double>& f) {
    const int n = static_cast<int>(f.size()) - 1;
    std::vector<double> c(n + 1, 0.0);
    for (int j = 0; j <= n; ++j) {
        double sum = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double w = (k == 0 || k == n) ? 0.5 : 1.0;
            sum += w * f[k] * std::cos(std::numbers::pi * j * k / n);
        }
        c[j] = 2.0 * sum / n;
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    return c;
}

std::vector<double> derivative_coefficients(const std::vector<double>& c, double half_width) {
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<double> d(std::max(n, 1), 0.0);
    if (n == 0) return d;
    std::vector<double> tmp(n + 2, 0.0);
    for (int k = n - 1; k >= 0; --k) tmp[k] = tmp[k + 2] + 2.0 * (k + 1) * c[k + 1];
    tmp[0] *= 0.5;
    for (int k = 0; k < n; ++k) d[k] = tmp[k] / half_width;
    return d;
}

double clenshaw(const std::vector<double>& c, double x) {
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + c[0];
}

}  // namespace

Discretization montgomery_discretization_for(double xi, const Discretization& base) {
    const double needed = std::sqrt(2.0 * std::abs(xi)) + 8.0;
    if (base.truncation_radius >= needed) return base;
    Discretization d = base;
    const double ratio = needed / base.truncation_radius;
    d.truncation_radius = needed;
    d.num_points = static_cast<int>(std::ceil(base.num_points * ratio));
    return d;
}

MontgomeryTable MontgomeryTable::build(double lo, double hi, const Discretization& disc, double tol) {
    if (!(lo < hi) || !(tol > 0.0)) throw InvalidArgument("MontgomeryTable: invalid range or tolerance");
    MontgomeryTable table;
    table.disc_ = disc;
    table.tol_ = tol;

    const auto solve = [&](double xi) {
        ++table.num_solves_;
        return montgomery_extrapolated(xi, montgomery_discretization_for(xi, disc)).value;
    };

    const int initial = std::max(1, static_cast<int>(std::ceil((hi - lo) / kMaxPanelWidth)));
    std::vector<std::pair<double, double>> pending;
    for (int i = initial - 1; i >= 0; --i) {
        pending.emplace_back(lo + (hi - lo) * i / initial, lo + (hi - lo) * (i + 1) / initial);
    }

    while (!pending.empty()) {
        auto [a, b] = pending.back();
        pending.pop_back();
        const auto nodes = lobatto_nodes(a, b, kDegree);
        std::vector<double> values(nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) values[k] = solve(nodes[k]);
        Panel panel{a, b, chebyshev_coefficients(values)};

        double err = 0.0;
        for (double frac : {0.13, 0.5, 0.91}) {
            const double xi = a + frac * (b - a);
            const double x = (2.0 * xi - a - b) / (b - a);
            err = std::max(err, std::abs(clenshaw(panel.coeffs, x) - solve(xi)));
        }
        if (err > tol) {
            if (b - a < kMinPanelWidth) throw NumericalError("montgomery_table", "panel refinement did not converge");
            const double mid = 0.5 * (a + b);
            pending.emplace_back(mid, b);
            pending.emplace_back(a, mid);
            continue;
        }
        table.max_probe_error_ = std::max(table.max_probe_error_, err);
        table.panels_.push_back(std::move(panel));
    }
    return table;
}

MontgomeryTable MontgomeryTable::extended(double lo, double hi) const {
    return build(std::min(lo, this->lo()), std::max(hi, this->hi()), disc_, tol_);
}

const MontgomeryTable::Panel& MontgomeryTable::locate(double xi) const {
    if (!(xi >= lo() && xi <= hi())) {
        throw NumericalError("montgomery_table", "argument " + std::to_string(xi) + " outside tabulated range");
    }
    auto it = std::upper_bound(panels_.begin(), panels_.end(), xi,
                               [](double v, const Panel& p) { return v < p.b; });
    if (it == panels_.end()) --it;
    return *it;
}

double MontgomeryTable::value(double xi) const {
    const Panel& p = locate(xi);
    return clenshaw(p.coeffs, (2.0 * xi - p.a - p.b) / (p.b - p.a));
}

double MontgomeryTable::derivative(double xi) const {
    const Panel& p = locate(xi);
    const double half = 0.5 * (p.b - p.a);
    return clenshaw(derivative_coefficients(p.coeffs, half), (xi - 0.5 * (p.a + p.b)) / half);
}

double MontgomeryTable::second_derivative(double xi) const {
    const Panel& p = locate(xi);
    const double half = 0.5 * (p.b - p.a);
    const auto d1 = derivative_coefficients(p.coeffs, half);
    return clenshaw(derivative_coefficients(d1, half), (xi - 0.5 * (p.a + p.b)) / half);
}

}  // namespace neumag::model
