#include "neumag/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "neumag/error.hpp"

namespace neumag {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double pivot_floor(const SymTridiagonal& m) {
    double scale = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double row = std::abs(m.diag[i]);
        if (i > 0) row += std::abs(m.off[i - 1]);
        if (i + 1 < m.size()) row += std::abs(m.off[i]);
        scale = std::max(scale, row);
    }
    return std::max(scale, 1.0) * kEps;
}

// Solves (m - shift) x = rhs in place by Gaussian elimination without
// pivoting. The shift sits at (or just below) the lowest eigenvalue, so the
// shifted matrix is positive semidefinite up to rounding.
void shifted_solve(const SymTridiagonal& m, double shift, double floor,
                   std::vector<double>& rhs) {
    const std::size_t n = m.size();
    std::vector<double> upper(n, 0.0);
    double pivot = m.diag[0] - shift;
    if (std::abs(pivot) < floor) pivot = floor;
    upper[0] = n > 1 ? m.off[0] / pivot : 0.0;
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = m.diag[i] - shift - m.off[i - 1] * upper[i - 1];
        if (std::abs(pivot) < floor) pivot = std::copysign(floor, pivot == 0.0 ? 1.0 : pivot);
        if (i + 1 < n) upper[i] = m.off[i] / pivot;
        rhs[i] = (rhs[i] - m.off[i - 1] * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper[i] * rhs[i + 1];
}

void normalize(std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw NumericalError("tridiagonal", "inverse iteration produced a degenerate vector");
    }
    for (double& x : v) x /= norm;
}

}  // namespace

std::size_t count_eigenvalues_below(const SymTridiagonal& m, double x) {
    const std::size_t n = m.size();
    const double floor = pivot_floor(m);
    std::size_t count = 0;
    double q = m.diag[0] - x;
    if (q == 0.0) q = -floor;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        q = m.diag[i] - x - m.off[i - 1] * m.off[i - 1] / q;
        if (q == 0.0) q = -floor;
        if (q < 0.0) ++count;
    }
    return count;
}

Eigenpair lowest_eigenpair(const SymTridiagonal& m) {
    const std::size_t n = m.size();
    if (n == 0 || m.off.size() + 1 != n) {
        throw InvalidArgument("lowest_eigenpair: malformed tridiagonal matrix");
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(m.off[i - 1]);
        if (i + 1 < n) radius += std::abs(m.off[i]);
        lo = std::min(lo, m.diag[i] - radius);
        hi = std::max(hi, m.diag[i] + radius);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw NumericalError("tridiagonal", "non-finite matrix entries");
    }
    // Each diagonal entry is a Rayleigh quotient, hence an upper bound.
    for (double d : m.diag) hi = std::min(hi, d);
    hi += std::abs(hi) * kEps + std::numeric_limits<double>::min();

    int iterations = 0;
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
        if (count_eigenvalues_below(m, mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (++iterations > 2000) {
            throw NumericalError("tridiagonal", "bisection did not converge");
        }
    }

    Eigenpair result;
    const double shift = lo;
    const double floor = pivot_floor(m);
    result.vector.assign(n, 1.0);
    for (int it = 0; it < 3; ++it) {
        shifted_solve(m, shift, floor, result.vector);
        normalize(result.vector);
    }

    double quotient = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = m.diag[i] * result.vector[i];
        if (i > 0) row += m.off[i - 1] * result.vector[i - 1];
        if (i + 1 < n) row += m.off[i] * result.vector[i + 1];
        quotient += result.vector[i] * row;
    }
    result.value = quotient;
    return result;
}

}  // namespace neumag
