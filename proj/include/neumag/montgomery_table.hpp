#pragma once

#include <vector>

#include "neumag/model_operators.hpp"

namespace neumag::model {

/// Piecewise Chebyshev table of the Montgomery ground-energy curve.
///
/// Panels are split until the interpolant matches direct (Richardson
/// extrapolated) solves at interior probe points to within `tol`. The table
/// is immutable once built; evaluating outside [lo, hi] throws.
class MontgomeryTable {
public:
    static MontgomeryTable build(double lo, double hi,
                                 const Discretization& disc = Discretization::montgomery(),
                                 double tol = 1e-9);

    /// A table covering [min(lo, this->lo()), max(hi, this->hi())], reusing
    /// this table's discretization and tolerance.
    MontgomeryTable extended(double lo, double hi) const;

    double lo() const { return panels_.front().a; }
    double hi() const { return panels_.back().b; }
    bool covers(double lo, double hi) const { return lo >= this->lo() && hi <= this->hi(); }

    double value(double xi) const;
    double derivative(double xi) const;
    double second_derivative(double xi) const;

    /// Largest probe discrepancy observed while building.
    double max_probe_error() const { return max_probe_error_; }
    std::size_t num_panels() const { return panels_.size(); }
    std::size_t num_solves() const { return num_solves_; }

private:
    struct Panel {
        double a = 0.0;
        double b = 0.0;
        std::vector<double> coeffs;  // Chebyshev coefficients on [a, b]
    };

    const Panel& locate(double xi) const;

    std::vector<Panel> panels_;
    Discretization disc_;
    double tol_ = 1e-9;
    double max_probe_error_ = 0.0;
    std::size_t num_solves_ = 0;
};

/// Discretization for a Montgomery solve at xi: the given one when its
/// truncation suffices, otherwise enlarged at constant step.
Discretization montgomery_discretization_for(double xi, const Discretization& base);

}  // namespace neumag::model
