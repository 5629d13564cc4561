#pragma once

#include <cstddef>
#include <vector>

namespace neumag {

/// Real symmetric tridiagonal matrix: `diag` has n entries, `off` has n-1.
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }
};

struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector;  // unit Euclidean norm
};

/// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t count_eigenvalues_below(const SymTridiagonal& m, double x);

/// Smallest eigenvalue by Sturm bisection, eigenvector by inverse iteration.
/// The returned value is the Rayleigh quotient of the refined vector.
Eigenpair lowest_eigenpair(const SymTridiagonal& m);

}  // namespace neumag
