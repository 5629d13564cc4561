#pragma once

namespace neumag::model {

/// Ground energy of the de Gennes operator by Prufer-angle shooting: the
/// decaying solution is integrated inward from a far Dirichlet end with an
/// adaptive Runge-Kutta-Fehlberg 7(8) scheme, and the eigenvalue is the root
/// of the Neumann mismatch at t = 0. Shares no code with the finite-difference
/// path and serves as its oracle.
double mu1_de_gennes_shooting(double xi, double tol = 1e-13);

}  // namespace neumag::model
