// Regularized incomplete gamma functions.
#pragma once

namespace covercs {

// P(a, x) = gamma(a, x) / Gamma(a), lower regularized; a > 0, x >= 0.
double gamma_p(double a, double x);

// Q(a, x) = Gamma(a, x) / Gamma(a), upper regularized. Closed forms are used
// for integer and half-integer a (the hot path of the lattice-sum splitting);
// series/continued-fraction otherwise.
double gamma_q(double a, double x);

}  // namespace covercs
