// Certified evaluation of power-law lattice sums
//
//     S = sum_{n in Z^rank} ( Csq + |u + diag(steps) n|^2 )^(-alpha)
//
// via a Gaussian split of the Gamma integral representation at t = eta:
// the t > eta piece becomes a rapidly (Gaussian) decaying real-space sum of
// upper-incomplete-gamma terms, the t <= eta piece is Poisson-summed over the
// dual lattice into a zero mode plus Gaussian-decaying cosine corrections.
// Direct truncation of these sums is hopeless for heavy tails (the truncation
// radius for an absolute error of 1e-10 at alpha = 2, rank 2 exceeds 1e5);
// after the split both sides converge superexponentially.
//
// Requires alpha > rank/2 (the integral-test summability condition).
#pragma once

#include <map>
#include <span>

namespace covercs {

struct PowerLatticeResult {
    double value = 0.0;
    double error_bound = 0.0;  // certified absolute bound: truncation + quadrature estimate
};

// Reusable cache of dual-lattice integrals, valid for fixed
// (alpha, steps, Csq, eps-scale); keyed by the dual exponent pi^2 |k*|^2.
struct PowerLatticeCache {
    std::map<double, double> dual_integral;
    std::map<double, double> dual_integral_err;
};

PowerLatticeResult power_lattice_sum(double alpha, std::span<const double> steps,
                                     std::span<const double> offsets, double Csq, double eps,
                                     PowerLatticeCache* cache = nullptr);

}  // namespace covercs
