// Brute-force orbit sums used as the independent cross-check for phi_sum.
#pragma once

#include <span>

#include "covercs/kernels.hpp"
#include "covercs/manifolds.hpp"

namespace covercs {

// Direct partial sum of phi(dist(x, g(y))) over all deck elements whose
// translation entries lie in [-window, window]. Deliberately naive (plain
// nested loops, no shared summation machinery); monotone non-decreasing in
// the window since all terms are nonnegative.
double oracle_phi(const ManifoldSpec& m, const Kernel& k, std::span<const double> x,
                  std::span<const double> y, int window);

}  // namespace covercs
