// Inner-loop strip sums for direct lattice summation.
//
// A "strip" is a 1-D run of lattice translates along the innermost axis:
//
//     sum_{j=0}^{count-1} phi( sqrt(base_sq + (off + step*j)^2) )
//
// where base_sq collects the squared contributions of the outer axes and any
// fixed transverse offset. Every direct orbit sum in this project bottoms out
// here. A scalar reference implementation and an AVX2 variant are provided;
// the active backend is selected once at runtime (CPU detection, overridable
// via force_strip_backend() or the COVERCS_SIMD=scalar environment variable).
// The variants are equivalence-tested against each other; they may differ by
// floating-point accumulation order only.
#pragma once

#include <cstdint>
#include <optional>

namespace covercs::latsum {

enum class Family : int { Exponential = 0, CompactPolynomial = 1 };

// Flat parameter block; `coeffs` must outlive the call (profile polynomial
// c0 + c1 r + ... evaluated for r <= support, zero beyond).
struct StripKernel {
    Family family = Family::Exponential;
    double lambda = 1.0;
    double support = 0.0;
    double support_sq = 0.0;
    const double* coeffs = nullptr;
    int n_coeffs = 0;
};

enum class Backend { Scalar, Avx2 };

double strip_sum_scalar(const StripKernel& k, double base_sq, double off, double step,
                        std::int64_t count);

#ifdef COVERCS_HAVE_AVX2
double strip_sum_avx2(const StripKernel& k, double base_sq, double off, double step,
                      std::int64_t count);
#endif

// Dispatched entry point used by the kernel-sum machinery.
double strip_sum(const StripKernel& k, double base_sq, double off, double step,
                 std::int64_t count);

Backend active_backend();
// Pin the backend (tests, CLI --simd flag); nullopt restores auto-detection.
void force_backend(std::optional<Backend> b);

}  // namespace covercs::latsum
