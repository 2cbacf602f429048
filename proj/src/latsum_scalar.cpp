#include <cmath>

#include "covercs/latsum.hpp"

namespace covercs::latsum {

namespace {

inline double profile_eval(const StripKernel& k, double r) {
    double p = 0.0;
    for (int i = k.n_coeffs - 1; i >= 0; --i) p = p * r + k.coeffs[i];
    return p;
}

}  // namespace

double strip_sum_scalar(const StripKernel& k, double base_sq, double off, double step,
                        std::int64_t count) {
    double sum = 0.0;
    switch (k.family) {
        case Family::Exponential: {
            for (std::int64_t j = 0; j < count; ++j) {
                const double t = off + step * static_cast<double>(j);
                sum += std::exp(-k.lambda * std::sqrt(base_sq + t * t));
            }
            break;
        }
        case Family::CompactPolynomial: {
            for (std::int64_t j = 0; j < count; ++j) {
                const double t = off + step * static_cast<double>(j);
                const double d2 = base_sq + t * t;
                if (d2 > k.support_sq) continue;
                sum += profile_eval(k, std::sqrt(d2));
            }
            break;
        }
    }
    return sum;
}

}  // namespace covercs::latsum
