#include "covercs/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace covercs {

namespace {

// Self-contained phi evaluation (kept separate from kernels::evaluate on
// purpose; this file is the reference path).
double phi_direct(const Kernel& k, double r) {
    switch (k.family) {
        case KernelFamily::Exponential: return std::exp(-k.lambda * r);
        case KernelFamily::PowerLaw: return std::pow(1.0 + r * r, -k.alpha);
        case KernelFamily::CompactPolynomial: {
            if (r > k.support) return 0.0;
            double p = 0.0;
            for (auto it = k.coefficients.rbegin(); it != k.coefficients.rend(); ++it)
                p = p * r + *it;
            return p;
        }
    }
    return 0.0;
}

}  // namespace

double oracle_phi(const ManifoldSpec& m, const Kernel& k, std::span<const double> x,
                  std::span<const double> y, int window) {
    m.validate();
    if (window < 1) throw std::invalid_argument("oracle_phi: window must be >= 1");
    if (static_cast<int>(x.size()) != m.dimension || static_cast<int>(y.size()) != m.dimension)
        throw std::invalid_argument("oracle_phi: dimension mismatch");

    const int d = m.dimension;
    double sum = 0.0;

    switch (m.kind) {
        case ManifoldKind::Euclidean: {
            double rsq = 0.0;
            for (int j = 0; j < d; ++j) rsq += (y[j] - x[j]) * (y[j] - x[j]);
            return phi_direct(k, std::sqrt(rsq));
        }
        case ManifoldKind::FlatTorus: {
            std::vector<int> n(d, -window);
            while (true) {
                double rsq = 0.0;
                for (int j = 0; j < d; ++j) {
                    const double c = y[j] + n[j] - x[j];
                    rsq += c * c;
                }
                sum += phi_direct(k, std::sqrt(rsq));
                int j = d - 1;
                while (j >= 0 && n[j] == window) n[j--] = -window;
                if (j < 0) break;
                ++n[j];
            }
            return sum;
        }
        case ManifoldKind::MobiusStrip: {
            for (int n = -window; n <= window; ++n) {
                const bool odd = ((n % 2) + 2) % 2 == 1;
                const double c1 = y[0] + n - x[0];
                const double c2 = (odd ? -y[1] : y[1]) - x[1];
                sum += phi_direct(k, std::sqrt(c1 * c1 + c2 * c2));
            }
            return sum;
        }
        case ManifoldKind::KleinBottle: {
            for (int n = -window; n <= window; ++n) {
                const bool odd = ((n % 2) + 2) % 2 == 1;
                for (int mm = -window; mm <= window; ++mm) {
                    const double c1 = y[0] + n - x[0];
                    const double c2 = (odd ? -y[1] : y[1]) + mm - x[1];
                    sum += phi_direct(k, std::sqrt(c1 * c1 + c2 * c2));
                }
            }
            return sum;
        }
    }
    return sum;
}

}  // namespace covercs
