#include "covercs/ewald.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "covercs/gammainc.hpp"

namespace covercs {

namespace {

constexpr double kEta = 1.0;  // split point of the Gamma integral
constexpr double kPi = 3.14159265358979323846;

struct GaussRule {
    std::vector<double> x, w;
};

// Legendre nodes/weights on [-1, 1] by Newton iteration (generated once).
GaussRule make_gauss(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    return r;
}

const GaussRule& gauss20() {
    static const GaussRule g = make_gauss(20);
    return g;
}
const GaussRule& gauss10() {
    static const GaussRule g = make_gauss(10);
    return g;
}

struct QuadResult {
    double value = 0.0;
    double err = 0.0;
};

// J(b) = int_0^eta t^{s-1} e^{-t*Csq - b/t} dt over dyadic panels; the
// essential singularity at t = 0 is cut off once its certified remainder
// bound e^{-b/t} * t^s / s is below tolerance.
QuadResult dual_integral(double s, double Csq, double b, double tol) {
    QuadResult out;
    double hi = kEta;
    for (int panel = 0; panel < 80; ++panel) {
        const double lo = hi * 0.5;
        const auto eval = [&](const GaussRule& g) {
            const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
            double acc = 0.0;
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                const double t = c + hw * g.x[i];
                acc += g.w[i] * std::exp((s - 1.0) * std::log(t) - t * Csq - b / t);
            }
            return acc * hw;
        };
        const double v20 = eval(gauss20());
        const double v10 = eval(gauss10());
        out.value += v20;
        out.err += 10.0 * std::abs(v20 - v10);
        hi = lo;
        const double rem = std::exp(-b / hi + s * std::log(hi)) / s;
        if (rem <= 0.25 * tol) {
            out.err += rem;
            return out;
        }
    }
    out.err += std::exp(-b / hi + s * std::log(hi)) / s;
    return out;
}

// sum_{|q| > K} e^{-beta (|q| - 1/2)^2}, geometric-domination bound.
double axis_tail(double beta, int K) {
    const double first = std::exp(-beta * (K + 0.5) * (K + 0.5));
    const double ratio = std::exp(-2.0 * beta * (K + 1));
    return 2.0 * first / (1.0 - ratio);
}

// sum over all q of e^{-beta (|q| - 1/2)^2}-type terms with the q = 0 term <= 1.
double axis_full(double beta) {
    const double first = std::exp(-beta * 0.25);
    const double ratio = std::exp(-2.0 * beta);
    return 1.0 + 2.0 * first / (1.0 - ratio);
}

// sum_{|q| > K} e^{-beta q^2} (zero offset, used on the dual side).
double axis_tail0(double beta, int K) {
    const double first = std::exp(-beta * (K + 1.0) * (K + 1.0));
    const double ratio = std::exp(-beta * (2.0 * K + 3.0));
    return 2.0 * first / (1.0 - ratio);
}

double axis_full0(double beta) {
    const double first = std::exp(-beta);
    const double ratio = std::exp(-3.0 * beta);
    return 1.0 + 2.0 * first / (1.0 - ratio);
}

}  // namespace

PowerLatticeResult power_lattice_sum(double alpha, std::span<const double> steps,
                                     std::span<const double> offsets, double Csq, double eps,
                                     PowerLatticeCache* cache) {
    const int rank = static_cast<int>(steps.size());
    if (offsets.size() != steps.size())
        throw std::invalid_argument("power_lattice_sum: steps/offsets size mismatch");
    if (!(alpha > 0.0) || !(Csq > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("power_lattice_sum: need alpha, Csq, eps > 0");
    if (rank == 0) return {std::pow(Csq, -alpha), 0.0};

    const double s = alpha - 0.5 * rank;
    if (s <= 0.0)
        throw std::domain_error("power_lattice_sum: alpha must exceed rank/2 for summability");

    std::array<double, 8> u{};
    double V = 1.0;
    for (int j = 0; j < rank; ++j) {
        u[j] = offsets[j] - steps[j] * std::round(offsets[j] / steps[j]);
        V *= steps[j];
    }

    const double tail_budget = 0.25 * eps;
    double err = 0.0;

    // ---- dual-lattice (t <= eta) side ----
    const double k0 = std::pow(kPi, 0.5 * rank) / V * gamma_p(s, kEta * Csq) *
                      std::exp(std::lgamma(s) - std::lgamma(alpha)) * std::pow(Csq, -s);
    const double pref = std::exp(0.5 * rank * std::log(kPi) - std::log(V) - std::lgamma(alpha));
    // |J(b)| <= e^{-b/eta} * G0 and pref * G0 equals the zero mode, so the
    // truncated dual modes are bounded by k0-scaled Gaussian axis tails.
    const double dual_unit = std::max(k0, 1e-300);

    std::array<int, 8> Kf{};
    std::array<double, 8> beta_f{};
    {
        std::array<double, 8> full{};
        for (int j = 0; j < rank; ++j) {
            beta_f[j] = kPi * kPi / (kEta * steps[j] * steps[j]);
            full[j] = axis_full0(beta_f[j]);
        }
        for (int j = 0; j < rank; ++j) {
            double others = 1.0;
            for (int l = 0; l < rank; ++l)
                if (l != j) others *= full[l];
            int K = 1;
            while (K < 64 &&
                   dual_unit * axis_tail0(beta_f[j], K) * others > tail_budget / rank)
                ++K;
            Kf[j] = K;
            err += dual_unit * axis_tail0(beta_f[j], K) * others;
        }
    }

    double dual = k0;
    double abs_accum = std::abs(k0);
    {
        std::int64_t count = 1;
        for (int j = 0; j < rank; ++j) count *= (2 * Kf[j] + 1);
        const double quad_tol = 0.25 * eps / static_cast<double>(count);

        std::array<int, 8> k{};
        for (int j = 0; j < rank; ++j) k[j] = -Kf[j];
        while (true) {
            bool zero = true;
            for (int j = 0; j < rank; ++j)
                if (k[j] != 0) zero = false;
            if (!zero) {
                double b = 0.0, phase = 0.0;
                for (int j = 0; j < rank; ++j) {
                    const double kj = static_cast<double>(k[j]) / steps[j];
                    b += kj * kj;
                    phase += kj * u[j];
                }
                b *= kPi * kPi;
                phase *= 2.0 * kPi;

                double jval, jerr;
                bool have = false;
                if (cache) {
                    auto it = cache->dual_integral.find(b);
                    if (it != cache->dual_integral.end() &&
                        cache->dual_integral_err[b] <= quad_tol) {
                        jval = it->second;
                        jerr = cache->dual_integral_err[b];
                        have = true;
                    }
                }
                if (!have) {
                    const QuadResult q = dual_integral(s, Csq, b, quad_tol);
                    jval = q.value;
                    jerr = q.err;
                    if (cache) {
                        cache->dual_integral[b] = jval;
                        cache->dual_integral_err[b] = jerr;
                    }
                }
                const double term = pref * std::cos(phase) * jval;
                dual += term;
                abs_accum += std::abs(term);
                err += pref * jerr;
            }
            int j = rank - 1;
            while (j >= 0 && k[j] == Kf[j]) {
                k[j] = -Kf[j];
                --j;
            }
            if (j < 0) break;
            ++k[j];
        }
    }

    // ---- real-space (t > eta) side ----
    const double T0 = gamma_q(alpha, kEta * Csq) * std::pow(Csq, -alpha);
    std::array<int, 8> Kr{};
    {
        std::array<double, 8> full{};
        std::array<double, 8> beta_r{};
        for (int j = 0; j < rank; ++j) {
            beta_r[j] = kEta * steps[j] * steps[j];
            full[j] = axis_full(beta_r[j]);
        }
        for (int j = 0; j < rank; ++j) {
            double others = 1.0;
            for (int l = 0; l < rank; ++l)
                if (l != j) others *= full[l];
            int K = 1;
            while (K < 64 && T0 * axis_tail(beta_r[j], K) * others > tail_budget / rank) ++K;
            Kr[j] = K;
            err += T0 * axis_tail(beta_r[j], K) * others;
        }
    }

    double real = 0.0;
    {
        std::array<int, 8> n{};
        for (int j = 0; j < rank; ++j) n[j] = -Kr[j];
        while (true) {
            double rsq = 0.0;
            for (int j = 0; j < rank; ++j) {
                const double c = u[j] + steps[j] * static_cast<double>(n[j]);
                rsq += c * c;
            }
            const double X = Csq + rsq;
            const double term = gamma_q(alpha, kEta * X) * std::pow(X, -alpha);
            real += term;
            abs_accum += term;
            int j = rank - 1;
            while (j >= 0 && n[j] == Kr[j]) {
                n[j] = -Kr[j];
                --j;
            }
            if (j < 0) break;
            ++n[j];
        }
    }

    PowerLatticeResult out;
    out.value = real + dual;
    // accumulated rounding slack on top of the certified truncation pieces
    out.error_bound = err + 64.0 * 2.3e-16 * abs_accum;
    return out;
}

}  // namespace covercs
