#include "covercs/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "covercs/gammainc.hpp"
#include "covercs/latsum.hpp"

namespace covercs {

namespace {

constexpr double kPi = 3.14159265358979323846;

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// (rho-1)-sphere area, 2 pi^{rho/2} / Gamma(rho/2).
double sphere_area(int rho) {
    return 2.0 * std::pow(kPi, 0.5 * rho) / std::tgamma(0.5 * rho);
}

double profile_eval(const Kernel& k, double r) {
    double p = 0.0;
    for (auto it = k.coefficients.rbegin(); it != k.coefficients.rend(); ++it) p = p * r + *it;
    return p;
}

// int_z^inf s^j e^{-lambda s} ds for z >= 0.
double exp_moment(int j, double lambda, double z) {
    double sum = 1.0, term = 1.0;
    for (int i = 1; i <= j; ++i) {
        term *= lambda * z / static_cast<double>(i);
        sum += term;
    }
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    return fact / std::pow(lambda, j + 1) * std::exp(-lambda * z) * sum;
}

latsum::StripKernel strip_kernel(const Kernel& k) {
    latsum::StripKernel s;
    if (k.family == KernelFamily::Exponential) {
        s.family = latsum::Family::Exponential;
        s.lambda = k.lambda;
    } else {
        s.family = latsum::Family::CompactPolynomial;
        s.support = k.support;
        s.support_sq = k.support * k.support;
        s.coeffs = k.coefficients.data();
        s.n_coeffs = static_cast<int>(k.coefficients.size());
    }
    return s;
}

// Upper bound on sum_{t in lattice, |t| > R} phi(|t| - c) for a diagonal
// lattice of rank rho, covolume V and cell diagonal D. Cube-covering
// comparison with the radial integral; phi is clamped at zero argument.
double lattice_tail(const Kernel& k, int rho, double V, double D, double c, double R) {
    if (rho == 0) return 0.0;
    const double h = D + c;
    const double a0 = std::max(R - D, 0.0);

    if (k.family == KernelFamily::CompactPolynomial) {
        // Every excluded term has distance > R - c; zero once that clears the
        // support. Otherwise a crude count times the largest surviving value.
        if (R - c >= k.support) return 0.0;
        const double count = std::pow(2.0 * (k.support + c) + 2.0, rho) / V + 1.0;
        return count * evaluate(k, std::max(R - c, 0.0));
    }

    double piece = 0.0;
    if (a0 < h)
        piece = evaluate(k, 0.0) * (std::pow(h, rho) - std::pow(a0, rho)) / rho;
    const double z = std::max(a0 - h, 0.0);

    double integral = 0.0;
    if (k.family == KernelFamily::Exponential) {
        for (int j = 0; j < rho; ++j)
            integral += binom(rho - 1, j) * std::pow(h, rho - 1 - j) * exp_moment(j, k.lambda, z);
    } else {  // PowerLaw, alpha > rho/2 required
        if (2.0 * k.alpha <= rho) return std::numeric_limits<double>::infinity();
        if (z < 1.0) {
            integral = (std::pow(1.0 + h, rho) - std::pow(z + h, rho)) / rho +
                       std::pow(1.0 + h, rho - 1) / (2.0 * k.alpha - rho);
        } else {
            integral = std::pow(1.0 + h / z, rho - 1) * std::pow(z, rho - 2.0 * k.alpha) /
                       (2.0 * k.alpha - rho);
        }
    }
    return sphere_area(rho) / V * (piece + integral);
}

struct ClassGeometry {
    double covolume = 1.0;
    double diag = 0.0;
    double offset_norm = 0.0;  // after reduction
};

ClassGeometry geometry_of(const OrbitClass& cls, std::array<double, 8>& u) {
    ClassGeometry g;
    double dsq = 0.0, usq = 0.0;
    for (int j = 0; j < cls.rank; ++j) {
        u[j] = cls.offsets[j] - cls.steps[j] * std::round(cls.offsets[j] / cls.steps[j]);
        g.covolume *= cls.steps[j];
        dsq += cls.steps[j] * cls.steps[j];
        usq += u[j] * u[j];
    }
    g.diag = std::sqrt(dsq);
    g.offset_norm = std::sqrt(usq);
    return g;
}

// Exact finite sum for compact-support kernels.
double compact_class_sum(const Kernel& k, const OrbitClass& cls) {
    const double bsq = k.support * k.support - cls.transverse_sq;
    if (bsq < 0.0) return 0.0;
    std::array<double, 8> u{};
    (void)geometry_of(cls, u);
    const latsum::StripKernel sk = strip_kernel(k);

    double total = 0.0;
    std::array<std::int64_t, 8> lo{}, hi{};
    // Nested axes with the innermost handled as a strip; outer levels prune
    // on the accumulated square.
    const int last = cls.rank - 1;
    const auto axis_range = [&](int j, double room) {
        lo[j] = static_cast<std::int64_t>(std::ceil((-room - u[j]) / cls.steps[j]));
        hi[j] = static_cast<std::int64_t>(std::floor((room - u[j]) / cls.steps[j]));
    };
    const std::function<void(int, double)> recurse = [&](int j, double partial_sq) {
        const double room = std::sqrt(std::max(0.0, bsq - partial_sq));
        axis_range(j, room);
        if (lo[j] > hi[j]) return;
        if (j == last) {
            total += latsum::strip_sum(sk, cls.transverse_sq + partial_sq,
                                       u[j] + cls.steps[j] * static_cast<double>(lo[j]),
                                       cls.steps[j], hi[j] - lo[j] + 1);
            return;
        }
        for (std::int64_t n = lo[j]; n <= hi[j]; ++n) {
            const double t = u[j] + cls.steps[j] * static_cast<double>(n);
            recurse(j + 1, partial_sq + t * t);
        }
    };
    if (cls.rank == 0) {
        const double d = std::sqrt(cls.transverse_sq);
        return d <= k.support ? profile_eval(k, d) : 0.0;
    }
    recurse(0, 0.0);
    return total;
}

// Direct truncated sum for the exponential family with a certified tail.
PhiValue exponential_class_sum(const Kernel& k, const OrbitClass& cls, double eps) {
    std::array<double, 8> u{};
    const ClassGeometry g = geometry_of(cls, u);
    if (cls.rank == 0)
        return {std::exp(-k.lambda * std::sqrt(cls.transverse_sq)), 0.0};

    // Smallest truncation radius with tail <= eps: doubling then bisection.
    double radius = 1.0;
    int guard = 0;
    while (lattice_tail(k, cls.rank, g.covolume, g.diag, g.offset_norm, radius) > eps) {
        radius *= 2.0;
        if (++guard > 60)
            throw std::runtime_error("exponential orbit sum: truncation radius search diverged");
    }
    double lo_r = radius * 0.5, hi_r = radius;
    if (guard == 0) lo_r = 0.0;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo_r + hi_r);
        if (lattice_tail(k, cls.rank, g.covolume, g.diag, g.offset_norm, mid) <= eps)
            hi_r = mid;
        else
            lo_r = mid;
    }
    radius = hi_r;
    const double tail = lattice_tail(k, cls.rank, g.covolume, g.diag, g.offset_norm, radius);

    double cells = 1.0;
    for (int j = 0; j < cls.rank; ++j) cells *= 2.0 * radius / cls.steps[j] + 1.0;
    if (cells > 5e7)
        throw std::runtime_error("exponential orbit sum: truncation box too large; relax eps");

    const latsum::StripKernel sk = strip_kernel(k);
    const int last = cls.rank - 1;
    std::array<std::int64_t, 8> lo{}, hi{};
    for (int j = 0; j < cls.rank; ++j) {
        lo[j] = static_cast<std::int64_t>(std::ceil(-radius / cls.steps[j]));
        hi[j] = static_cast<std::int64_t>(std::floor(radius / cls.steps[j]));
    }
    double total = 0.0;
    const std::function<void(int, double)> recurse = [&](int j, double partial_sq) {
        if (j == last) {
            total += latsum::strip_sum(sk, cls.transverse_sq + partial_sq,
                                       u[j] + cls.steps[j] * static_cast<double>(lo[j]),
                                       cls.steps[j], hi[j] - lo[j] + 1);
            return;
        }
        for (std::int64_t n = lo[j]; n <= hi[j]; ++n) {
            const double t = u[j] + cls.steps[j] * static_cast<double>(n);
            recurse(j + 1, partial_sq + t * t);
        }
    };
    recurse(0, 0.0);
    return {total, tail};
}

}  // namespace

std::string to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::CompactPolynomial: return "compact_polynomial";
        case KernelFamily::Exponential: return "exponential";
        case KernelFamily::PowerLaw: return "power_law";
    }
    return "?";
}

Kernel Kernel::exponential(double lambda) {
    Kernel k;
    k.family = KernelFamily::Exponential;
    k.lambda = lambda;
    k.validate();
    return k;
}

Kernel Kernel::power_law(double alpha) {
    Kernel k;
    k.family = KernelFamily::PowerLaw;
    k.alpha = alpha;
    k.validate();
    return k;
}

Kernel Kernel::compact_polynomial(double support, std::vector<double> coefficients) {
    Kernel k;
    k.family = KernelFamily::CompactPolynomial;
    k.support = support;
    k.coefficients = std::move(coefficients);
    k.validate();
    return k;
}

Kernel Kernel::bump(double support) {
    const double a2 = support * support;
    return compact_polynomial(support, {1.0, 0.0, -2.0 / a2, 0.0, 1.0 / (a2 * a2)});
}

void Kernel::validate() const {
    switch (family) {
        case KernelFamily::Exponential:
            if (!(lambda > 0.0)) throw std::invalid_argument("exponential kernel: lambda must be > 0");
            return;
        case KernelFamily::PowerLaw:
            if (!(alpha > 0.0)) throw std::invalid_argument("power-law kernel: alpha must be > 0");
            return;
        case KernelFamily::CompactPolynomial: {
            if (!(support > 0.0))
                throw std::invalid_argument("compact kernel: support radius must be > 0");
            if (coefficients.empty())
                throw std::invalid_argument("compact kernel: empty profile polynomial");
            double scale = 0.0;
            for (double c : coefficients) scale = std::max(scale, std::abs(c));
            if (scale == 0.0) scale = 1.0;
            if (std::abs(profile_eval(*this, support)) > 1e-9 * scale)
                throw std::invalid_argument(
                    "compact kernel: profile must vanish at the support radius (continuity)");
            // sampled monotonicity / nonnegativity check
            double prev = profile_eval(*this, 0.0);
            if (prev < -1e-12 * scale)
                throw std::invalid_argument("compact kernel: profile must be nonnegative");
            for (int i = 1; i <= 512; ++i) {
                const double r = support * static_cast<double>(i) / 512.0;
                const double v = profile_eval(*this, r);
                if (v < -1e-12 * scale)
                    throw std::invalid_argument("compact kernel: profile must be nonnegative");
                if (v > prev + 1e-10 * scale)
                    throw std::invalid_argument("compact kernel: profile must be non-increasing");
                prev = v;
            }
            return;
        }
    }
}

double evaluate(const Kernel& k, double r) {
    if (r < 0.0) throw std::invalid_argument("kernel argument must be >= 0");
    switch (k.family) {
        case KernelFamily::Exponential: return std::exp(-k.lambda * r);
        case KernelFamily::PowerLaw: return std::pow(1.0 + r * r, -k.alpha);
        case KernelFamily::CompactPolynomial:
            return r <= k.support ? profile_eval(k, r) : 0.0;
    }
    return 0.0;
}

SummabilityReport check_condition_A(const Kernel& k, int d) {
    if (d < 1) throw std::invalid_argument("check_condition_A: d must be >= 1");
    SummabilityReport rep;
    switch (k.family) {
        case KernelFamily::CompactPolynomial: {
            rep.summable = true;
            double v = 0.0;
            for (std::size_t i = 0; i < k.coefficients.size(); ++i)
                v += k.coefficients[i] * std::pow(k.support, d + static_cast<double>(i)) /
                     (d + static_cast<double>(i));
            rep.integral = v;
            return rep;
        }
        case KernelFamily::Exponential: {
            rep.summable = true;
            rep.integral = std::tgamma(static_cast<double>(d)) / std::pow(k.lambda, d);
            return rep;
        }
        case KernelFamily::PowerLaw: {
            if (k.alpha > 0.5 * d) {
                rep.summable = true;
                // int_0^inf r^{d-1} (1+r^2)^{-alpha} dr = B(d/2, alpha-d/2)/2
                rep.integral = 0.5 * std::exp(std::lgamma(0.5 * d) +
                                              std::lgamma(k.alpha - 0.5 * d) -
                                              std::lgamma(k.alpha));
            }
            return rep;
        }
    }
    return rep;
}

int summability_rank(const ManifoldSpec& m) { return m.lattice_rank(); }

bool kernel_summable_on(const Kernel& k, const ManifoldSpec& m) {
    const int rank = summability_rank(m);
    if (rank == 0) return true;
    return check_condition_A(k, rank).summable;
}

void require_summable(const Kernel& k, const ManifoldSpec& m) {
    if (kernel_summable_on(k, m)) return;
    std::ostringstream os;
    os << "kernel " << to_string(k.family) << " (alpha=" << k.alpha
       << ") is not summable on " << to_string(m.kind) << ": the integral test needs alpha > "
       << 0.5 * summability_rank(m) << " (rank " << summability_rank(m)
       << "), otherwise int_0^inf r^(rank-1) phi(r) dr diverges";
    throw std::domain_error(os.str());
}

double tail_bound(const ManifoldSpec& m, const Kernel& k, double anchor_offset, double R) {
    m.validate();
    if (R < 0.0 || anchor_offset < 0.0)
        throw std::invalid_argument("tail_bound: R and anchor_offset must be >= 0");
    require_summable(k, m);
    const int rank = m.lattice_rank();
    if (rank == 0) return 0.0;
    // Full translation lattice: Z^d on the torus, Z x {0} on M, Z^2 on K.
    const double V = 1.0;
    const double D = std::sqrt(static_cast<double>(rank));
    return lattice_tail(k, rank, V, D, anchor_offset, R);
}

std::vector<OrbitClass> orbit_classes(const ManifoldSpec& m, std::span<const double> x,
                                      std::span<const double> y) {
    m.validate();
    if (static_cast<int>(x.size()) != m.dimension || static_cast<int>(y.size()) != m.dimension)
        throw std::invalid_argument("orbit_classes: dimension mismatch");
    std::vector<OrbitClass> out;
    switch (m.kind) {
        case ManifoldKind::Euclidean: {
            OrbitClass c;
            c.flip = 0;
            c.rank = 0;
            c.transverse_sq = dist_sq(x, y);
            out.push_back(c);
            break;
        }
        case ManifoldKind::FlatTorus: {
            OrbitClass c;
            c.flip = 0;
            c.rank = m.dimension;
            for (int j = 0; j < m.dimension; ++j) {
                c.steps[j] = 1.0;
                c.offsets[j] = y[j] - x[j];
            }
            out.push_back(c);
            break;
        }
        case ManifoldKind::MobiusStrip: {
            for (int f = 0; f < 2; ++f) {
                OrbitClass c;
                c.flip = f;
                c.rank = 1;
                c.steps[0] = 2.0;
                c.offsets[0] = y[0] - x[0] + f;
                const double t = (f ? -y[1] : y[1]) - x[1];
                c.transverse_sq = t * t;
                out.push_back(c);
            }
            break;
        }
        case ManifoldKind::KleinBottle: {
            for (int f = 0; f < 2; ++f) {
                OrbitClass c;
                c.flip = f;
                c.rank = 2;
                c.steps[0] = 2.0;
                c.steps[1] = 1.0;
                c.offsets[0] = y[0] - x[0] + f;
                c.offsets[1] = (f ? -y[1] : y[1]) - x[1];
                out.push_back(c);
            }
            break;
        }
    }
    return out;
}

PhiValue class_phi_sum(const Kernel& k, const OrbitClass& cls, double eps, PhiWorkspace* ws) {
    if (!(eps > 0.0)) throw std::invalid_argument("class_phi_sum: eps must be > 0");
    switch (k.family) {
        case KernelFamily::CompactPolynomial: return {compact_class_sum(k, cls), 0.0};
        case KernelFamily::Exponential: return exponential_class_sum(k, cls, eps);
        case KernelFamily::PowerLaw: {
            const double Csq = 1.0 + cls.transverse_sq;
            if (cls.rank == 0) return {std::pow(Csq, -k.alpha), 0.0};
            PowerLatticeCache* cache = (ws && Csq == 1.0) ? &ws->power_cache : nullptr;
            const PowerLatticeResult r = power_lattice_sum(
                k.alpha, std::span<const double>(cls.steps.data(), cls.rank),
                std::span<const double>(cls.offsets.data(), cls.rank), Csq, eps, cache);
            return {r.value, r.error_bound};
        }
    }
    return {};
}

PhiValue phi_sum(const ManifoldSpec& m, const Kernel& k, std::span<const double> x,
                 std::span<const double> y, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("phi_sum: eps must be > 0");
    require_summable(k, m);
    const std::vector<OrbitClass> classes = orbit_classes(m, x, y);
    const double eps_class = eps / static_cast<double>(classes.size());
    PhiValue total;
    PhiWorkspace ws;
    for (const OrbitClass& c : classes) {
        const PhiValue v = class_phi_sum(k, c, eps_class, &ws);
        total.value += v.value;
        total.error_bound += v.error_bound;
    }
    return total;
}

PairWeights pair_class_weights(const ManifoldSpec& m, const Kernel& k,
                               std::span<const double> xi, std::span<const double> xk, double eps,
                               PhiWorkspace* ws) {
    const std::vector<OrbitClass> classes = orbit_classes(m, xi, xk);
    const double eps_class = eps / static_cast<double>(classes.size());
    PairWeights pw;
    for (const OrbitClass& c : classes) {
        const PhiValue v = class_phi_sum(k, c, eps_class, ws);
        pw.w[c.flip] += v.value;
        pw.error_bound += v.error_bound;
    }
    return pw;
}

double phi_exp_closed_form_1d(double delta) {
    if (!(delta >= 0.0) || !(delta < 1.0))
        throw std::invalid_argument("phi_exp_closed_form_1d: delta must lie in [0, 1)");
    return (std::exp(1.0 - delta) + std::exp(delta)) / (std::exp(1.0) - 1.0);
}

}  // namespace covercs
