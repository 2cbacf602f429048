#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "covercs/ewald.hpp"
#include "covercs/gammainc.hpp"

using namespace covercs;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent oracle for the regularized upper gamma: adaptive Simpson of
// t^{a-1} e^{-t} on [x, x + cutoff] normalized by tgamma(a).
double simpson(double a, double lo, double hi, int n) {
    const double h = (hi - lo) / n;
    double s = 0.0;
    auto f = [&](double t) { return std::exp((a - 1.0) * std::log(t) - t); };
    for (int i = 0; i < n; ++i) {
        const double t0 = lo + i * h;
        s += (f(t0) + 4.0 * f(t0 + 0.5 * h) + f(t0 + h)) * h / 6.0;
    }
    return s;
}

double q_oracle(double a, double x) {
    const double hi = x + 60.0 + 10.0 * a;
    return simpson(a, x, hi, 40000) / std::tgamma(a);
}

// sum_{m in Z} 1/((m + x)^2 + y^2) = (pi/y) sinh(2 pi y) / (cosh(2 pi y) - cos(2 pi x))
double lorentzian_comb(double x, double y) {
    return kPi / y * std::sinh(2.0 * kPi * y) / (std::cosh(2.0 * kPi * y) - std::cos(2.0 * kPi * x));
}

double brute_power_sum_1d(double alpha, double step, double offset, double Csq, long window) {
    long double s = 0.0L;
    for (long m = -window; m <= window; ++m) {
        const double t = offset + step * static_cast<double>(m);
        s += std::pow(Csq + t * t, -alpha);
    }
    return static_cast<double>(s);
}

double brute_power_sum_2d(double alpha, double s1, double s2, double u1, double u2, double Csq,
                          long window) {
    long double s = 0.0L;
    for (long n = -window; n <= window; ++n) {
        const double a = u1 + s1 * static_cast<double>(n);
        for (long m = -window; m <= window; ++m) {
            const double b = u2 + s2 * static_cast<double>(m);
            s += std::pow(Csq + a * a + b * b, -alpha);
        }
    }
    return static_cast<double>(s);
}

}  // namespace

TEST_CASE("incomplete gamma against closed forms") {
    CHECK(gamma_q(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(gamma_q(2.0, 3.0) == doctest::Approx(4.0 * std::exp(-3.0)).epsilon(1e-14));
    CHECK(gamma_q(0.5, 2.0) == doctest::Approx(std::erfc(std::sqrt(2.0))).epsilon(1e-13));
    CHECK(gamma_p(0.5, 0.7) == doctest::Approx(std::erf(std::sqrt(0.7))).epsilon(1e-13));
    CHECK(gamma_p(3.0, 0.0) == 0.0);
    CHECK(gamma_q(3.0, 0.0) == 1.0);
}

TEST_CASE("incomplete gamma P + Q = 1 and quadrature oracle") {
    std::mt19937_64 gen(3);
    auto u = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 60; ++trial) {
        const double a = u(0.2, 9.0);
        const double x = u(0.01, 25.0);
        CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // spot checks against the integral on general (non-closed-form) orders
    for (const double a : {0.7, 1.3, 2.75, 4.2}) {
        for (const double x : {0.3, 1.7, 6.0}) {
            CHECK(gamma_q(a, x) == doctest::Approx(q_oracle(a, x)).epsilon(1e-8));
        }
    }
}

TEST_CASE("power lattice sum: rank-1 closed form (alpha = 1)") {
    std::mt19937_64 gen(17);
    auto u = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 50; ++trial) {
        const double step = (trial % 2 == 0) ? 1.0 : 2.0;
        const double offset = u(-3.0, 3.0);
        const double C = u(0.4, 3.0);
        // sum 1/(C^2 + (offset + step m)^2) = (1/step^2) * comb(offset/step, C/step)
        const double expected = lorentzian_comb(offset / step, C / step) / (step * step);

        const double steps[1] = {step};
        const double offsets[1] = {offset};
        const PowerLatticeResult r =
            power_lattice_sum(1.0, std::span(steps, 1), std::span(offsets, 1), C * C, 1e-12);
        CHECK(r.value == doctest::Approx(expected).epsilon(1e-11));
        CHECK(std::abs(r.value - expected) <= r.error_bound + 1e-11 * expected);
    }
}

TEST_CASE("power lattice sum: rank-1 brute force across alpha") {
    std::mt19937_64 gen(29);
    auto u = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 12; ++trial) {
        const double alpha = u(1.0, 4.0);
        const double step = (trial % 2 == 0) ? 1.0 : 2.0;
        const double offset = u(-1.0, 1.0);
        const double Csq = u(0.8, 4.0);
        const double steps[1] = {step};
        const double offsets[1] = {offset};
        const PowerLatticeResult r =
            power_lattice_sum(alpha, std::span(steps, 1), std::span(offsets, 1), Csq, 1e-12);
        const long window = 2'000'000;
        const double brute = brute_power_sum_1d(alpha, step, offset, Csq, window);
        // brute tail <= 2 int_{W step - |off|}^inf r^{-2 alpha} dr
        const double wr = step * window - std::abs(offset) - 1.0;
        const double brute_tail = 2.0 * std::pow(wr, 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
        CHECK(std::abs(r.value - brute) <= r.error_bound + brute_tail + 1e-13 * brute);
    }
}

TEST_CASE("power lattice sum: rank-2 brute force") {
    std::mt19937_64 gen(31);
    auto u = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 6; ++trial) {
        const double alpha = u(2.5, 4.0);  // heavy enough that window-400 tails are tight
        const double s1 = (trial % 2 == 0) ? 1.0 : 2.0;
        const double s2 = 1.0;
        const double u1 = u(-1.0, 1.0), u2 = u(-0.5, 0.5);
        const double Csq = u(0.9, 2.0);
        const double steps[2] = {s1, s2};
        const double offsets[2] = {u1, u2};
        const PowerLatticeResult r =
            power_lattice_sum(alpha, std::span(steps, 2), std::span(offsets, 2), Csq, 1e-11);
        const long window = 400;
        const double brute = brute_power_sum_2d(alpha, s1, s2, u1, u2, Csq, window);
        const double wr = std::min(s1, s2) * window - 2.0;
        const double brute_tail =
            2.0 * kPi / (s1 * s2) * std::pow(wr, 2.0 - 2.0 * alpha) / (2.0 * alpha - 2.0) * 2.0;
        CHECK(std::abs(r.value - brute) <= r.error_bound + brute_tail + 1e-12 * brute);
    }
}

TEST_CASE("power lattice sum: rank-3 brute force") {
    const double alpha = 3.0;
    const double steps[3] = {1.0, 1.0, 1.0};
    const double offsets[3] = {0.3, -0.45, 0.15};
    const PowerLatticeResult r =
        power_lattice_sum(alpha, std::span(steps, 3), std::span(offsets, 3), 1.0, 1e-11);
    const long window = 100;
    long double brute = 0.0L;
    for (long a = -window; a <= window; ++a)
        for (long b = -window; b <= window; ++b)
            for (long c = -window; c <= window; ++c) {
                const double x = offsets[0] + a, y = offsets[1] + b, z = offsets[2] + c;
                brute += std::pow(1.0 + x * x + y * y + z * z, -alpha);
            }
    // shell-count tail bound: sum_{|n| > w} ~ 4 pi int r^2 (r - 1)^{-6} dr
    const double wr = window - 2.0;
    const double brute_tail = 8.0 * kPi * std::pow(wr, 3.0 - 2.0 * alpha) / (2.0 * alpha - 3.0);
    CHECK(std::abs(r.value - static_cast<double>(brute)) <=
          r.error_bound + brute_tail + 1e-12 * r.value);
}

TEST_CASE("power lattice sum: self-consistency across tolerance and caching") {
    const double steps[2] = {2.0, 1.0};
    const double offsets[2] = {0.37, -0.21};
    const PowerLatticeResult coarse =
        power_lattice_sum(1.4, std::span(steps, 2), std::span(offsets, 2), 1.0, 1e-6);
    const PowerLatticeResult fine =
        power_lattice_sum(1.4, std::span(steps, 2), std::span(offsets, 2), 1.0, 1e-12);
    CHECK(std::abs(coarse.value - fine.value) <= coarse.error_bound + fine.error_bound);
    CHECK(coarse.error_bound <= 1e-6);

    PowerLatticeCache cache;
    const PowerLatticeResult c1 =
        power_lattice_sum(1.4, std::span(steps, 2), std::span(offsets, 2), 1.0, 1e-12, &cache);
    const double other[2] = {0.9, 0.44};
    const PowerLatticeResult c2 =
        power_lattice_sum(1.4, std::span(steps, 2), std::span(other, 2), 1.0, 1e-12, &cache);
    CHECK(c1.value == doctest::Approx(fine.value).epsilon(1e-13));
    const PowerLatticeResult c2_nocache =
        power_lattice_sum(1.4, std::span(steps, 2), std::span(other, 2), 1.0, 1e-12);
    CHECK(c2.value == doctest::Approx(c2_nocache.value).epsilon(1e-13));
}

TEST_CASE("power lattice sum rejects non-summable orders") {
    const double steps[2] = {1.0, 1.0};
    const double offsets[2] = {0.1, 0.2};
    CHECK_THROWS_AS(
        power_lattice_sum(1.0, std::span(steps, 2), std::span(offsets, 2), 1.0, 1e-10),
        std::domain_error);
    CHECK_THROWS_AS(
        power_lattice_sum(0.5, std::span(steps, 1), std::span(offsets, 1), 1.0, 1e-10),
        std::domain_error);
}

TEST_CASE("power lattice sum: lattice-shift invariance") {
    // shifting the offset by a lattice vector reindexes the same sum
    const double steps[2] = {2.0, 1.0};
    const double a[2] = {0.3, 0.4};
    const double b[2] = {0.3 + 4.0, 0.4 - 3.0};
    const PowerLatticeResult ra =
        power_lattice_sum(2.0, std::span(steps, 2), std::span(a, 2), 1.0, 1e-12);
    const PowerLatticeResult rb =
        power_lattice_sum(2.0, std::span(steps, 2), std::span(b, 2), 1.0, 1e-12);
    CHECK(ra.value == doctest::Approx(rb.value).epsilon(1e-14));
}
