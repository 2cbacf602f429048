// Communication kernels phi and certified evaluation of the orbit sums
//
//     Phi(x, y) = sum over the deck orbit of phi(dist(x, g(y)))
//
// split per flip class. Three families: compact-support polynomial profiles,
// exponential decay e^{-lambda r}, and power laws (1+r^2)^(-alpha).
//
// Summability follows the integral test: the orbit sum converges iff
// int_0^inf r^(rho-1) phi(r) dr is finite with rho the deck-lattice rank
// (d on T^d, 1 on the Mobius strip, 2 on the Klein bottle).
#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "covercs/ewald.hpp"
#include "covercs/manifolds.hpp"

namespace covercs {

enum class KernelFamily { CompactPolynomial, Exponential, PowerLaw };

std::string to_string(KernelFamily f);

struct Kernel {
    KernelFamily family = KernelFamily::Exponential;
    double lambda = 1.0;                // Exponential: phi(r) = e^{-lambda r}
    double alpha = 1.0;                 // PowerLaw:    phi(r) = (1+r^2)^{-alpha}
    double support = 1.0;               // CompactPolynomial: radius A
    std::vector<double> coefficients;   // profile c0 + c1 r + ... on [0, A]

    static Kernel exponential(double lambda);
    static Kernel power_law(double alpha);
    static Kernel compact_polynomial(double support, std::vector<double> coefficients);
    // Canonical compact profile (1 - (r/A)^2)^2.
    static Kernel bump(double support);

    // Positivity and monotonicity checks; throws std::invalid_argument.
    // Compact profiles must be nonnegative, non-increasing and vanish at the
    // support radius (continuity of phi on [0, inf)).
    void validate() const;
};

// phi(r); throws for r < 0.
double evaluate(const Kernel& k, double r);

struct SummabilityReport {
    bool summable = false;
    std::optional<double> integral;  // int_0^inf r^{d-1} phi(r) dr when finite
};

// Integral test at lattice rank d, decided analytically per family.
SummabilityReport check_condition_A(const Kernel& k, int d);

// Deck lattice rank used for the summability test (0 for Euclidean space).
int summability_rank(const ManifoldSpec& m);

bool kernel_summable_on(const Kernel& k, const ManifoldSpec& m);
// Throws std::domain_error with the failing test spelled out.
void require_summable(const Kernel& k, const ManifoldSpec& m);

// Upper bound on the orbit-sum contribution of all deck translations with
// Euclidean norm > R, given that the continuous offset has norm <= anchor_offset.
// Monotone non-increasing in R and tending to zero. Throws std::domain_error
// if the kernel is not summable on the manifold.
double tail_bound(const ManifoldSpec& m, const Kernel& k, double anchor_offset, double R);

struct PhiValue {
    double value = 0.0;
    double error_bound = 0.0;  // certified absolute truncation error
};

// One flip class of a deck orbit, as a diagonal affine lattice:
// squared distances are transverse_sq + sum_j (offsets[j] + steps[j]*n_j)^2.
struct OrbitClass {
    int flip = 0;
    int rank = 0;
    std::array<double, 8> steps{};
    std::array<double, 8> offsets{};
    double transverse_sq = 0.0;
};

std::vector<OrbitClass> orbit_classes(const ManifoldSpec& m, std::span<const double> x,
                                      std::span<const double> y);

// Reusable scratch state (power-law dual-integral cache). One workspace is
// valid for a fixed (manifold, kernel) pair; sharing across pairs of points
// is what makes the power-law path fast inside the dynamics loop.
struct PhiWorkspace {
    PowerLatticeCache power_cache;
};

// Certified class sum; error_bound <= eps (up to the double-precision floor).
PhiValue class_phi_sum(const Kernel& k, const OrbitClass& cls, double eps,
                       PhiWorkspace* ws = nullptr);

// Phi(x, y): total weight over the full deck orbit, truncated so that
// error_bound <= eps. Symmetric in x and y up to 2*eps.
PhiValue phi_sum(const ManifoldSpec& m, const Kernel& k, std::span<const double> x,
                 std::span<const double> y, double eps);

struct PairWeights {
    std::array<double, 2> w{0.0, 0.0};  // indexed by flip parity
    double error_bound = 0.0;
};

// Per-class weights for one ordered pair of lifted points; the interaction of
// the covering-space system is kappa/N * [w0 (v_k - v_i) + w1 (J v_k - v_i)].
PairWeights pair_class_weights(const ManifoldSpec& m, const Kernel& k,
                               std::span<const double> xi, std::span<const double> xk, double eps,
                               PhiWorkspace* ws = nullptr);

// Closed form of the d = 1 torus sum for phi(r) = e^{-r} at reduced offset
// delta in [0, 1): (e^{1-delta} + e^{delta}) / (e - 1).
double phi_exp_closed_form_1d(double delta);

}  // namespace covercs
