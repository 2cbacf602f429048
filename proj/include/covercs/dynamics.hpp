// The covering-space velocity-alignment dynamics: for lifted states
// (x_i, v_i) in R^d,
//
//   dx_i/dt = v_i
//   dv_i/dt = (kappa/N) sum_k sum_{g in deck orbit}
//                 phi(dist(x_i, g(x_k))) * (J^{flip(g)} v_k - v_i)
//
// with the k = i self terms included (they vanish on the torus, where every
// transport is the identity, but drive the Mobius/Klein self-interaction).
// Since the transport depends only on the flip parity, the orbit sums
// collapse to two certified class weights per (i, k) pair; the weight of an
// unordered pair is computed once and shared, which makes the pairwise force
// cancellation (and hence momentum conservation) exact up to rounding.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "covercs/kernels.hpp"
#include "covercs/manifolds.hpp"
#include "covercs/vec.hpp"

namespace covercs {

enum class Integrator { Euler, RK4 };

struct InitialData {
    enum class Mode { Sample, Explicit };
    Mode mode = Mode::Sample;
    // Sampling: positions uniform in the fundamental domain (for M the second
    // coordinate is uniform in (-L, L)), velocities i.i.d. uniform in [-1,1]^d.
    double strip_half_width = 1.0;
    std::vector<Vec> positions;   // explicit mode
    std::vector<Vec> velocities;
};

struct Thresholds {
    double velocity_diameter = 1e-4;
    double alignment_residual = 1e-4;
    double second_component = 1e-4;
    double strip_bound = 2.0;  // monitored |x~_2| bound on the Mobius strip
};

struct SimConfig {
    ManifoldSpec manifold;
    Kernel kernel;
    double coupling = 1.0;  // kappa
    int particle_count = 1;
    double time_step = 1e-2;
    double horizon = 1.0;
    double truncation_eps = 1e-9;  // total per-particle force error budget
    Integrator integrator = Integrator::RK4;
    std::uint64_t seed = 12345;
    InitialData initial;
    int output_stride = 10;
    bool output_particles = false;
    int lanes = 1;
    Thresholds thresholds;

    void validate() const;
};

struct ParticleState {
    double time = 0.0;
    int dimension = 0;
    std::size_t count = 0;
    std::vector<double> positions;   // count x dimension, row-major, lifted
    std::vector<double> velocities;

    std::span<const double> position(std::size_t i) const {
        return {positions.data() + i * dimension, static_cast<std::size_t>(dimension)};
    }
    std::span<const double> velocity(std::size_t i) const {
        return {velocities.data() + i * dimension, static_cast<std::size_t>(dimension)};
    }
    std::span<double> position(std::size_t i) {
        return {positions.data() + i * dimension, static_cast<std::size_t>(dimension)};
    }
    std::span<double> velocity(std::size_t i) {
        return {velocities.data() + i * dimension, static_cast<std::size_t>(dimension)};
    }
    bool finite() const { return all_finite(positions) && all_finite(velocities); }
};

struct Derivative {
    std::vector<double> position_rates;
    std::vector<double> velocity_rates;
    double force_error = 0.0;  // certified per-particle truncation error bound
};

// Symmetric per-pair class weights, shared by the force assembly and the
// diagnostics so both sides of the dissipation identity see identical
// truncated sums. Entry (i, k) stores the flip-0 / flip-1 orbit weights.
class PairWeightTable {
public:
    PairWeightTable(std::size_t n, bool has_odd)
        : n_(n), has_odd_(has_odd), even_(n * n, 0.0), odd_(has_odd ? n * n : 0, 0.0) {}

    double even(std::size_t i, std::size_t k) const { return even_[i * n_ + k]; }
    double odd(std::size_t i, std::size_t k) const {
        return has_odd_ ? odd_[i * n_ + k] : 0.0;
    }
    void set(std::size_t i, std::size_t k, double w0, double w1) {
        even_[i * n_ + k] = even_[k * n_ + i] = w0;
        if (has_odd_) odd_[i * n_ + k] = odd_[k * n_ + i] = w1;
    }
    bool has_odd_class() const { return has_odd_; }
    std::size_t size() const { return n_; }

    double weight_error = 0.0;   // max certified error of any stored weight
    double eps_per_weight = 0.0; // budget each weight was truncated to

private:
    std::size_t n_;
    bool has_odd_;
    std::vector<double> even_, odd_;
};

// Builds the weight table at the per-pair budget derived from the config:
// weight-tail * 2 * V_max <= truncation_eps / N with V_max = sqrt(2 E(state)).
// Self pairs are skipped on manifolds without flip classes (their force
// contribution is identically zero there).
PairWeightTable pair_weight_table(const ParticleState& state, const SimConfig& config);

Derivative rhs(const ParticleState& state, const SimConfig& config);
Derivative rhs_from_weights(const ParticleState& state, const SimConfig& config,
                            const PairWeightTable& table);

// One fixed step of the configured scheme (Euler or classical RK4).
ParticleState step(const ParticleState& state, const SimConfig& config);
ParticleState step_with_dt(const ParticleState& state, const SimConfig& config, double dt);

// E = 1/2 sum_i |v_i|^2.
double energy(const ParticleState& state);

// d/dt ln|v| for the single-particle system: -(kappa/2) * sum over nontrivial
// orbit elements of phi(dist) |J^flip u - u|^2 with u = v/|v|. Requires N = 1
// and nonzero velocity; identically zero without flip classes.
double self_interaction_log_speed_rate(const ParticleState& state, const SimConfig& config);

// Deterministically sampled (or explicit) initial state at t = 0.
ParticleState initial_state(const SimConfig& config);

struct NonFiniteStateError : std::runtime_error {
    explicit NonFiniteStateError(double t)
        : std::runtime_error("non-finite state at t = " + std::to_string(t)), time(t) {}
    double time;
};

// Runs from t = 0 to the horizon with fixed steps (the last step is shortened
// to land exactly on the horizon). The observer fires on the initial state,
// every `output_stride` steps, and on the final state. Bitwise deterministic
// for a fixed config; results do not depend on `lanes`.
void integrate(const SimConfig& config,
               const std::function<void(const ParticleState&)>& observer);

}  // namespace covercs
