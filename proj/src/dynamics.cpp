#include "covercs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace covercs {

namespace {

// Hand-rolled generator so sampled initial data is identical across
// platforms and standard libraries.
struct SplitMix64 {
    std::uint64_t s;
    explicit SplitMix64(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97f4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * u01() - 1.0; }
};

ParticleState shifted(const ParticleState& base, const Derivative& d, double c) {
    ParticleState out = base;
    out.time = base.time + c;
    for (std::size_t i = 0; i < out.positions.size(); ++i) {
        out.positions[i] += c * d.position_rates[i];
        out.velocities[i] += c * d.velocity_rates[i];
    }
    return out;
}

void check_state(const ParticleState& state, const SimConfig& config) {
    if (state.dimension != config.manifold.dimension ||
        state.count != static_cast<std::size_t>(config.particle_count))
        throw std::invalid_argument("state does not match config (N or dimension)");
}

}  // namespace

void SimConfig::validate() const {
    manifold.validate();
    kernel.validate();
    require_summable(kernel, manifold);
    if (!(coupling > 0.0)) throw std::invalid_argument("coupling must be > 0");
    if (particle_count < 1) throw std::invalid_argument("particle_count must be >= 1");
    if (!(time_step > 0.0)) throw std::invalid_argument("time_step must be > 0");
    if (horizon < 0.0) throw std::invalid_argument("horizon must be >= 0");
    if (horizon > 0.0 && time_step > horizon)
        throw std::invalid_argument("time_step must not exceed the horizon");
    if (!(truncation_eps > 0.0)) throw std::invalid_argument("truncation_eps must be > 0");
    if (output_stride < 1) throw std::invalid_argument("output_stride must be >= 1");
    if (lanes < 1) throw std::invalid_argument("lanes must be >= 1");
    if (initial.mode == InitialData::Mode::Explicit) {
        if (initial.positions.size() != static_cast<std::size_t>(particle_count) ||
            initial.velocities.size() != static_cast<std::size_t>(particle_count))
            throw std::invalid_argument("explicit initial data must list N positions and velocities");
        for (const Vec& p : initial.positions) {
            if (static_cast<int>(p.size()) != manifold.dimension)
                throw std::invalid_argument("explicit initial position has wrong dimension");
            if (!all_finite(p))
                throw std::invalid_argument("explicit initial position must be finite");
        }
        for (const Vec& v : initial.velocities) {
            if (static_cast<int>(v.size()) != manifold.dimension)
                throw std::invalid_argument("explicit initial velocity has wrong dimension");
            if (!all_finite(v))
                throw std::invalid_argument("explicit initial velocity must be finite");
        }
    } else if (!(initial.strip_half_width > 0.0)) {
        throw std::invalid_argument("initial.strip_half_width must be > 0");
    }
}

ParticleState initial_state(const SimConfig& config) {
    config.validate();
    const int d = config.manifold.dimension;
    const auto n = static_cast<std::size_t>(config.particle_count);
    ParticleState st;
    st.time = 0.0;
    st.dimension = d;
    st.count = n;
    st.positions.resize(n * d);
    st.velocities.resize(n * d);

    if (config.initial.mode == InitialData::Mode::Explicit) {
        for (std::size_t i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) {
                st.position(i)[j] = config.initial.positions[i][j];
                st.velocity(i)[j] = config.initial.velocities[i][j];
            }
        return st;
    }

    SplitMix64 rng(config.seed);
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            double c = rng.u01();
            if (config.manifold.kind == ManifoldKind::MobiusStrip && j == 1)
                c = config.initial.strip_half_width * (2.0 * c - 1.0);
            st.position(i)[j] = c;
        }
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) st.velocity(i)[j] = rng.symmetric();
    return st;
}

double energy(const ParticleState& state) {
    double e = 0.0;
    for (double v : state.velocities) e += v * v;
    return 0.5 * e;
}

PairWeightTable pair_weight_table(const ParticleState& state, const SimConfig& config) {
    check_state(state, config);
    const std::size_t n = state.count;
    const bool has_odd = config.manifold.has_flip_classes();
    PairWeightTable table(n, has_odd);

    // Speeds are bounded for all time by the current energy (the energy is
    // non-increasing), so |J^f v_k - v_i| <= 2 V_max certifies the force error.
    // The budget is additionally capped at truncation_eps in absolute terms so
    // the weights stay meaningful when the speeds have decayed to near zero
    // (the log-speed diagnostics divide that smallness back out).
    const double v_max = std::sqrt(2.0 * energy(state));
    const double eps_w =
        (std::isfinite(v_max) && v_max > 0.0)
            ? std::min(config.truncation_eps,
                       config.truncation_eps / (2.0 * v_max * static_cast<double>(n)))
            : config.truncation_eps;
    table.eps_per_weight = eps_w;

    struct Pair {
        std::size_t i, k;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i; k < n; ++k) {
            if (i == k && !has_odd) continue;  // zero contribution everywhere
            pairs.push_back({i, k});
        }

    std::vector<double> errors(pairs.size(), 0.0);
    const auto work = [&](std::size_t begin, std::size_t end) {
        PhiWorkspace ws;
        for (std::size_t p = begin; p < end; ++p) {
            const auto [i, k] = pairs[p];
            const PairWeights w = pair_class_weights(config.manifold, config.kernel,
                                                     state.position(i), state.position(k), eps_w,
                                                     &ws);
            table.set(i, k, w.w[0], w.w[1]);
            errors[p] = w.error_bound;
        }
    };

    const int lanes = std::max(1, config.lanes);
    if (lanes == 1 || pairs.size() < 8) {
        work(0, pairs.size());
    } else {
        std::vector<std::thread> threads;
        const std::size_t chunk = (pairs.size() + lanes - 1) / lanes;
        for (int t = 0; t < lanes; ++t) {
            const std::size_t b = std::min(pairs.size(), t * chunk);
            const std::size_t e = std::min(pairs.size(), b + chunk);
            if (b < e) threads.emplace_back(work, b, e);
        }
        for (auto& th : threads) th.join();
    }

    for (double e : errors) table.weight_error = std::max(table.weight_error, e);
    return table;
}

Derivative rhs_from_weights(const ParticleState& state, const SimConfig& config,
                            const PairWeightTable& table) {
    check_state(state, config);
    const std::size_t n = state.count;
    const int d = state.dimension;
    Derivative out;
    out.position_rates = state.velocities;
    out.velocity_rates.assign(n * d, 0.0);

    const double scale = config.coupling / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto vi = state.velocity(i);
        std::span<double> acc(out.velocity_rates.data() + i * d, static_cast<std::size_t>(d));
        for (std::size_t k = 0; k < n; ++k) {
            const auto vk = state.velocity(k);
            const double w0 = table.even(i, k);
            if (w0 != 0.0)
                for (int j = 0; j < d; ++j) acc[j] += w0 * (vk[j] - vi[j]);
            if (table.has_odd_class()) {
                const double w1 = table.odd(i, k);
                if (w1 != 0.0)
                    for (int j = 0; j < d; ++j)
                        acc[j] += w1 * ((j == 1 ? -vk[j] : vk[j]) - vi[j]);
            }
        }
        for (int j = 0; j < d; ++j) acc[j] *= scale;
    }

    const double v_max = std::sqrt(2.0 * energy(state));
    out.force_error = config.coupling * table.weight_error * 2.0 * v_max;
    return out;
}

Derivative rhs(const ParticleState& state, const SimConfig& config) {
    return rhs_from_weights(state, config, pair_weight_table(state, config));
}

ParticleState step_with_dt(const ParticleState& state, const SimConfig& config, double dt) {
    switch (config.integrator) {
        case Integrator::Euler: {
            return shifted(state, rhs(state, config), dt);
        }
        case Integrator::RK4: {
            const Derivative k1 = rhs(state, config);
            const Derivative k2 = rhs(shifted(state, k1, 0.5 * dt), config);
            const Derivative k3 = rhs(shifted(state, k2, 0.5 * dt), config);
            const Derivative k4 = rhs(shifted(state, k3, dt), config);
            ParticleState out = state;
            out.time = state.time + dt;
            const double c = dt / 6.0;
            for (std::size_t i = 0; i < out.positions.size(); ++i) {
                out.positions[i] += c * (k1.position_rates[i] + 2.0 * k2.position_rates[i] +
                                         2.0 * k3.position_rates[i] + k4.position_rates[i]);
                out.velocities[i] += c * (k1.velocity_rates[i] + 2.0 * k2.velocity_rates[i] +
                                          2.0 * k3.velocity_rates[i] + k4.velocity_rates[i]);
            }
            return out;
        }
    }
    throw std::logic_error("unknown integrator");
}

ParticleState step(const ParticleState& state, const SimConfig& config) {
    return step_with_dt(state, config, config.time_step);
}

double self_interaction_log_speed_rate(const ParticleState& state, const SimConfig& config) {
    check_state(state, config);
    if (state.count != 1)
        throw std::invalid_argument("self_interaction_log_speed_rate requires N = 1");
    const auto v = state.velocity(0);
    const double vsq = norm_sq(v);
    if (vsq == 0.0)
        throw std::invalid_argument("self_interaction_log_speed_rate: zero velocity");
    if (!config.manifold.has_flip_classes()) return 0.0;

    PhiWorkspace ws;
    const PairWeights w = pair_class_weights(config.manifold, config.kernel, state.position(0),
                                             state.position(0), config.truncation_eps, &ws);
    // |J u - u|^2 = 4 u_2^2; flip-0 elements transport u to itself.
    return -2.0 * config.coupling * w.w[1] * v[1] * v[1] / vsq;
}

void integrate(const SimConfig& config,
               const std::function<void(const ParticleState&)>& observer) {
    config.validate();
    ParticleState state = initial_state(config);
    observer(state);
    if (config.horizon <= 0.0) return;

    const double dt = config.time_step;
    auto nfull = static_cast<std::int64_t>(std::floor(config.horizon / dt + 1e-9));
    double rem = config.horizon - static_cast<double>(nfull) * dt;
    if (rem < 1e-12 * std::max(1.0, config.horizon)) rem = 0.0;
    const std::int64_t total = nfull + (rem > 0.0 ? 1 : 0);

    for (std::int64_t s = 1; s <= total; ++s) {
        state = step_with_dt(state, config, s <= nfull ? dt : rem);
        if (!state.finite()) throw NonFiniteStateError(state.time);
        if (s % config.output_stride == 0 || s == total) observer(state);
    }
}

}  // namespace covercs
