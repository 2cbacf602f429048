#include "covercs/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace covercs {

namespace {

double pair_residual(const ParticleState& state, int d, double w0, double w1, std::size_t i,
                     std::size_t k) {
    const auto vi = state.velocity(i);
    const auto vk = state.velocity(k);
    double even_sq = 0.0, odd_sq = 0.0;
    for (int j = 0; j < d; ++j) {
        const double de = vk[j] - vi[j];
        even_sq += de * de;
        const double doo = (j == 1 ? -vk[j] : vk[j]) - vi[j];
        odd_sq += doo * doo;
    }
    return w0 * even_sq + w1 * odd_sq;
}

double weight_budget(const ParticleState& state, const SimConfig& config) {
    const double v_max = std::sqrt(2.0 * energy(state));
    return v_max > 0.0
               ? std::min(config.truncation_eps,
                          config.truncation_eps /
                              (2.0 * v_max * static_cast<double>(state.count)))
               : config.truncation_eps;
}

}  // namespace

double alignment_residual(const ParticleState& state, const SimConfig& config, std::size_t i,
                          std::size_t k) {
    if (i >= state.count || k >= state.count)
        throw std::invalid_argument("alignment_residual: index out of range");
    PhiWorkspace ws;
    const PairWeights w = pair_class_weights(config.manifold, config.kernel, state.position(i),
                                             state.position(k), weight_budget(state, config), &ws);
    return pair_residual(state, state.dimension, w.w[0], w.w[1], i, k);
}

std::pair<double, double> class_split_residuals(const ParticleState& state,
                                                const SimConfig& config, std::size_t i,
                                                std::size_t k) {
    if (!config.manifold.has_flip_classes())
        throw std::invalid_argument("class_split_residuals: manifold has no flip classes");
    if (i >= state.count || k >= state.count)
        throw std::invalid_argument("class_split_residuals: index out of range");
    PhiWorkspace ws;
    const PairWeights w = pair_class_weights(config.manifold, config.kernel, state.position(i),
                                             state.position(k), weight_budget(state, config), &ws);
    const int d = state.dimension;
    const auto vi = state.velocity(i);
    const auto vk = state.velocity(k);
    double even_sq = 0.0, odd_sq = 0.0;
    for (int j = 0; j < d; ++j) {
        const double de = vk[j] - vi[j];
        even_sq += de * de;
        const double doo = (j == 1 ? -vk[j] : vk[j]) - vi[j];
        odd_sq += doo * doo;
    }
    return {w.w[0] * even_sq, w.w[1] * odd_sq};
}

DiagnosticsRecord record_from_weights(const ParticleState& state, const SimConfig& config,
                                      const PairWeightTable& table) {
    const std::size_t n = state.count;
    const int d = state.dimension;
    DiagnosticsRecord rec;
    rec.time = state.time;
    rec.energy = energy(state);
    rec.momentum.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) rec.momentum[j] += state.velocity(i)[j];

    double dissipation_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double res =
                pair_residual(state, d, table.even(i, k), table.odd(i, k), i, k);
            dissipation_sum += res;
            rec.max_alignment_residual = std::max(rec.max_alignment_residual, res);
        }
        for (std::size_t k = i + 1; k < n; ++k)
            rec.velocity_diameter =
                std::max(rec.velocity_diameter, dist(state.velocity(i), state.velocity(k)));
        if (d >= 2)
            rec.max_abs_second_component =
                std::max(rec.max_abs_second_component, std::abs(state.velocity(i)[1]));
    }
    rec.dissipation =
        -config.coupling / (2.0 * static_cast<double>(n)) * dissipation_sum;

    if (config.manifold.kind == ManifoldKind::MobiusStrip) {
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(state.position(i)[1]) >= config.thresholds.strip_bound)
                rec.strip_bound_violated = true;
    }
    return rec;
}

DiagnosticsRecord record(const ParticleState& state, const SimConfig& config) {
    return record_from_weights(state, config, pair_weight_table(state, config));
}

namespace {

MetricTrend fit_trend(const std::vector<DiagnosticsRecord>& records,
                      double (*metric)(const DiagnosticsRecord&), double threshold) {
    MetricTrend t;
    t.final_value = metric(records.back());
    t.below_threshold = t.final_value < threshold;

    const std::size_t n = records.size();
    const std::size_t begin = n / 2;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const auto m = static_cast<double>(n - begin);
    for (std::size_t i = begin; i < n; ++i) {
        const double ti = records[i].time;
        const double yi = std::log(std::max(metric(records[i]), 1e-300));
        st += ti;
        sy += yi;
        stt += ti * ti;
        sty += ti * yi;
    }
    const double denom = m * stt - st * st;
    t.log_slope = denom != 0.0 ? (m * sty - st * sy) / denom : 0.0;
    return t;
}

}  // namespace

StationarityReport stationarity_probe(const SimConfig& config,
                                      const std::vector<DiagnosticsRecord>& records) {
    if (records.size() < 2)
        throw std::invalid_argument("stationarity_probe: need at least 2 records");
    StationarityReport rep;
    rep.velocity_diameter = fit_trend(
        records, [](const DiagnosticsRecord& r) { return r.velocity_diameter; },
        config.thresholds.velocity_diameter);
    rep.alignment_residual = fit_trend(
        records, [](const DiagnosticsRecord& r) { return r.max_alignment_residual; },
        config.thresholds.alignment_residual);
    rep.second_component = fit_trend(
        records, [](const DiagnosticsRecord& r) { return r.max_abs_second_component; },
        config.thresholds.second_component);

    rep.self_interaction_possible =
        config.manifold.has_flip_classes() && evaluate(config.kernel, 1.0) > 0.0;

    rep.all_claims_met = rep.velocity_diameter.below_threshold &&
                         rep.alignment_residual.below_threshold &&
                         (!config.manifold.has_flip_classes() ||
                          rep.second_component.below_threshold);
    return rep;
}

SimulationRun simulate(const SimConfig& config) {
    SimulationRun run;
    integrate(config, [&](const ParticleState& st) {
        run.states.push_back(st);
        run.records.push_back(record(st, config));
    });
    return run;
}

}  // namespace covercs
