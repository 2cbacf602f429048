// Scalar diagnostics tracking the quantities that appear in the convergence
// statements: energy, its dissipation rate, velocity diameter, the second
// velocity component (the quantity driven to zero by the flip classes on the
// Mobius strip and Klein bottle), momentum, and per-pair alignment residuals.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "covercs/dynamics.hpp"

namespace covercs {

struct DiagnosticsRecord {
    double time = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;  // <= 0 up to truncation error
    double velocity_diameter = 0.0;
    double max_abs_second_component = 0.0;  // 0 when dimension == 1
    Vec momentum;
    double max_alignment_residual = 0.0;
    bool strip_bound_violated = false;  // Mobius strip only
};

// sum over the truncated orbit of phi(dist(x_i, g(x_k))) |J^flip v_k - v_i|^2.
double alignment_residual(const ParticleState& state, const SimConfig& config, std::size_t i,
                          std::size_t k);

// The flip-0 / flip-1 split of the residual; their sum reconstructs
// alignment_residual exactly (same weights). Mobius/Klein only.
std::pair<double, double> class_split_residuals(const ParticleState& state,
                                                const SimConfig& config, std::size_t i,
                                                std::size_t k);

DiagnosticsRecord record(const ParticleState& state, const SimConfig& config);
// Same, over an existing weight table (shared with the force assembly so the
// dissipation identity holds over identical truncated sums).
DiagnosticsRecord record_from_weights(const ParticleState& state, const SimConfig& config,
                                      const PairWeightTable& table);

struct MetricTrend {
    double final_value = 0.0;
    double log_slope = 0.0;  // least-squares slope of log(metric) over the last half
    bool below_threshold = false;
};

struct StationarityReport {
    MetricTrend velocity_diameter;
    MetricTrend alignment_residual;
    MetricTrend second_component;
    // Whether nontrivial closed geodesics can act on velocities at all:
    // requires flip classes and phi(1) > 0 (the shortest flipped self-distance
    // is at least 1, so phi(1) = 0 shuts the effect off).
    bool self_interaction_possible = false;
    bool all_claims_met = false;
};

StationarityReport stationarity_probe(const SimConfig& config,
                                      const std::vector<DiagnosticsRecord>& records);

struct SimulationRun {
    std::vector<ParticleState> states;
    std::vector<DiagnosticsRecord> records;
};

// integrate() plus a diagnostics record per observed state.
SimulationRun simulate(const SimConfig& config);

}  // namespace covercs
