#include "covercs/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "covercs/config.hpp"

namespace covercs {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json record_to_json(int dimension, const DiagnosticsRecord& r) {
    json j;
    j["t"] = r.time;
    j["energy"] = r.energy;
    j["dissipation"] = r.dissipation;
    j["velocity_diameter"] = r.velocity_diameter;
    j["max_abs_v2"] = r.max_abs_second_component;
    j["momentum"] = r.momentum;
    j["max_alignment_residual"] = r.max_alignment_residual;
    j["strip_bound_violated"] = r.strip_bound_violated;
    j["dimension"] = dimension;
    return j;
}

json trend_to_json(const MetricTrend& t) {
    return {{"final", t.final_value},
            {"log_slope", t.log_slope},
            {"below_threshold", t.below_threshold}};
}

}  // namespace

std::string format_series_csv(int dimension, const std::vector<DiagnosticsRecord>& records) {
    std::string out = "t,energy,dissipation,velocity_diameter,max_abs_v2";
    for (int j = 1; j <= dimension; ++j) out += ",momentum_" + std::to_string(j);
    out += ",max_alignment_residual,strip_bound_violated\n";
    for (const DiagnosticsRecord& r : records) {
        out += fmt17(r.time);
        out += ',';
        out += fmt17(r.energy);
        out += ',';
        out += fmt17(r.dissipation);
        out += ',';
        out += fmt17(r.velocity_diameter);
        out += ',';
        out += fmt17(r.max_abs_second_component);
        for (int j = 0; j < dimension; ++j) {
            out += ',';
            out += fmt17(r.momentum[j]);
        }
        out += ',';
        out += fmt17(r.max_alignment_residual);
        out += ',';
        out += r.strip_bound_violated ? '1' : '0';
        out += '\n';
    }
    return out;
}

RunOutcome run_simulation(const SimConfig& config, const std::string& out_dir,
                          const RunOptions& opts) {
    namespace fs = std::filesystem;
    config.validate();
    fs::create_directories(out_dir);

    RunOutcome outcome;
    outcome.series_path = (fs::path(out_dir) / "series.csv").string();
    outcome.manifest_path = (fs::path(out_dir) / "manifest.json").string();

    const auto t0 = std::chrono::steady_clock::now();
    SimulationRun run;
    bool aborted = false;
    double abort_time = 0.0;
    try {
        run = simulate(config);
    } catch (const NonFiniteStateError& e) {
        aborted = true;
        abort_time = e.time;
    }
    outcome.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    manifest["version"] = kArtifactVersion;
    manifest["config"] = json::parse(config_to_json(config));
    manifest["duration_seconds"] = outcome.duration_seconds;

    if (aborted) {
        outcome.exit_code = 3;
        manifest["error"] = "non-finite state at t = " + fmt17(abort_time);
        std::ofstream(outcome.manifest_path) << manifest.dump(2) << '\n';
        return outcome;
    }

    {
        std::ofstream series(outcome.series_path, std::ios::binary);
        series << format_series_csv(config.manifold.dimension, run.records);
    }

    if (config.output_particles) {
        outcome.particles_path = (fs::path(out_dir) / "particles.jsonl").string();
        std::ofstream jsonl(outcome.particles_path, std::ios::binary);
        for (const ParticleState& st : run.states) {
            json line;
            line["t"] = st.time;
            json xs = json::array(), vs = json::array(), projected = json::array();
            for (std::size_t i = 0; i < st.count; ++i) {
                xs.push_back(Vec(st.position(i).begin(), st.position(i).end()));
                vs.push_back(Vec(st.velocity(i).begin(), st.velocity(i).end()));
                const auto [px, pv] = project_to_fundamental_domain(
                    config.manifold, st.position(i), st.velocity(i));
                projected.push_back(px);
            }
            line["x_lift"] = xs;
            line["v"] = vs;
            line["x"] = projected;
            jsonl << line.dump() << '\n';
        }
    }

    outcome.final_record = run.records.back();
    if (run.records.size() >= 2) {
        outcome.claims = stationarity_probe(config, run.records);
    } else {
        // T = 0 runs carry a single record; report finals with no trend fit.
        const DiagnosticsRecord& r = run.records.back();
        outcome.claims.velocity_diameter = {r.velocity_diameter, 0.0,
                                            r.velocity_diameter <
                                                config.thresholds.velocity_diameter};
        outcome.claims.alignment_residual = {r.max_alignment_residual, 0.0,
                                             r.max_alignment_residual <
                                                 config.thresholds.alignment_residual};
        outcome.claims.second_component = {r.max_abs_second_component, 0.0,
                                           r.max_abs_second_component <
                                               config.thresholds.second_component};
        outcome.claims.self_interaction_possible =
            config.manifold.has_flip_classes() && evaluate(config.kernel, 1.0) > 0.0;
        outcome.claims.all_claims_met = outcome.claims.velocity_diameter.below_threshold &&
                                        outcome.claims.alignment_residual.below_threshold &&
                                        (!config.manifold.has_flip_classes() ||
                                         outcome.claims.second_component.below_threshold);
    }

    manifest["outputs"] = {{"series", outcome.series_path},
                           {"manifest", outcome.manifest_path}};
    if (!outcome.particles_path.empty()) manifest["outputs"]["particles"] = outcome.particles_path;
    manifest["final_record"] = record_to_json(config.manifold.dimension, outcome.final_record);
    manifest["claims"] = {{"velocity_diameter", trend_to_json(outcome.claims.velocity_diameter)},
                          {"alignment_residual", trend_to_json(outcome.claims.alignment_residual)},
                          {"second_component", trend_to_json(outcome.claims.second_component)},
                          {"self_interaction_possible", outcome.claims.self_interaction_possible},
                          {"all_claims_met", outcome.claims.all_claims_met}};
    std::ofstream(outcome.manifest_path) << manifest.dump(2) << '\n';

    if (opts.assert_claims && !outcome.claims.all_claims_met) outcome.exit_code = 2;
    return outcome;
}

}  // namespace covercs
