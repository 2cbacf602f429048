// covercs: simulator for a Cucker-Smale velocity-alignment model on flat
// quotient manifolds (Euclidean space, flat torus, flat Mobius strip, flat
// Klein bottle) where each pair of particles interacts through every geodesic
// between them, realized on the universal cover.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covercs/config.hpp"
#include "covercs/latsum.hpp"
#include "covercs/oracle.hpp"
#include "covercs/runner.hpp"

namespace {

covercs::Vec parse_point(const std::string& text, int dimension) {
    covercs::Vec p;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (!cur.empty()) p.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (static_cast<int>(p.size()) != dimension)
        throw std::runtime_error("expected " + std::to_string(dimension) +
                                 " comma-separated coordinates, got '" + text + "'");
    return p;
}

covercs::SimConfig load_config(const std::string& config_path, const std::string& preset) {
    if (!preset.empty() && !config_path.empty())
        throw std::runtime_error("pass either --config or --preset, not both");
    if (!preset.empty()) return covercs::preset_config(preset);
    if (!config_path.empty()) return covercs::parse_config_file(config_path);
    throw std::runtime_error("one of --config or --preset is required");
}

int cmd_run(const std::string& config_path, const std::string& preset, const std::string& out_dir,
            bool assert_claims, int lanes, const std::string& simd) {
    covercs::SimConfig config = load_config(config_path, preset);
    if (lanes > 0) config.lanes = lanes;
    if (simd == "scalar")
        covercs::latsum::force_backend(covercs::latsum::Backend::Scalar);

    covercs::RunOptions opts;
    opts.assert_claims = assert_claims;
    const covercs::RunOutcome outcome = covercs::run_simulation(config, out_dir, opts);

    std::printf("series:   %s\n", outcome.series_path.c_str());
    if (!outcome.particles_path.empty())
        std::printf("particles: %s\n", outcome.particles_path.c_str());
    std::printf("manifest: %s\n", outcome.manifest_path.c_str());
    if (outcome.exit_code == 3) {
        std::printf("aborted: non-finite state\n");
        return 3;
    }
    std::printf("final: t=%.17g energy=%.17g velocity_diameter=%.17g max_abs_v2=%.17g\n",
                outcome.final_record.time, outcome.final_record.energy,
                outcome.final_record.velocity_diameter,
                outcome.final_record.max_abs_second_component);
    std::printf("claims met: %s\n", outcome.claims.all_claims_met ? "yes" : "no");
    return outcome.exit_code;
}

int cmd_validate_kernel(const std::string& config_path, const std::string& preset) {
    // lenient load: report on kernels a full config would reject
    covercs::ManifoldSpec m;
    covercs::Kernel k;
    double strip_bound = 2.0;
    if (!preset.empty()) {
        const covercs::SimConfig config = load_config("", preset);
        m = config.manifold;
        k = config.kernel;
        strip_bound = config.thresholds.strip_bound;
    } else if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config file: " + config_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::tie(m, k) = covercs::parse_manifold_kernel(buf.str());
    } else {
        throw std::runtime_error("one of --config or --preset is required");
    }

    const int rank = covercs::summability_rank(m);
    std::printf("kernel: %s\n", covercs::to_string(k.family).c_str());
    std::printf("manifold: %s (dimension %d, lattice rank %d)\n",
                covercs::to_string(m.kind).c_str(), m.dimension, rank);
    if (rank == 0) {
        std::printf("summable: yes (single geodesic per pair, no orbit sum)\n");
        return 0;
    }
    const covercs::SummabilityReport rep = covercs::check_condition_A(k, rank);
    if (!rep.summable) {
        std::printf("summable: NO — integral test at rank %d fails "
                    "(int_0^inf r^%d phi(r) dr diverges; power law needs alpha > %g)\n",
                    rank, rank - 1, 0.5 * rank);
        return 1;
    }
    std::printf("summable: yes, int_0^inf r^%d phi(r) dr = %.12g\n", rank - 1, *rep.integral);

    const double d = m.dimension;
    switch (m.kind) {
        case covercs::ManifoldKind::FlatTorus: {
            const double r = std::sqrt(d) / 2.0;
            std::printf("alignment weight phi(sqrt(d)/2) = phi(%.9g) = %.9g\n", r,
                        covercs::evaluate(k, r));
            break;
        }
        case covercs::ManifoldKind::KleinBottle: {
            const double r = std::sqrt(5.0) / 2.0;
            std::printf("alignment weight phi(sqrt(5)/2) = phi(%.9g) = %.9g\n", r,
                        covercs::evaluate(k, r));
            std::printf("self-interaction weight phi(1) = %.9g%s\n", covercs::evaluate(k, 1.0),
                        covercs::evaluate(k, 1.0) > 0.0 ? "" : "  (no self-interaction effect)");
            break;
        }
        case covercs::ManifoldKind::MobiusStrip: {
            const double L = strip_bound;
            const double r = std::sqrt(1.0 + 4.0 * L * L);
            std::printf("alignment weight phi(sqrt(1+4L^2)) = phi(%.9g) = %.9g (L = %g)\n", r,
                        covercs::evaluate(k, r), L);
            std::printf("self-interaction weight phi(1) = %.9g%s\n", covercs::evaluate(k, 1.0),
                        covercs::evaluate(k, 1.0) > 0.0 ? "" : "  (no self-interaction effect)");
            break;
        }
        default: break;
    }
    return 0;
}

int cmd_oracle_phi(const std::string& config_path, const std::string& preset,
                   const std::string& xs, const std::string& ys, int window) {
    const covercs::SimConfig config = load_config(config_path, preset);
    const covercs::Vec x = parse_point(xs, config.manifold.dimension);
    const covercs::Vec y = parse_point(ys, config.manifold.dimension);
    const double v = covercs::oracle_phi(config.manifold, config.kernel, x, y, window);
    std::printf("%.17g\n", v);
    return 0;
}

int cmd_presets(const std::string& dump) {
    if (!dump.empty()) {
        std::printf("%s\n", covercs::preset_json(dump).c_str());
        return 0;
    }
    for (const std::string& name : covercs::preset_names())
        std::printf("%s\n", name.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covercs: all-geodesic Cucker-Smale dynamics on flat quotient manifolds"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir = "out", xs, ys, dump, simd = "auto";
    bool assert_claims = false;
    int lanes = 0, window = 200;

    auto* run = app.add_subcommand("run", "simulate a config or preset and write series/manifest");
    run->add_option("--config", config_path, "config JSON path");
    run->add_option("--preset", preset, "shipped preset name");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--assert-claims", assert_claims,
                  "exit 2 if the run misses its claim thresholds");
    run->add_option("--lanes", lanes, "parallel evaluation lanes (default: config value)");
    run->add_option("--simd", simd, "auto|scalar inner-loop backend")
        ->check(CLI::IsMember({"auto", "scalar"}));

    auto* vk = app.add_subcommand("validate-kernel", "summability and alignment weights");
    vk->add_option("--config", config_path, "config JSON path");
    vk->add_option("--preset", preset, "shipped preset name");

    auto* op = app.add_subcommand("oracle-phi", "brute-force orbit sum (independent oracle)");
    op->add_option("--config", config_path, "config JSON path");
    op->add_option("--preset", preset, "shipped preset name");
    op->add_option("--x", xs, "source point, comma separated")->required();
    op->add_option("--y", ys, "target point, comma separated")->required();
    op->add_option("--window", window, "translation window (default 200)");

    auto* pr = app.add_subcommand("presets", "list shipped presets");
    pr->add_option("--dump", dump, "print one preset's JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, preset, out_dir, assert_claims, lanes, simd);
        if (vk->parsed()) return cmd_validate_kernel(config_path, preset);
        if (op->parsed()) return cmd_oracle_phi(config_path, preset, xs, ys, window);
        if (pr->parsed()) return cmd_presets(dump);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
