#include "covercs/config.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace covercs {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw std::runtime_error(path + ": " + msg);
}

const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path + "." + key, "missing required field");
    return j.at(key);
}

double need_number(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double opt_number(const json& j, const std::string& path, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::string need_string(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

ManifoldSpec parse_manifold(const json& j) {
    ManifoldSpec m;
    const std::string kind = need_string(j, "manifold", "kind");
    static const std::map<std::string, ManifoldKind> kinds = {
        {"euclidean", ManifoldKind::Euclidean},
        {"flat_torus", ManifoldKind::FlatTorus},
        {"mobius_strip", ManifoldKind::MobiusStrip},
        {"klein_bottle", ManifoldKind::KleinBottle},
    };
    const auto it = kinds.find(kind);
    if (it == kinds.end())
        fail("manifold.kind", "unknown kind '" + kind +
                                  "' (euclidean|flat_torus|mobius_strip|klein_bottle)");
    m.kind = it->second;
    m.dimension = static_cast<int>(opt_number(j, "manifold", "dimension", 2.0));
    try {
        m.validate();
    } catch (const std::exception& e) {
        fail("manifold", e.what());
    }
    return m;
}

Kernel parse_kernel(const json& j) {
    const std::string family = need_string(j, "kernel", "family");
    try {
        if (family == "exponential")
            return Kernel::exponential(need_number(j, "kernel", "lambda"));
        if (family == "power_law") return Kernel::power_law(need_number(j, "kernel", "alpha"));
        if (family == "compact_bump") return Kernel::bump(need_number(j, "kernel", "support"));
        if (family == "compact_polynomial") {
            const json& coeffs = need(j, "kernel", "coefficients");
            if (!coeffs.is_array() || coeffs.empty())
                fail("kernel.coefficients", "expected a non-empty array");
            std::vector<double> c;
            for (const auto& v : coeffs) c.push_back(v.get<double>());
            return Kernel::compact_polynomial(need_number(j, "kernel", "support"), std::move(c));
        }
    } catch (const std::invalid_argument& e) {
        fail("kernel", e.what());
    }
    fail("kernel.family", "unknown family '" + family +
                              "' (exponential|power_law|compact_polynomial|compact_bump)");
}

std::vector<Vec> parse_point_list(const json& j, const std::string& path, int dimension) {
    if (!j.is_array()) fail(path, "expected an array of points");
    std::vector<Vec> out;
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != dimension)
            fail(path, "each point must list exactly " + std::to_string(dimension) +
                           " coordinates");
        Vec p;
        for (const auto& v : row) p.push_back(v.get<double>());
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }
    SimConfig c;
    c.manifold = parse_manifold(need(j, "", "manifold"));
    c.kernel = parse_kernel(need(j, "", "kernel"));

    c.coupling = opt_number(j, "", "coupling", 1.0);
    if (!(c.coupling > 0.0)) fail("coupling", "must be > 0");
    c.particle_count = static_cast<int>(opt_number(j, "", "n_particles", 1.0));
    c.time_step = opt_number(j, "", "dt", 1e-2);
    c.horizon = opt_number(j, "", "horizon", 1.0);
    c.truncation_eps = opt_number(j, "", "truncation_eps", 1e-9);
    c.seed = static_cast<std::uint64_t>(opt_number(j, "", "seed", 12345.0));
    c.lanes = static_cast<int>(opt_number(j, "", "lanes", 1.0));

    const std::string integ =
        j.contains("integrator") ? j.at("integrator").get<std::string>() : "rk4";
    if (integ == "rk4")
        c.integrator = Integrator::RK4;
    else if (integ == "euler")
        c.integrator = Integrator::Euler;
    else
        fail("integrator", "expected 'rk4' or 'euler'");

    if (j.contains("initial")) {
        const json& ini = j.at("initial");
        const std::string mode =
            ini.contains("mode") ? ini.at("mode").get<std::string>() : "sample";
        if (mode == "sample") {
            c.initial.mode = InitialData::Mode::Sample;
            c.initial.strip_half_width =
                opt_number(ini, "initial", "strip_half_width", 1.0);
        } else if (mode == "explicit") {
            c.initial.mode = InitialData::Mode::Explicit;
            c.initial.positions = parse_point_list(need(ini, "initial", "positions"),
                                                   "initial.positions", c.manifold.dimension);
            c.initial.velocities = parse_point_list(need(ini, "initial", "velocities"),
                                                    "initial.velocities", c.manifold.dimension);
        } else {
            fail("initial.mode", "expected 'sample' or 'explicit'");
        }
    }

    if (j.contains("output")) {
        const json& out = j.at("output");
        c.output_stride = static_cast<int>(opt_number(out, "output", "stride", 10.0));
        if (out.contains("particles")) c.output_particles = out.at("particles").get<bool>();
    }

    if (j.contains("thresholds")) {
        const json& th = j.at("thresholds");
        c.thresholds.velocity_diameter =
            opt_number(th, "thresholds", "velocity_diameter", c.thresholds.velocity_diameter);
        c.thresholds.alignment_residual =
            opt_number(th, "thresholds", "alignment_residual", c.thresholds.alignment_residual);
        c.thresholds.second_component =
            opt_number(th, "thresholds", "second_component", c.thresholds.second_component);
        c.thresholds.strip_bound =
            opt_number(th, "thresholds", "strip_bound", c.thresholds.strip_bound);
    }

    try {
        c.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    return c;
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::pair<ManifoldSpec, Kernel> parse_manifold_kernel(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }
    return {parse_manifold(need(j, "", "manifold")), parse_kernel(need(j, "", "kernel"))};
}

std::string config_to_json(const SimConfig& c) {
    json j;
    j["manifold"] = {{"kind", to_string(c.manifold.kind)}, {"dimension", c.manifold.dimension}};
    switch (c.kernel.family) {
        case KernelFamily::Exponential:
            j["kernel"] = {{"family", "exponential"}, {"lambda", c.kernel.lambda}};
            break;
        case KernelFamily::PowerLaw:
            j["kernel"] = {{"family", "power_law"}, {"alpha", c.kernel.alpha}};
            break;
        case KernelFamily::CompactPolynomial:
            j["kernel"] = {{"family", "compact_polynomial"},
                           {"support", c.kernel.support},
                           {"coefficients", c.kernel.coefficients}};
            break;
    }
    j["coupling"] = c.coupling;
    j["n_particles"] = c.particle_count;
    j["dt"] = c.time_step;
    j["horizon"] = c.horizon;
    j["truncation_eps"] = c.truncation_eps;
    j["integrator"] = c.integrator == Integrator::RK4 ? "rk4" : "euler";
    j["seed"] = c.seed;
    j["lanes"] = c.lanes;
    if (c.initial.mode == InitialData::Mode::Sample) {
        j["initial"] = {{"mode", "sample"}, {"strip_half_width", c.initial.strip_half_width}};
    } else {
        j["initial"] = {{"mode", "explicit"},
                        {"positions", c.initial.positions},
                        {"velocities", c.initial.velocities}};
    }
    j["output"] = {{"stride", c.output_stride}, {"particles", c.output_particles}};
    j["thresholds"] = {{"velocity_diameter", c.thresholds.velocity_diameter},
                       {"alignment_residual", c.thresholds.alignment_residual},
                       {"second_component", c.thresholds.second_component},
                       {"strip_bound", c.thresholds.strip_bound}};
    return j.dump(2);
}

namespace {

const std::map<std::string, const char*>& presets() {
    static const std::map<std::string, const char*> p = {
        {"euclid-cs", R"({
  "manifold": {"kind": "euclidean", "dimension": 2},
  "kernel": {"family": "exponential", "lambda": 1.0},
  "coupling": 1.0, "n_particles": 5, "dt": 0.01, "horizon": 20.0,
  "truncation_eps": 1e-9, "integrator": "rk4", "seed": 2024,
  "initial": {"mode": "sample"}, "output": {"stride": 10}
})"},
        {"torus-align", R"({
  "manifold": {"kind": "flat_torus", "dimension": 2},
  "kernel": {"family": "power_law", "alpha": 2.0},
  "coupling": 1.0, "n_particles": 5, "dt": 0.01, "horizon": 50.0,
  "truncation_eps": 1e-9, "integrator": "rk4", "seed": 7,
  "initial": {"mode": "sample"}, "output": {"stride": 10},
  "thresholds": {"velocity_diameter": 1e-4, "alignment_residual": 1e-6}
})"},
        {"torus-reduction", R"({
  "manifold": {"kind": "flat_torus", "dimension": 1},
  "kernel": {"family": "compact_bump", "support": 0.45},
  "coupling": 1.0, "n_particles": 4, "dt": 0.01, "horizon": 10.0,
  "truncation_eps": 1e-9, "integrator": "rk4", "seed": 11,
  "initial": {"mode": "sample"}, "output": {"stride": 10}
})"},
        {"mobius-align", R"({
  "manifold": {"kind": "mobius_strip", "dimension": 2},
  "kernel": {"family": "exponential", "lambda": 1.0},
  "coupling": 1.0, "n_particles": 4, "dt": 0.01, "horizon": 50.0,
  "truncation_eps": 1e-9, "integrator": "rk4", "seed": 3,
  "initial": {"mode": "sample", "strip_half_width": 0.5},
  "output": {"stride": 10},
  "thresholds": {"strip_bound": 2.0}
})"},
        {"mobius-selfint", R"({
  "manifold": {"kind": "mobius_strip", "dimension": 2},
  "kernel": {"family": "exponential", "lambda": 1.0},
  "coupling": 1.0, "n_particles": 1, "dt": 0.01, "horizon": 30.0,
  "truncation_eps": 1e-9, "integrator": "rk4", "seed": 1,
  "initial": {"mode": "explicit", "positions": [[0.0, 0.0]], "velocities": [[0.0, 1.0]]},
  "output": {"stride": 10},
  "thresholds": {"strip_bound": 2.0}
})"},
        {"klein-align", R"({
  "manifold": {"kind": "klein_bottle", "dimension": 2},
  "kernel": {"family": "exponential", "lambda": 1.0},
  "coupling": 1.0, "n_particles": 4, "dt": 0.01, "horizon": 50.0,
  "truncation_eps": 1e-9, "integrator": "rk4", "seed": 5,
  "initial": {"mode": "sample"}, "output": {"stride": 10}
})"},
        {"klein-selfint", R"({
  "manifold": {"kind": "klein_bottle", "dimension": 2},
  "kernel": {"family": "exponential", "lambda": 1.0},
  "coupling": 1.0, "n_particles": 1, "dt": 0.01, "horizon": 30.0,
  "truncation_eps": 1e-9, "integrator": "rk4", "seed": 1,
  "initial": {"mode": "explicit", "positions": [[0.25, 0.25]], "velocities": [[0.0, 1.0]]},
  "output": {"stride": 10}
})"},
    };
    return p;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : presets()) names.push_back(name);
    return names;
}

std::string preset_json(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw std::runtime_error("unknown preset: " + name);
    return it->second;
}

SimConfig preset_config(const std::string& name) { return parse_config_text(preset_json(name)); }

}  // namespace covercs
