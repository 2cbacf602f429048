// Run orchestration: simulate a config, emit series.csv (fixed column order,
// 17 significant digits), optional particles.jsonl, and manifest.json with
// everything needed to re-run deterministically.
#pragma once

#include <string>

#include "covercs/diagnostics.hpp"

namespace covercs {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunOptions {
    bool assert_claims = false;
};

struct RunOutcome {
    // 0: success; 2: claim thresholds missed under --assert-claims;
    // 3: non-finite state abort.
    int exit_code = 0;
    std::string manifest_path;
    std::string series_path;
    std::string particles_path;  // empty unless requested
    DiagnosticsRecord final_record;
    StationarityReport claims;
    double duration_seconds = 0.0;
};

RunOutcome run_simulation(const SimConfig& config, const std::string& out_dir,
                          const RunOptions& opts);

// CSV columns, in order: t, energy, dissipation, velocity_diameter,
// max_abs_v2, momentum_1..momentum_d, max_alignment_residual,
// strip_bound_violated. Floats use 17 significant digits.
std::string format_series_csv(int dimension, const std::vector<DiagnosticsRecord>& records);

}  // namespace covercs
