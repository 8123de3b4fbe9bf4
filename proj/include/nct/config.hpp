#pragma once

#include <string>
#include <vector>

#include "nct/langevin.hpp"
#include "nct/transport.hpp"

namespace nct {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Experiment description; parsed from JSON (schema documented in the README).
struct RunConfig {
    int d = 1;
    std::vector<int> N_grid;  // one or more dimensions
    TracePoly potential;
    SdeParams sde;
    int samples_per_traj = 1;
    bool gue_direct = false;  // estimate by direct GUE draws (requires W = 0)
    std::vector<std::string> observable_names;
    std::vector<TracePoly> observables;

    // transport block
    bool has_transport = false;
    TransportSpec transport;
    int transport_samples = 100;

    // strong-convergence block
    bool has_strong_conv = false;
    TracePoly strong_poly;
    std::vector<int> strong_N_grid;
    int strong_samples = 50;

    std::string canonical_json;  // echo of the parsed config, canonical form
    std::string hash;            // content hash of canonical_json

    RunConfig() : potential(quadratic_potential(1)), strong_poly(TracePoly::zero(1)) {}
};

RunConfig parse_config(const std::string& json_text);

struct ResultRow {
    std::string observable;
    int N = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    int M = 0;
};

struct RunOutput {
    std::vector<ResultRow> rows;
    std::string manifest_json;  // config echo, hash, command, timing, extras
};

// Drives one CLI-level command ("sample", "estimate", "transport",
// "pushforward-check", "strong-conv") against a parsed config.
RunOutput run_command(const std::string& command, const RunConfig& cfg);

// Fixed CSV surface: observable,N,mean,stderr,M
std::string rows_to_csv(const std::vector<ResultRow>& rows);

}  // namespace nct
