#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfarey/gapstats.hpp"
#include "cfarey/limitdist.hpp"

namespace cfarey {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a command run depends on. Fully serialized into every output's
/// metadata so runs are reproducible from their files.
struct RunConfig {
    std::int64_t disc = -4;
    double height = 0;          // e^{t/2}; 0 = unset
    double t = -1;              // e^t parameterization; < 0 = unset
    std::string region;         // "u0,u1,v0,v1" or empty for the whole torus
    std::string deltaGrid = "1.0:8.0:0.05";
    std::string tailDeltas;     // grid of deltas for the tail decomposition
    std::string empiricalCdf;   // optional cdf csv to overlay in cmd_limit
    QuadratureConfig quad;
    std::string outDir = ".";
    std::string formats = "csv,json,svg";
    int threads = 0;            // 0 = runtime default
    std::int64_t maxPoints = 20000000;
};

/// "min:max:step" -> inclusive grid (tolerant right endpoint).
std::vector<double> parse_grid_spec(const std::string& spec);

/// Applies one config-file entry (keys named like the flags, without the
/// leading dashes). Unknown keys raise std::invalid_argument.
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value);

/// "u0,u1,v0,v1" -> Region; empty string -> whole torus.
Region parse_region(const std::string& spec);

bool format_enabled(const RunConfig& cfg, const std::string& fmt);

/// Provenance header: tool version plus the full configuration, one
/// key=value per line.
std::string metadata_header(const RunConfig& cfg, const std::string& command);

/// Applies cfg.threads to the OpenMP runtime (no-op when 0 or built serial).
void apply_threads(int threads);

// subcommands; return process exit codes (0 ok, 1 usage, 2 computation
// failure, 3 verification failure)
int cmd_enumerate(const RunConfig& cfg);
int cmd_gaps(const RunConfig& cfg);
int cmd_limit(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg, const std::string& suite);

} // namespace cfarey
