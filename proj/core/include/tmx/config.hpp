#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tmx/errors.hpp"

namespace tmx {

/// Resolved run configuration. Serializes to a flat "section.key = value" text
/// format (diff-friendly experiment logs); round-trips exactly. Every run
/// writes its resolved config next to its outputs.
struct RunConfig {
    std::string command;

    // mesh source: builtin disk/rect or a file path (exactly one)
    std::string mesh_kind = "disk";  // disk | rect | file
    int mesh_level = 4;
    double mesh_width = 1.0, mesh_height = 1.0;
    int mesh_nx = 8, mesh_ny = 8;
    std::string mesh_path;
    int mesh_refine = 0;  // extra refinements applied after load/build

    double lambda = 0.0;
    double p = 2.0;
    std::string variant = "without";

    double cg_tol = 1e-10;
    double el_tol = 1e-6;
    int max_iters = 5000;

    std::string seeds = "default";
    unsigned long long rng_seed = 12345;
    int stride = 0;

    double eps = 4.5399929762484854e-05;  // e^-10
    bool has_center = false;
    double center_x = 0.0, center_y = 0.0;

    double gamma = 6.0;
    bool E_auto = true;
    double E = 0.0;
    double delta = 0.5;

    std::string lambdas = "0,1,2,5";
    double bracket_lo = 10.0, bracket_hi = 200.0;
    double threshold_tol = 5.0;

    bool verify_quick = false;
    std::string verify_only;  // comma list of criterion ids

    std::string out_path;
    std::string save_field;

    std::string to_text() const;
    static RunConfig from_text(const std::string& text);
};

/// Parse argv (excluding program name handled by caller) into a resolved
/// config: defaults, then --config file values, then explicit flags.
/// Throws UsageError on bad input. Returns nullopt when help was requested
/// (help text goes to `out`).
std::optional<RunConfig> parse_args(const std::vector<std::string>& argv, std::ostream& out);

/// Execute a resolved config. Returns 0 on success, 1 on numerical failure
/// (diagnostic JSON written when an output path is configured).
int run(const RunConfig& config, std::ostream& log);

}  // namespace tmx
