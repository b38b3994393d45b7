#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fracstefan/checks.hpp"

namespace fracstefan {

/// Piecewise-constant block: value on [lo, hi) per axis.
struct PieceSpec {
    Real lo[2] = {0, 0};
    Real hi[2] = {0, 0};
    Real value = 0.0;
};

struct MuSpec {
    std::string preset;           // "benchmark" = 2 * indicator of [-1,1]^d
    std::vector<PieceSpec> segments;
};

struct FSpec {
    std::string kind = "constant";  // constant | one_minus_indicator | segments
    Real constant = 1.0;
    PieceSpec box;                  // for one_minus_indicator (value ignored)
    std::vector<PieceSpec> segments;
    Real background = 1.0;
};

struct McConfig {
    Index N = 100000;
    Real dt = 0.0;        // 0: auto = pde dt / 4
    uint64_t seed = 42;
    int workers = 1;
    std::string type = "melt";  // barrier source for mode=mc
    bool trace = false;
};

struct RunConfig {
    std::string mode = "melt";  // melt | freeze | mc | validate | exit-law | tail
    GridSpec grid{1, 4.0, 512, 3.0};
    Real s = 0.4;
    Real dt = 1.0 / 256.0;
    Real horizon = 2.0;
    MuSpec mu;
    FSpec f;
    McConfig mc;
    Real extinction_threshold = 1e-4;
    Real exit_x0 = 0.0, exit_r = 1.0;
    Real tail_r = 1.0, tail_horizon = 5.0;
    std::vector<Real> slice_times;  // empty: default set
    std::map<std::string, Real> tolerances;
    std::filesystem::path out_dir = "out";

    uint64_t digest() const;
};

/// Parse + validate a JSON config file; errors carry the field path and the
/// violated rule. An empty object yields all defaults. mode_override, when
/// nonempty, replaces the file's mode before mode-dependent validation.
RunConfig parse_config(const std::filesystem::path& path,
                       const std::string& mode_override = "");
RunConfig parse_config_json(const std::string& text,
                            const std::string& mode_override = "");

/// Sample mu / f / G on the grid and assemble solver inputs.
ProblemData make_problem_data(const RunConfig& cfg);

/// Execute the configured mode, emit artifacts into cfg.out_dir.
/// Returns 0 on success (validate: 0 iff all checks pass).
int run(const RunConfig& cfg);

}  // namespace fracstefan
