#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "aniso/config.hpp"

namespace aniso {

struct RunOptions {
    std::string mode;  // solve | ladder | verify | norms
    std::string config_path;
    std::string out_dir;  // empty: use the config's output_dir
    std::optional<std::uint64_t> seed;
    std::optional<int> grid_nodes;
};

// Exit codes: 0 success, 1 config error, 2 solver non-convergence,
// 3 internal invariant breach.
int run(const RunOptions& opts, std::ostream& log);

int run_mode(const std::string& mode, const Config& cfg, std::ostream& log);

}  // namespace aniso
