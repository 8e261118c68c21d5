#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aniso/flux.hpp"

namespace aniso {

struct GridConfig {
    int nodes_per_axis = 65;
    double extent = 0.0;  // 0 = auto: max(radius_schedule) + 1
    bool operator==(const GridConfig&) const = default;
};

struct FluxConfig {
    std::string model = "anisotropic_laplacian";  // nonsign_lower_order | broken_sign | custom
    double alpha = 1.0;
    double gamma = 0.0;       // nonsign_lower_order strength
    std::string q = "2";      // nonsign_lower_order gradient exponent
    std::string h0 = "0";     // L1 weight of the lower-order growth bound
    std::vector<std::string> a;  // custom flux components over x1..xN, s, xi1..xiN
    std::string H;               // custom lower-order term
    double a_hat = 1.0;          // declared growth envelope for custom models
    double h_hat = 1.0;
    std::vector<std::string> c;  // declared growth offsets for custom models
    bool operator==(const FluxConfig&) const = default;
};

struct SolverConfig {
    double tol = 1e-10;
    int max_iter = 200;
    double eps_flux = 1e-8;
    double damping_floor = 1e-4;
    bool warm_start = true;
    bool operator==(const SolverConfig&) const = default;
};

struct DiagnosticsConfig {
    std::vector<double> k_values{1.0, 2.0, 4.0, 8.0};
    std::vector<double> h_values{1.0, 2.0, 4.0};
    double core_radius = 2.0;
    long samples = 10000;
    std::uint64_t seed = 42;
    int entropy_test_functions = 50;
    std::vector<double> entropy_k_values{1.0, 4.0};
    double embedding_cap = 100.0;
    std::string embedding_q;  // empty: harmonic mean of the directional exponents
    bool operator==(const DiagnosticsConfig&) const = default;
};

struct Config {
    int dim = 2;
    GridConfig grid;
    std::string p0 = "2";
    std::vector<std::string> p{"2", "2"};
    FluxConfig flux;
    std::string source = "0";
    std::vector<double> radius_schedule{4.0};
    SolverConfig solver;
    DiagnosticsConfig diagnostics;
    std::string output_dir = "out";
    bool operator==(const Config&) const = default;
};

struct ConfigError {
    int line = 0;
    int column = 0;
    std::string message;
};

struct ConfigParse {
    std::optional<Config> config;
    std::vector<ConfigError> errors;
    bool ok() const { return config.has_value() && errors.empty(); }
};

// Parse + full validation, including materializing the exponent expressions
// on the configured grid (admissible-class and p0-domination checks).
ConfigParse parse_config(std::string_view text);

// Canonical serialization; parse_config(emit_config(c)) reproduces c exactly.
std::string emit_config(const Config& c);

// Materialized problem, ready for the solver and diagnostics.
struct BuiltProblem {
    GridPtr grid;
    std::shared_ptr<const ExponentVector> exponents;
    std::shared_ptr<const ProblemSpec> spec;
};
// Throws std::invalid_argument with a config-path message on semantic errors.
BuiltProblem build_problem(const Config& c);

double resolved_extent(const Config& c);

}  // namespace aniso
