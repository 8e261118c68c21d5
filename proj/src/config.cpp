#include "aniso/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "aniso/expr.hpp"
#include "aniso/kernels.hpp"

namespace aniso {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void position_from_offset(std::string_view text, std::size_t offset, int& line, int& column) {
    line = 1;
    column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
}

class Collector {
public:
    explicit Collector(std::vector<ConfigError>& errors) : errors_(errors) {}
    void add(const std::string& path, const std::string& message) {
        errors_.push_back({0, 0, path + ": " + message});
    }
    bool empty() const { return errors_.empty(); }

private:
    std::vector<ConfigError>& errors_;
};

template <typename T>
bool read_field(const json& j, const char* key, T& out, Collector& errs,
                const std::string& path) {
    if (!j.contains(key)) return true;
    try {
        out = j.at(key).get<T>();
        return true;
    } catch (const json::exception&) {
        errs.add(path + "." + key, "wrong type");
        return false;
    }
}

void check_known_keys(const json& j, std::initializer_list<const char*> known, Collector& errs,
                      const std::string& path) {
    if (!j.is_object()) {
        errs.add(path, "expected an object");
        return;
    }
    for (const auto& item : j.items()) {
        bool found = false;
        for (const char* k : known)
            if (item.key() == k) found = true;
        if (!found) errs.add(path + "." + item.key(), "unknown key");
    }
}

void check_expression(const std::string& text, int dim, bool flux_vars, Collector& errs,
                      const std::string& path) {
    try {
        const std::vector<std::string> vars =
            flux_vars ? flux_variables(dim) : field_variables(dim);
        (void)Expression::parse(text, vars);
    } catch (const ExprError& e) {
        errs.add(path, e.what());
    }
}

ExponentField materialize_exponent(const GridPtr& grid, const std::string& text) {
    const std::vector<std::string> vars = field_variables(grid->dim());
    const Expression e = Expression::parse(text, vars);
    std::vector<double> values(grid->total_nodes());
    std::vector<double> x(static_cast<std::size_t>(grid->dim()));
    for (std::size_t q = 0; q < values.size(); ++q) {
        grid->node_coords(q, x.data());
        values[q] = e.eval(x);
    }
    return ExponentField(grid, std::move(values));
}

GridFunction materialize_field(const GridPtr& grid, const std::string& text) {
    const std::vector<std::string> vars = field_variables(grid->dim());
    const Expression e = Expression::parse(text, vars);
    GridFunction f(grid);
    std::vector<double> x(static_cast<std::size_t>(grid->dim()));
    for (std::size_t q = 0; q < f.size(); ++q) {
        grid->node_coords(q, x.data());
        f[q] = e.eval(x);
    }
    return f;
}

void validate(const Config& c, std::vector<ConfigError>& errors) {
    Collector errs(errors);

    if (c.dim < 2 || c.dim > kernels::max_dim)
        errs.add("dim", "must be between 2 and " + std::to_string(kernels::max_dim));
    if (c.grid.nodes_per_axis < 3) errs.add("grid.nodes_per_axis", "need at least 3 nodes");

    if (c.radius_schedule.empty()) errs.add("radius_schedule", "must not be empty");
    for (std::size_t j = 0; j < c.radius_schedule.size(); ++j) {
        if (!(c.radius_schedule[j] > 0.0)) errs.add("radius_schedule", "radii must be positive");
        if (j > 0 && !(c.radius_schedule[j] > c.radius_schedule[j - 1]))
            errs.add("radius_schedule", "must be strictly increasing");
    }
    if (!errors.empty()) return;

    const double max_r = c.radius_schedule.back();
    if (c.grid.extent != 0.0 && c.grid.extent < max_r)
        errs.add("grid.extent", "must cover the largest rung radius");

    if (!(c.solver.tol > 0.0)) errs.add("solver.tol", "must be positive");
    if (c.solver.max_iter < 1) errs.add("solver.max_iter", "must be at least 1");
    if (c.solver.eps_flux < 0.0) errs.add("solver.eps_flux", "must be nonnegative");
    if (!(c.solver.damping_floor > 0.0) || c.solver.damping_floor > 1.0)
        errs.add("solver.damping_floor", "must lie in (0, 1]");

    if (!(c.diagnostics.core_radius > 0.0) ||
        c.diagnostics.core_radius >= c.radius_schedule.front())
        errs.add("diagnostics.core_radius", "must lie in (0, first rung radius)");
    if (c.diagnostics.samples < 1) errs.add("diagnostics.samples", "must be at least 1");
    for (double k : c.diagnostics.k_values)
        if (!(k > 0.0)) errs.add("diagnostics.k_values", "levels must be positive");
    for (double k : c.diagnostics.entropy_k_values)
        if (!(k > 0.0)) errs.add("diagnostics.entropy_k_values", "levels must be positive");

    if (static_cast<int>(c.p.size()) != c.dim)
        errs.add("exponents.p", "need exactly one expression per axis");

    static const std::set<std::string> models{"anisotropic_laplacian", "nonsign_lower_order",
                                              "broken_sign", "custom"};
    if (!models.contains(c.flux.model)) errs.add("flux.model", "unknown model name");
    if (!(c.flux.alpha > 0.0)) errs.add("flux.alpha", "must be positive");
    if (c.flux.model == "custom") {
        if (static_cast<int>(c.flux.a.size()) != c.dim)
            errs.add("flux.a", "need exactly one component per axis");
        for (std::size_t i = 0; i < c.flux.a.size(); ++i)
            check_expression(c.flux.a[i], c.dim, true, errs, "flux.a[" + std::to_string(i) + "]");
        if (!c.flux.H.empty()) check_expression(c.flux.H, c.dim, true, errs, "flux.H");
        if (!c.flux.c.empty() && static_cast<int>(c.flux.c.size()) != c.dim)
            errs.add("flux.c", "need one offset per axis (or none)");
        for (std::size_t i = 0; i < c.flux.c.size(); ++i)
            check_expression(c.flux.c[i], c.dim, false, errs, "flux.c[" + std::to_string(i) + "]");
        if (!(c.flux.a_hat > 0.0)) errs.add("flux.a_hat", "must be strictly positive");
        if (!(c.flux.h_hat > 0.0)) errs.add("flux.h_hat", "must be strictly positive");
    }
    check_expression(c.flux.h0, c.dim, false, errs, "flux.h0");
    check_expression(c.flux.q, c.dim, false, errs, "flux.q");
    check_expression(c.source, c.dim, false, errs, "source");
    check_expression(c.p0, c.dim, false, errs, "exponents.p0");
    for (std::size_t i = 0; i < c.p.size(); ++i)
        check_expression(c.p[i], c.dim, false, errs, "exponents.p[" + std::to_string(i) + "]");
    if (!c.diagnostics.embedding_q.empty())
        check_expression(c.diagnostics.embedding_q, c.dim, false, errs,
                         "diagnostics.embedding_q");
    if (!errors.empty()) return;

    // materialization checks: admissible class and p0 domination
    try {
        const GridPtr grid =
            make_grid(c.dim, resolved_extent(c), c.grid.nodes_per_axis, max_r);
        std::vector<ExponentField> dir;
        for (std::size_t i = 0; i < c.p.size(); ++i) {
            try {
                dir.push_back(materialize_exponent(grid, c.p[i]));
            } catch (const std::exception& e) {
                errs.add("exponents.p[" + std::to_string(i) + "]", e.what());
            }
        }
        std::optional<ExponentField> p0;
        try {
            p0 = materialize_exponent(grid, c.p0);
        } catch (const std::exception& e) {
            errs.add("exponents.p0", e.what());
        }
        if (p0.has_value() && dir.size() == c.p.size() && errs.empty()) {
            try {
                (void)ExponentVector(*p0, dir);
            } catch (const std::exception& e) {
                errs.add("exponents", e.what());
            }
        }
    } catch (const std::exception& e) {
        errs.add("grid", e.what());
    }
}

}  // namespace

double resolved_extent(const Config& c) {
    if (c.grid.extent != 0.0) return c.grid.extent;
    return c.radius_schedule.back() + 1.0;
}

ConfigParse parse_config(std::string_view text) {
    ConfigParse result;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 0, column = 0;
        position_from_offset(text, e.byte > 0 ? e.byte - 1 : 0, line, column);
        result.errors.push_back({line, column, e.what()});
        return result;
    }

    Config c;
    Collector errs(result.errors);
    check_known_keys(j, {"dim", "grid", "exponents", "flux", "source", "radius_schedule",
                         "solver", "diagnostics", "output_dir"},
                     errs, "config");
    read_field(j, "dim", c.dim, errs, "config");
    read_field(j, "source", c.source, errs, "config");
    read_field(j, "radius_schedule", c.radius_schedule, errs, "config");
    read_field(j, "output_dir", c.output_dir, errs, "config");
    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_known_keys(g, {"nodes_per_axis", "extent"}, errs, "grid");
        read_field(g, "nodes_per_axis", c.grid.nodes_per_axis, errs, "grid");
        read_field(g, "extent", c.grid.extent, errs, "grid");
    }
    if (j.contains("exponents")) {
        const json& g = j["exponents"];
        check_known_keys(g, {"p0", "p"}, errs, "exponents");
        read_field(g, "p0", c.p0, errs, "exponents");
        read_field(g, "p", c.p, errs, "exponents");
    }
    if (j.contains("flux")) {
        const json& g = j["flux"];
        check_known_keys(g, {"model", "alpha", "gamma", "q", "h0", "a", "H", "a_hat", "h_hat", "c"},
                         errs, "flux");
        read_field(g, "model", c.flux.model, errs, "flux");
        read_field(g, "alpha", c.flux.alpha, errs, "flux");
        read_field(g, "gamma", c.flux.gamma, errs, "flux");
        read_field(g, "q", c.flux.q, errs, "flux");
        read_field(g, "h0", c.flux.h0, errs, "flux");
        read_field(g, "a", c.flux.a, errs, "flux");
        read_field(g, "H", c.flux.H, errs, "flux");
        read_field(g, "a_hat", c.flux.a_hat, errs, "flux");
        read_field(g, "h_hat", c.flux.h_hat, errs, "flux");
        read_field(g, "c", c.flux.c, errs, "flux");
    }
    if (j.contains("solver")) {
        const json& g = j["solver"];
        check_known_keys(g, {"tol", "max_iter", "eps_flux", "damping_floor", "warm_start"}, errs,
                         "solver");
        read_field(g, "tol", c.solver.tol, errs, "solver");
        read_field(g, "max_iter", c.solver.max_iter, errs, "solver");
        read_field(g, "eps_flux", c.solver.eps_flux, errs, "solver");
        read_field(g, "damping_floor", c.solver.damping_floor, errs, "solver");
        read_field(g, "warm_start", c.solver.warm_start, errs, "solver");
    }
    if (j.contains("diagnostics")) {
        const json& g = j["diagnostics"];
        check_known_keys(g,
                         {"k_values", "h_values", "core_radius", "samples", "seed",
                          "entropy_test_functions", "entropy_k_values", "embedding_cap",
                          "embedding_q"},
                         errs, "diagnostics");
        read_field(g, "k_values", c.diagnostics.k_values, errs, "diagnostics");
        read_field(g, "h_values", c.diagnostics.h_values, errs, "diagnostics");
        read_field(g, "core_radius", c.diagnostics.core_radius, errs, "diagnostics");
        read_field(g, "samples", c.diagnostics.samples, errs, "diagnostics");
        read_field(g, "seed", c.diagnostics.seed, errs, "diagnostics");
        read_field(g, "entropy_test_functions", c.diagnostics.entropy_test_functions, errs,
                   "diagnostics");
        read_field(g, "entropy_k_values", c.diagnostics.entropy_k_values, errs, "diagnostics");
        read_field(g, "embedding_cap", c.diagnostics.embedding_cap, errs, "diagnostics");
        read_field(g, "embedding_q", c.diagnostics.embedding_q, errs, "diagnostics");
    }
    if (!result.errors.empty()) return result;

    validate(c, result.errors);
    if (result.errors.empty()) result.config = std::move(c);
    return result;
}

std::string emit_config(const Config& c) {
    ordered_json j;
    j["dim"] = c.dim;
    j["grid"] = {{"nodes_per_axis", c.grid.nodes_per_axis}, {"extent", c.grid.extent}};
    j["exponents"] = {{"p0", c.p0}, {"p", c.p}};
    j["flux"] = {{"model", c.flux.model}, {"alpha", c.flux.alpha}, {"gamma", c.flux.gamma},
                 {"q", c.flux.q},         {"h0", c.flux.h0},       {"a", c.flux.a},
                 {"H", c.flux.H},         {"a_hat", c.flux.a_hat}, {"h_hat", c.flux.h_hat},
                 {"c", c.flux.c}};
    j["source"] = c.source;
    j["radius_schedule"] = c.radius_schedule;
    j["solver"] = {{"tol", c.solver.tol},
                   {"max_iter", c.solver.max_iter},
                   {"eps_flux", c.solver.eps_flux},
                   {"damping_floor", c.solver.damping_floor},
                   {"warm_start", c.solver.warm_start}};
    j["diagnostics"] = {{"k_values", c.diagnostics.k_values},
                        {"h_values", c.diagnostics.h_values},
                        {"core_radius", c.diagnostics.core_radius},
                        {"samples", c.diagnostics.samples},
                        {"seed", c.diagnostics.seed},
                        {"entropy_test_functions", c.diagnostics.entropy_test_functions},
                        {"entropy_k_values", c.diagnostics.entropy_k_values},
                        {"embedding_cap", c.diagnostics.embedding_cap},
                        {"embedding_q", c.diagnostics.embedding_q}};
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

BuiltProblem build_problem(const Config& c) {
    std::vector<ConfigError> errors;
    validate(c, errors);
    if (!errors.empty()) throw std::invalid_argument(errors.front().message);

    BuiltProblem built;
    built.grid = make_grid(c.dim, resolved_extent(c), c.grid.nodes_per_axis,
                           c.radius_schedule.back());
    std::vector<ExponentField> dir;
    for (const std::string& expr : c.p) dir.push_back(materialize_exponent(built.grid, expr));
    built.exponents = std::make_shared<const ExponentVector>(
        materialize_exponent(built.grid, c.p0), std::move(dir));

    FluxModel flux;
    if (c.flux.model == "anisotropic_laplacian") {
        flux = model_anisotropic_laplacian(built.exponents, c.solver.eps_flux);
    } else if (c.flux.model == "nonsign_lower_order") {
        flux = model_nonsign_lower_order(built.exponents, c.solver.eps_flux, c.flux.gamma,
                                         materialize_exponent(built.grid, c.flux.q),
                                         materialize_field(built.grid, c.flux.h0));
    } else if (c.flux.model == "broken_sign") {
        flux = model_broken_sign(built.exponents);
    } else {  // custom
        flux.dim = c.dim;
        const std::vector<std::string> vars = flux_variables(c.dim);
        std::vector<Expression> a_exprs;
        for (const std::string& text : c.flux.a) a_exprs.push_back(Expression::parse(text, vars));
        const int dim = c.dim;
        flux.a = [a_exprs, dim](const Grid& g, std::size_t node, double s, const double* xi,
                                double* out) {
            std::vector<double> env(static_cast<std::size_t>(2 * dim + 1));
            g.node_coords(node, env.data());
            env[static_cast<std::size_t>(dim)] = s;
            for (int d = 0; d < dim; ++d) env[static_cast<std::size_t>(dim + 1 + d)] = xi[d];
            for (int d = 0; d < dim; ++d) out[d] = a_exprs[static_cast<std::size_t>(d)].eval(env);
        };
        if (c.flux.H.empty()) {
            flux.H = [](const Grid&, std::size_t, double, const double*) { return 0.0; };
        } else {
            const Expression h_expr = Expression::parse(c.flux.H, vars);
            flux.H = [h_expr, dim](const Grid& g, std::size_t node, double s, const double* xi) {
                std::vector<double> env(static_cast<std::size_t>(2 * dim + 1));
                g.node_coords(node, env.data());
                env[static_cast<std::size_t>(dim)] = s;
                for (int d = 0; d < dim; ++d) env[static_cast<std::size_t>(dim + 1 + d)] = xi[d];
                return h_expr.eval(env);
            };
        }
        const double a_hat = c.flux.a_hat;
        flux.a_hat.assign(static_cast<std::size_t>(dim), [a_hat](double) { return a_hat; });
        const double h_hat = c.flux.h_hat;
        flux.h_hat = [h_hat](double) { return h_hat; };
        flux.h_hat_const = h_hat;
        flux.h0 = materialize_field(built.grid, c.flux.h0);
        if (c.flux.c.empty()) {
            flux.c.assign(static_cast<std::size_t>(dim), GridFunction(built.grid, 0.0));
        } else {
            for (const std::string& text : c.flux.c)
                flux.c.push_back(materialize_field(built.grid, text));
        }
        flux.alpha = c.flux.alpha;
    }

    auto spec = std::make_shared<ProblemSpec>();
    spec->grid = built.grid;
    spec->exponents = built.exponents;
    spec->flux = std::move(flux);
    spec->f = materialize_field(built.grid, c.source);
    spec->radius_schedule = c.radius_schedule;
    spec->eps_flux = c.solver.eps_flux;
    built.spec = spec;
    return built;
}

}  // namespace aniso
