#include "aniso/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aniso/diagnostics.hpp"
#include "aniso/expr.hpp"
#include "aniso/kernels.hpp"
#include "aniso/modular.hpp"
#include "aniso/util.hpp"

namespace aniso {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    return out;
}

GridFunction materialize(const GridPtr& grid, const std::string& text) {
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

void write_manifest(const std::filesystem::path& dir, const Config& cfg,
                    const std::string& mode, const nlohmann::ordered_json& outcome) {
    nlohmann::ordered_json m;
    m["config_hash"] = [&] {
        Config canon = cfg;
        canon.output_dir.clear();  // hash identifies the problem, not where results land
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a(emit_config(canon))));
        return std::string(buf);
    }();
    m["mode"] = mode;
    m["seed"] = cfg.diagnostics.seed;
    m["kernel_backend"] = kernels::active().name;
    m["tolerances"] = {{"solver_tol", cfg.solver.tol},
                       {"cg_tol_factor", 1e-2},
                       {"luxemburg_tol", luxemburg_default_tol},
                       {"luxemburg_max_iterations", luxemburg_max_iterations},
                       {"damping_floor", cfg.solver.damping_floor},
                       {"eps_flux", cfg.solver.eps_flux},
                       {"entropy_tol_factor", 10.0},
                       {"hypothesis_margin_rel", 1e-9},
                       {"embedding_cap", cfg.diagnostics.embedding_cap}};
    m["grid"] = {{"dim", cfg.dim},
                 {"nodes_per_axis", cfg.grid.nodes_per_axis},
                 {"extent", resolved_extent(cfg)}};
    m["outcome"] = outcome;
    open_out(dir / "run_manifest.json") << m.dump(2) << "\n";
}

void write_solve_report(const std::filesystem::path& p, const SolveReport& rep) {
    std::ofstream out = open_out(p);
    out << "iter,residual\n";
    for (std::size_t j = 0; j < rep.residual_history.size(); ++j)
        out << j << "," << fmt(rep.residual_history[j]) << "\n";
}

void write_energy_table(const std::filesystem::path& p,
                        const std::vector<EnergyEstimateRow>& rows) {
    std::ofstream out = open_out(p);
    out << "k,L(k),L(k)/k\n";
    for (const EnergyEstimateRow& r : rows)
        out << fmt_short(r.k) << "," << fmt(r.L) << "," << fmt(r.L_over_k) << "\n";
}

void write_decay_table(const std::filesystem::path& p, const std::vector<MeasureDecayRow>& rows) {
    std::ofstream out = open_out(p);
    out << "k,meas{|u|>k},meas*k^(pbar_minus-1)\n";
    for (const MeasureDecayRow& r : rows)
        out << fmt_short(r.k) << "," << fmt(r.meas) << "," << fmt(r.scaled) << "\n";
}

void write_equi_table(const std::filesystem::path& p, const std::vector<EquiTailRow>& rows) {
    std::ofstream out = open_out(p);
    out << "h,tail_lhs(h),data_tail(h)\n";
    for (const EquiTailRow& r : rows)
        out << fmt_short(r.h) << "," << fmt(r.tail_lhs) << "," << fmt(r.data_tail) << "\n";
}

int run_solve(const Config& cfg, const BuiltProblem& built, const std::filesystem::path& dir,
              std::ostream& log) {
    const double n = cfg.radius_schedule.back();
    const RegularizedProblem rp = make_regularized(built.spec, n);
    SolverParams params;
    params.tol = cfg.solver.tol;
    params.max_iter = cfg.solver.max_iter;
    params.damping_floor = cfg.solver.damping_floor;
    auto [u, rep] = solve(rp, GridFunction(rp.grid, 0.0), params);

    write_csv(u, (dir / "solution.csv").string());
    write_solve_report(dir / "solve_report.csv", rep);
    write_manifest(dir, cfg, "solve",
                   {{"rung", n},
                    {"converged", rep.converged},
                    {"iterations", rep.iterations},
                    {"final_residual", rep.final_residual},
                    {"damping_used", rep.damping_used},
                    {"note", rep.note}});
    log << "solve: rung n=" << fmt_short(n) << " converged=" << (rep.converged ? "yes" : "no")
        << " iterations=" << rep.iterations << " residual=" << fmt(rep.final_residual) << "\n";
    return rep.converged ? 0 : 2;
}

int run_ladder(const Config& cfg, const BuiltProblem& built, const std::filesystem::path& dir,
               std::ostream& log) {
    SolverParams params;
    params.tol = cfg.solver.tol;
    params.max_iter = cfg.solver.max_iter;
    params.damping_floor = cfg.solver.damping_floor;
    const double gap_k = cfg.diagnostics.entropy_k_values.empty()
                             ? 4.0
                             : cfg.diagnostics.entropy_k_values.back();
    const LadderReport rep =
        ladder_study(built.spec, cfg.diagnostics.core_radius, params, cfg.diagnostics.k_values,
                     cfg.diagnostics.h_values, gap_k, cfg.solver.warm_start);

    {
        std::ofstream out = open_out(dir / "ladder_summary.csv");
        out << "n,iterations,converged,final_residual,diff_from_prev,estimate_constant\n";
        for (std::size_t j = 0; j < rep.rungs.size(); ++j) {
            const RungRecord& r = rep.rungs[j];
            out << fmt_short(r.n) << "," << r.report.iterations << ","
                << (r.report.converged ? 1 : 0) << "," << fmt(r.report.final_residual) << ","
                << (j == 0 ? std::string("nan") : fmt(rep.diffs[j - 1])) << ","
                << fmt(r.estimate_constant) << "\n";
        }
    }
    for (const RungRecord& r : rep.rungs) {
        const std::string tag = "_n" + fmt_short(r.n);
        write_csv(r.solution, (dir / ("solution" + tag + ".csv")).string());
        write_solve_report(dir / ("solve_report" + tag + ".csv"), r.report);
        write_energy_table(dir / ("energy_estimate" + tag + ".csv"), r.energy);
        write_decay_table(dir / ("measure_decay" + tag + ".csv"), r.decay);
        write_equi_table(dir / ("equi_tail" + tag + ".csv"), r.equi);
    }
    {
        std::ofstream out = open_out(dir / "monotonicity_gap.csv");
        out << "n,gap_vs_finest\n";
        for (std::size_t j = 0; j + 1 < rep.rungs.size(); ++j)
            out << fmt_short(rep.rungs[j].n) << "," << fmt(rep.gap_vs_finest[j]) << "\n";
    }
    {
        const RegularizedProblem rp_fine = make_regularized(built.spec, rep.radii.back());
        const std::vector<EntropyCase> cases = entropy_sweep(
            rep.rungs.back().solution, rp_fine, cfg.diagnostics.entropy_k_values,
            cfg.diagnostics.entropy_test_functions, cfg.diagnostics.seed,
            cfg.diagnostics.core_radius);
        std::ofstream out = open_out(dir / "entropy_residuals.csv");
        out << "case,k,residual\n";
        for (const EntropyCase& c : cases)
            out << c.label << "," << fmt_short(c.k) << "," << fmt(c.residual) << "\n";
    }
    write_manifest(dir, cfg, "ladder",
                   {{"rungs", rep.radii},
                    {"all_converged", rep.all_converged},
                    {"estimate_constants", rep.estimate_constants}});
    log << "ladder: " << rep.rungs.size() << " rungs, all_converged="
        << (rep.all_converged ? "yes" : "no") << "\n";
    return rep.all_converged ? 0 : 2;
}

int run_verify(const Config& cfg, const BuiltProblem& built, const std::filesystem::path& dir,
               std::ostream& log) {
    const HypothesisReport rep = verify_hypotheses(built.spec->flux, *built.exponents,
                                                   cfg.diagnostics.samples, cfg.diagnostics.seed);
    std::ofstream out = open_out(dir / "verify_report.csv");
    out << "hypothesis,samples,violations,worst_margin\n";
    for (const HypothesisCheck* c :
         {&rep.growth, &rep.monotonicity, &rep.coercivity, &rep.lower_order}) {
        out << c->name << "," << rep.samples << "," << c->violations << ","
            << fmt(c->worst_margin) << "\n";
        log << "verify: " << c->name << " violations=" << c->violations << "\n";
    }
    write_manifest(dir, cfg, "verify",
                   {{"samples", rep.samples},
                    {"violations",
                     {{"growth", rep.growth.violations},
                      {"strict_monotonicity", rep.monotonicity.violations},
                      {"coercivity", rep.coercivity.violations},
                      {"lower_order_growth", rep.lower_order.violations}}}});
    return 0;
}

int run_norms(const Config& cfg, const BuiltProblem& built, const std::filesystem::path& dir,
              std::ostream& log) {
    const ExponentVector& pv = *built.exponents;
    const GridFunction f = built.spec->f;

    {
        const std::vector<GridFunction> grads = discrete_gradient(f);
        std::ofstream out = open_out(dir / "norms.csv");
        out << "field,modular_p0,luxemburg_p0,gradient_norms,anisotropic_norm\n";
        double grad_part = 0.0;
        for (int d = 0; d < pv.dim(); ++d)
            grad_part += luxemburg_norm(grads[static_cast<std::size_t>(d)], pv.p(d));
        const double lux = luxemburg_norm(f, pv.p0());
        out << "source," << fmt(modular(f, pv.p0())) << "," << fmt(lux) << ","
            << fmt(grad_part) << "," << fmt(lux + grad_part) << "\n";
    }
    {
        const ExponentField pbar = harmonic_mean_exponent(pv);
        const CriticalExponents ce = critical_exponents(pv);
        double star_min = INFINITY, star_max = -INFINITY, inf_min = INFINITY, inf_max = -INFINITY;
        for (std::size_t q = 0; q < ce.p_star.size(); ++q) {
            star_min = std::min(star_min, ce.p_star[q]);
            star_max = std::max(star_max, ce.p_star[q]);
            inf_min = std::min(inf_min, ce.p_inf[q]);
            inf_max = std::max(inf_max, ce.p_inf[q]);
        }
        std::ofstream out = open_out(dir / "exponents.csv");
        out << "name,min,max\n";
        out << "p0," << fmt(pv.p0().p_minus()) << "," << fmt(pv.p0().p_plus()) << "\n";
        for (int d = 0; d < pv.dim(); ++d)
            out << "p" << (d + 1) << "," << fmt(pv.p(d).p_minus()) << ","
                << fmt(pv.p(d).p_plus()) << "\n";
        out << "pbar," << fmt(pbar.p_minus()) << "," << fmt(pbar.p_plus()) << "\n";
        out << "pstar," << fmt(star_min) << "," << fmt(star_max) << "\n";
        out << "pinf," << fmt(inf_min) << "," << fmt(inf_max) << "\n";
    }
    {
        // bounded-grid embedding probe: ||u||_q / ||u||_{1,p} over random fields
        const GridPtr g = built.grid;
        ExponentField q_field = cfg.diagnostics.embedding_q.empty()
                                    ? harmonic_mean_exponent(pv)
                                    : [&] {
                                          const std::vector<std::string> vars =
                                              field_variables(g->dim());
                                          const Expression e = Expression::parse(
                                              cfg.diagnostics.embedding_q, vars);
                                          std::vector<double> vals(g->total_nodes());
                                          std::vector<double> x(
                                              static_cast<std::size_t>(g->dim()));
                                          for (std::size_t n = 0; n < vals.size(); ++n) {
                                              g->node_coords(n, x.data());
                                              vals[n] = e.eval(x);
                                          }
                                          return ExponentField(g, std::move(vals));
                                      }();
        const CriticalExponents ce = critical_exponents(pv);
        bool admissible = true;
        for (std::size_t n = 0; n < q_field.values().size(); ++n)
            if (!(q_field[n] < ce.p_inf[n])) admissible = false;

        Rng rng(cfg.diagnostics.seed);
        double max_ratio = 0.0;
        const int probes = 100;
        for (int j = 0; j < probes; ++j) {
            GridFunction u(g);
            for (const ActiveSpan& s : g->active_spans())
                for (std::size_t n = s.offset; n < s.offset + s.length; ++n)
                    u[n] = rng.uniform(-1.0, 1.0);
            const double denom = anisotropic_norm(u, pv);
            if (denom == 0.0) continue;
            max_ratio = std::max(max_ratio, luxemburg_norm(u, q_field) / denom);
        }
        std::ofstream out = open_out(dir / "embedding_probe.csv");
        out << "probes,admissible,max_ratio,cap,within_cap\n";
        out << probes << "," << (admissible ? 1 : 0) << "," << fmt(max_ratio) << ","
            << fmt(cfg.diagnostics.embedding_cap) << ","
            << (max_ratio <= cfg.diagnostics.embedding_cap ? 1 : 0) << "\n";
        log << "norms: embedding probe max ratio " << fmt(max_ratio) << "\n";
    }
    write_manifest(dir, cfg, "norms", nlohmann::ordered_json::object());
    return 0;
}

}  // namespace

int run_mode(const std::string& mode, const Config& cfg, std::ostream& log) {
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    try {
        const BuiltProblem built = build_problem(cfg);
        if (mode == "solve") return run_solve(cfg, built, dir, log);
        if (mode == "ladder") return run_ladder(cfg, built, dir, log);
        if (mode == "verify") return run_verify(cfg, built, dir, log);
        if (mode == "norms") return run_norms(cfg, built, dir, log);
        log << "error: unknown mode '" << mode << "'\n";
        return 1;
    } catch (const ExprError& e) {
        log << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        log << "internal error: " << e.what() << "\n";
        return 3;
    }
}

int run(const RunOptions& opts, std::ostream& log) {
    std::ifstream in(opts.config_path, std::ios::binary);
    if (!in) {
        log << "config error: cannot read " << opts.config_path << "\n";
        return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    ConfigParse parsed = parse_config(buf.str());
    if (!parsed.ok()) {
        for (const ConfigError& e : parsed.errors) {
            log << "config error";
            if (e.line > 0) log << " (line " << e.line << ", column " << e.column << ")";
            log << ": " << e.message << "\n";
        }
        return 1;
    }
    Config cfg = *parsed.config;
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (opts.seed.has_value()) cfg.diagnostics.seed = *opts.seed;
    if (opts.grid_nodes.has_value()) cfg.grid.nodes_per_axis = *opts.grid_nodes;
    return run_mode(opts.mode, cfg, log);
}

}  // namespace aniso
