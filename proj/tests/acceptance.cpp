// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Invoke with the path to the anisolab binary (used by the
// byte-determinism criterion).

#include <Eigen/Sparse>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "aniso/config.hpp"
#include "aniso/diagnostics.hpp"
#include "aniso/modular.hpp"
#include "aniso/runner.hpp"
#include "aniso/util.hpp"

using namespace aniso;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool pass, const std::string& detail) {
    std::printf("[%s] %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

GridFunction gaussian_source(const GridPtr& g) {
    GridFunction f(g);
    for (std::size_t q = 0; q < g->total_nodes(); ++q) {
        const double r = g->node_radius(q);
        f[q] = std::exp(-r * r);
    }
    return f;
}

std::shared_ptr<ProblemSpec> constant_spec(const GridPtr& g, double p0, double p1, double p2,
                                           std::vector<double> schedule, double eps = 1e-8) {
    auto pv = std::make_shared<const ExponentVector>(
        ExponentField::constant(g, p0),
        std::vector<ExponentField>{ExponentField::constant(g, p1),
                                   ExponentField::constant(g, p2)});
    auto spec = std::make_shared<ProblemSpec>();
    spec->grid = g;
    spec->exponents = pv;
    spec->flux = model_anisotropic_laplacian(pv, eps);
    spec->f = gaussian_source(g);
    spec->radius_schedule = std::move(schedule);
    spec->eps_flux = eps;
    return spec;
}

GridFunction direct_linear_solve(const RegularizedProblem& rp) {
    const Grid& g = *rp.grid;
    std::map<std::size_t, int> index;
    std::vector<std::size_t> nodes;
    for (const ActiveSpan& s : g.active_spans())
        for (std::size_t q = s.offset; q < s.offset + s.length; ++q) {
            index[q] = static_cast<int>(nodes.size());
            nodes.push_back(q);
        }
    const int m = static_cast<int>(nodes.size());
    const double inv_h2 = 1.0 / (g.mesh() * g.mesh());
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd b(m);
    for (int row = 0; row < m; ++row) {
        const std::size_t q = nodes[static_cast<std::size_t>(row)];
        double diag = 1.0;
        for (int d = 0; d < g.dim(); ++d) {
            for (int sgn : {-1, 1}) {
                const std::size_t nb = q + static_cast<std::size_t>(sgn * g.stride(d));
                diag += inv_h2;
                auto it = index.find(nb);
                if (it != index.end()) trips.emplace_back(row, it->second, -inv_h2);
            }
        }
        trips.emplace_back(row, row, diag);
        b[row] = rp.f_n[q];
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> lu(A);
    const Eigen::VectorXd x = lu.solve(b);
    GridFunction u(rp.grid, 0.0);
    for (int row = 0; row < m; ++row) u[nodes[static_cast<std::size_t>(row)]] = x[row];
    return u;
}

double max_diff(const GridFunction& a, const GridFunction& b) {
    double err = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) err = std::max(err, std::abs(a[q] - b[q]));
    return err;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// 1. Picard vs direct sparse factorization, linear case, 33x33, n = 4.
void criterion_linear_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const GridPtr g = make_grid(2, 5.0, 33, 4.0);
    auto spec = constant_spec(g, 2, 2, 2, {4.0});
    const RegularizedProblem rp = make_regularized(spec, 4.0);
    SolverParams params;
    params.tol = 1e-10;
    auto [u, rep] = solve(rp, GridFunction(rp.grid, 0.0), params);
    const GridFunction ref = direct_linear_solve(rp);
    const double rel = max_diff(u, ref) / ref.max_abs();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(1, "linear oracle: iterative vs direct solve",
           rep.converged && rel <= 1e-8 && seconds < 10.0,
           "rel max err " + num(rel) + ", " + num(seconds) + " s");
}

// 2. Variational oracle on 17x17 with p = (2.5, 3), plus gradient check.
void criterion_variational_oracle() {
    const GridPtr g = make_grid(2, 5.0, 17, 4.0);
    auto spec = constant_spec(g, 2, 2.5, 3.0, {4.0});
    const RegularizedProblem rp = make_regularized(spec, 4.0);
    SolverParams params;
    params.tol = 1e-10;
    auto [u, rep] = solve(rp, GridFunction(rp.grid, 0.0), params);
    auto [u_min, orep] = energy_oracle(rp, 1e-9);
    const double agree = max_diff(u, u_min);

    Rng rng(2024);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        GridFunction v(rp.grid);
        for (const ActiveSpan& s : g->active_spans())
            for (std::size_t q = s.offset; q < s.offset + s.length; ++q)
                v[q] = rng.uniform(-0.5, 0.5);
        const GridFunction grad = energy_gradient(v, rp);
        const double scale = grad.max_abs();
        const double h = 1e-5;
        double worst = 0.0;
        for (const ActiveSpan& s : g->active_spans()) {
            for (std::size_t q = s.offset; q < s.offset + s.length; q += 5) {
                GridFunction up = v, dn = v;
                up[q] += h;
                dn[q] -= h;
                const double fd =
                    (discrete_energy(up, rp) - discrete_energy(dn, rp)) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - grad[q]));
            }
        }
        worst_rel = std::max(worst_rel, worst / scale);
    }
    report(2, "variational oracle: iterative vs energy minimizer",
           rep.converged && orep.converged && agree <= 1e-6 && worst_rel <= 1e-6,
           "max-norm gap " + num(agree) + ", gradient fd rel err " + num(worst_rel));
}

// 3. Hypothesis suite: clean sweep on the built-in flux, broken model flagged.
void criterion_hypotheses() {
    const GridPtr g = make_grid(2, 5.0, 33, 4.0);
    std::vector<double> wavy(g->total_nodes());
    for (std::size_t q = 0; q < wavy.size(); ++q) {
        double x[2];
        g->node_coords(q, x);
        wavy[q] = 2.0 + 0.5 * std::sin(x[0]);
    }
    const ExponentField p(g, std::move(wavy));
    auto pv = std::make_shared<const ExponentVector>(p, std::vector<ExponentField>{p, p});
    const HypothesisReport clean =
        verify_hypotheses(model_anisotropic_laplacian(pv, 0.0), *pv, 10000, 42);
    const HypothesisReport broken = verify_hypotheses(model_broken_sign(pv), *pv, 10000, 42);
    const bool pass = clean.growth.violations == 0 && clean.monotonicity.violations == 0 &&
                      clean.coercivity.violations == 0 &&
                      broken.coercivity.violations > 9900;
    report(3, "hypothesis suite: built-in clean, sign-flip flagged", pass,
           "clean violations " +
               std::to_string(clean.growth.violations + clean.monotonicity.violations +
                              clean.coercivity.violations) +
               ", broken coercivity " + std::to_string(broken.coercivity.violations) + "/10000");
}

struct LadderData {
    LadderReport report;
    std::shared_ptr<ProblemSpec> spec;
};

LadderData run_ladder() {
    const GridPtr g = make_grid(2, 17.0, 137, 16.0);
    auto spec = constant_spec(g, 2, 2, 2, {4.0, 8.0, 16.0});
    SolverParams params;
    params.tol = 1e-10;
    const double ks[4] = {1.0, 2.0, 4.0, 8.0};
    const double hs[3] = {1.0, 2.0, 4.0};
    LadderData data{ladder_study(spec, 2.0, params, std::span<const double>(ks, 4),
                                 std::span<const double>(hs, 3), 4.0, true),
                    spec};
    return data;
}

// 4. A-priori estimate: L(k)/k bounded by one constant across rungs.
void criterion_apriori(const LadderData& data, double seconds) {
    bool finite = data.report.all_converged;
    double cmax = 0.0, cmin = 1e300;
    for (const RungRecord& rung : data.report.rungs) {
        for (const EnergyEstimateRow& row : rung.energy)
            if (!std::isfinite(row.L_over_k)) finite = false;
        cmax = std::max(cmax, rung.estimate_constant);
        cmin = std::min(cmin, rung.estimate_constant);
    }
    const bool pass = finite && cmax <= 3.0 * cmin && seconds < 120.0;
    report(4, "a-priori estimate: L(k)/k bounded uniformly in the rung", pass,
           "bound ratio " + num(cmax / cmin) + ", ladder " + num(seconds) + " s");
}

// 5. Measure decay at k in {2,4,8,16}: scaled column bounded on every rung.
void criterion_measure_decay(const LadderData& data) {
    bool pass = true;
    double worst = 0.0;
    const double ks[4] = {2.0, 4.0, 8.0, 16.0};
    for (const RungRecord& rung : data.report.rungs) {
        const auto rows = measure_decay_check(rung.solution, *data.spec->exponents,
                                              std::span<const double>(ks, 4));
        const double base = rows.front().scaled;
        for (const MeasureDecayRow& row : rows) {
            if (row.scaled > 2.0 * base) pass = false;
            worst = std::max(worst, row.scaled);
        }
        for (std::size_t j = 1; j < rows.size(); ++j)
            if (rows[j].meas > rows[j - 1].meas) pass = false;
    }
    report(5, "measure decay: meas{|u|>k} k^(pbar-1) stays bounded", pass,
           "largest scaled value " + num(worst));
}

// 6. Entropy inequality on the finest rung.
void criterion_entropy(const LadderData& data) {
    const RegularizedProblem rp = make_regularized(data.spec, data.report.radii.back());
    const GridFunction& u = data.report.rungs.back().solution;
    const double tol_entropy = 10.0 * 1e-10 * rp.grid->active_measure();
    const double ks[2] = {1.0, 4.0};
    const auto cases = entropy_sweep(u, rp, std::span<const double>(ks, 2), 50, 42, 2.0);
    bool pass = true;
    double worst = -1e300;
    for (const EntropyCase& c : cases) {
        if (c.label == "xi=u" && c.residual != 0.0) pass = false;
        if (c.residual > tol_entropy) pass = false;
        worst = std::max(worst, c.residual);
    }
    report(6, "entropy inequality on the finest rung", pass,
           "worst residual " + num(worst) + " vs tol " + num(tol_entropy));
}

// 7. Minty gap: nonnegative on random pairs, decreasing along the ladder.
void criterion_monotonicity_gap(const LadderData& data) {
    const GridPtr g = make_grid(2, 3.0, 21, 2.0);
    std::vector<double> wavy(g->total_nodes());
    for (std::size_t q = 0; q < wavy.size(); ++q) {
        double x[2];
        g->node_coords(q, x);
        wavy[q] = 2.0 + 0.5 * std::sin(x[0]);
    }
    const ExponentField p(g, std::move(wavy));
    auto pv = std::make_shared<const ExponentVector>(p, std::vector<ExponentField>{p, p});
    const FluxModel model = model_anisotropic_laplacian(pv, 0.0);
    Rng rng(4242);
    bool nonneg = true;
    GridFunction a(g), b(g);
    for (int rep = 0; rep < 1000; ++rep) {
        for (std::size_t q = 0; q < g->total_nodes(); ++q) {
            a[q] = rng.uniform(-2.0, 2.0);
            b[q] = rng.uniform(-2.0, 2.0);
        }
        const GridFunction seq[1] = {a};
        if (monotonicity_gap(std::span<const GridFunction>(seq, 1), b, 1.5, model,
                             2.0)[0] < 0.0)
            nonneg = false;
    }
    const std::vector<double>& gaps = data.report.gap_vs_finest;
    bool decreasing = gaps.size() == 2 && gaps[0] > gaps[1] && gaps[1] > 0.0;
    report(7, "monotonicity gap: nonnegative and shrinking along the ladder",
           nonneg && decreasing,
           "ladder gaps " + num(gaps.empty() ? -1.0 : gaps[0]) + " -> " +
               num(gaps.size() < 2 ? -1.0 : gaps[1]));
}

// 8. Function-space suite.
void criterion_function_spaces() {
    const GridPtr g = make_grid(2, 2.0, 17, 1.5);
    std::vector<double> wavy(g->total_nodes());
    for (std::size_t q = 0; q < wavy.size(); ++q) {
        double x[2];
        g->node_coords(q, x);
        wavy[q] = 2.0 + 0.5 * std::sin(x[0]);
    }
    const ExponentField p(g, std::move(wavy));
    Rng rng(777);
    bool pass = true;
    double worst_unit = 0.0, worst_const = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        GridFunction u(g);
        for (std::size_t q = 0; q < g->total_nodes(); ++q) u[q] = rng.uniform(-3.0, 3.0);
        const double lam = luxemburg_norm(u, p);
        GridFunction scaled = u;
        for (std::size_t q = 0; q < u.size(); ++q) scaled[q] /= lam;
        worst_unit = std::max(worst_unit, std::abs(modular(scaled, p) - 1.0));
        if (!norm_modular_bound_check(u, p).holds) pass = false;

        const ExponentField pc = ExponentField::constant(g, 2.5);
        const double classical = std::pow(modular(u, pc), 1.0 / 2.5);
        worst_const =
            std::max(worst_const, std::abs(luxemburg_norm(u, pc) - classical) / classical);
    }
    pass = pass && worst_unit <= 1e-10 && worst_const <= 1e-10;
    report(8, "function-space suite: unit modular, constant-exponent, norm bound", pass,
           "unit-modular err " + num(worst_unit) + ", constant-exponent err " +
               num(worst_const));
}

// 9. Source regularization invariants.
void criterion_regularization() {
    const GridPtr g = make_grid(2, 17.0, 137, 16.0);
    GridFunction f(g);
    for (std::size_t q = 0; q < g->total_nodes(); ++q) {
        const double r = g->node_radius(q);
        f[q] = 1.0 / (1.0 + r * r);
    }
    bool pass = true;
    double prev = 1e300;
    for (double n : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const GridFunction fn = regularize_source(f, n);
        double l1 = 0.0;
        for (std::size_t q = 0; q < g->total_nodes(); ++q) {
            if (std::abs(fn[q]) > std::min(std::abs(f[q]), n) + 1e-15) pass = false;
            if (g->node_radius(q) < 4.0) l1 += std::abs(fn[q] - f[q]) * g->cell_volume();
        }
        if (l1 >= prev) pass = false;
        prev = l1;
    }
    report(9, "source regularization: clamped and L1-convergent", pass,
           "final tail integral " + num(prev));
}

// 10. Byte-identical artifacts across two binary runs.
void criterion_determinism(const char* binary) {
    const fs::path dir = fs::temp_directory_path() / "anisolab_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg_path = dir / "config.json";
    {
        Config c;
        c.dim = 2;
        c.grid.nodes_per_axis = 21;
        c.p0 = "2 + 0.5*sin(x1)";
        c.p = {"2 + 0.5*sin(x1)", "2"};
        c.source = "exp(-(x1^2+x2^2))";
        c.radius_schedule = {2.0, 3.0};
        c.solver.tol = 1e-8;
        c.diagnostics.core_radius = 1.5;
        c.diagnostics.samples = 500;
        c.diagnostics.entropy_test_functions = 5;
        std::ofstream(cfg_path) << emit_config(c);
    }
    const std::string base = std::string("\"") + binary + "\" ladder --config \"" +
                             cfg_path.string() + "\" --seed 7 --out \"";
    const fs::path out1 = dir / "run1";
    const fs::path out2 = dir / "run2";
    const int rc1 = std::system((base + out1.string() + "\" > /dev/null").c_str());
    const int rc2 = std::system((base + out2.string() + "\" > /dev/null").c_str());
    bool pass = rc1 == 0 && rc2 == 0;
    int compared = 0;
    if (pass) {
        for (const auto& entry : fs::directory_iterator(out1)) {
            const fs::path other = out2 / entry.path().filename();
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) pass = false;
            ++compared;
        }
        if (compared == 0) pass = false;
    }
    report(10, "determinism: two runs produce byte-identical artifacts", pass,
           std::to_string(compared) + " files compared");
}

}  // namespace

int main(int argc, char** argv) {
    criterion_linear_oracle();
    criterion_variational_oracle();
    criterion_hypotheses();

    const auto t0 = std::chrono::steady_clock::now();
    const LadderData ladder = run_ladder();
    const double ladder_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    criterion_apriori(ladder, ladder_seconds);
    criterion_measure_decay(ladder);
    criterion_entropy(ladder);
    criterion_monotonicity_gap(ladder);
    criterion_function_spaces();
    criterion_regularization();
    if (argc > 1) {
        criterion_determinism(argv[1]);
    } else {
        report(10, "determinism: two runs produce byte-identical artifacts", false,
               "anisolab binary path not supplied");
    }

    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
