#include "aniso/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "aniso/kernels.hpp"

namespace aniso {

Grid::Grid(int dim, double extent, int nodes_per_axis, double active_radius)
    : dim_(dim), extent_(extent), nodes_(nodes_per_axis), active_radius_(active_radius) {
    if (dim < 2 || dim > kernels::max_dim)
        throw std::invalid_argument("grid dimension must be in [2," +
                                    std::to_string(kernels::max_dim) + "]");
    if (nodes_per_axis < 3) throw std::invalid_argument("need at least 3 nodes per axis");
    if (!(extent > 0.0)) throw std::invalid_argument("extent must be positive");
    if (!(active_radius > 0.0) || active_radius > extent)
        throw std::invalid_argument("active radius must lie in (0, extent]");
    mesh_ = 2.0 * extent_ / static_cast<double>(nodes_ - 1);
    cell_volume_ = 1.0;
    total_ = 1;
    for (int d = 0; d < dim_; ++d) {
        strides_[d] = static_cast<std::ptrdiff_t>(total_);
        total_ *= static_cast<std::size_t>(nodes_);
        cell_volume_ *= mesh_;
    }

    // Active runs along axis 0, one scan per pencil.
    const std::size_t pencils = total_ / static_cast<std::size_t>(nodes_);
    std::vector<int> idx(static_cast<std::size_t>(dim_), 0);
    for (std::size_t p = 0; p < pencils; ++p) {
        std::size_t rest = p;
        double tail_sq = 0.0;
        for (int d = 1; d < dim_; ++d) {
            const int j = static_cast<int>(rest % static_cast<std::size_t>(nodes_));
            rest /= static_cast<std::size_t>(nodes_);
            const double c = coord(j);
            tail_sq += c * c;
        }
        const std::size_t base = p * static_cast<std::size_t>(nodes_);
        const double r2 = active_radius_ * active_radius_;
        std::size_t run_start = 0;
        bool in_run = false;
        for (int j = 0; j < nodes_; ++j) {
            const double c = coord(j);
            const bool is_active = c * c + tail_sq < r2;
            if (is_active && !in_run) {
                run_start = base + static_cast<std::size_t>(j);
                in_run = true;
            } else if (!is_active && in_run) {
                spans_.push_back({run_start, base + static_cast<std::size_t>(j) - run_start});
                in_run = false;
            }
        }
        if (in_run) spans_.push_back({run_start, base + static_cast<std::size_t>(nodes_) - run_start});
    }
    for (const ActiveSpan& s : spans_) active_count_ += s.length;
}

void Grid::node_coords(std::size_t node, double* x) const {
    for (int d = 0; d < dim_; ++d) {
        const int j = static_cast<int>((node / static_cast<std::size_t>(strides_[d])) %
                                       static_cast<std::size_t>(nodes_));
        x[d] = coord(j);
    }
}

double Grid::node_radius(std::size_t node) const {
    double acc = 0.0;
    for (int d = 0; d < dim_; ++d) {
        const int j = static_cast<int>((node / static_cast<std::size_t>(strides_[d])) %
                                       static_cast<std::size_t>(nodes_));
        const double c = coord(j);
        acc += c * c;
    }
    return std::sqrt(acc);
}

std::size_t Grid::node_index(std::span<const int> idx) const {
    std::size_t node = 0;
    for (int d = 0; d < dim_; ++d)
        node += static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]) *
                static_cast<std::size_t>(strides_[d]);
    return node;
}

void Grid::node_multi_index(std::size_t node, int* idx) const {
    for (int d = 0; d < dim_; ++d)
        idx[d] = static_cast<int>((node / static_cast<std::size_t>(strides_[d])) %
                                  static_cast<std::size_t>(nodes_));
}

bool Grid::active(std::size_t node) const {
    double acc = 0.0;
    for (int d = 0; d < dim_; ++d) {
        const int j = static_cast<int>((node / static_cast<std::size_t>(strides_[d])) %
                                       static_cast<std::size_t>(nodes_));
        const double c = coord(j);
        acc += c * c;
    }
    return acc < active_radius_ * active_radius_;
}

bool Grid::same_box(const Grid& other) const {
    return dim_ == other.dim_ && nodes_ == other.nodes_ && extent_ == other.extent_;
}

GridPtr make_grid(int dim, double extent, int nodes_per_axis, double active_radius) {
    return std::make_shared<Grid>(dim, extent, nodes_per_axis, active_radius);
}

GridPtr with_active_radius(const Grid& grid, double active_radius) {
    return make_grid(grid.dim(), grid.extent(), grid.nodes_per_axis(), active_radius);
}

GridFunction::GridFunction(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->total_nodes(), fill) {}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->total_nodes())
        throw std::invalid_argument("value count does not match grid");
}

void GridFunction::enforce_dirichlet() {
    std::vector<double> active(values_.size(), 0.0);
    for (const ActiveSpan& s : grid_->active_spans())
        for (std::size_t q = s.offset; q < s.offset + s.length; ++q) active[q] = values_[q];
    values_.swap(active);
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool GridFunction::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_same_box(const GridFunction& a, const GridFunction& b) {
    if (!a.grid().same_box(b.grid())) throw std::invalid_argument("grid box mismatch");
}

GridFunction discrete_partial(const GridFunction& u, int axis) {
    const Grid& g = u.grid();
    GridFunction out(u.grid_ptr());
    const std::ptrdiff_t st = g.stride(axis);
    const double inv_h = 1.0 / g.mesh();
    const std::size_t n = g.total_nodes();
    const int m = g.nodes_per_axis();
    for (std::size_t q = 0; q < n; ++q) {
        const int j = static_cast<int>((q / static_cast<std::size_t>(st)) %
                                       static_cast<std::size_t>(m));
        const double right = (j + 1 < m) ? u[q + static_cast<std::size_t>(st)] : 0.0;
        out[q] = (right - u[q]) * inv_h;
    }
    return out;
}

std::vector<GridFunction> discrete_gradient(const GridFunction& u) {
    std::vector<GridFunction> grads;
    grads.reserve(static_cast<std::size_t>(u.grid().dim()));
    for (int d = 0; d < u.grid().dim(); ++d) grads.push_back(discrete_partial(u, d));
    return grads;
}

GridFunction adjoint_partial(const GridFunction& v, int axis) {
    const Grid& g = v.grid();
    GridFunction out(v.grid_ptr());
    const std::ptrdiff_t st = g.stride(axis);
    const double inv_h = 1.0 / g.mesh();
    const std::size_t n = g.total_nodes();
    const int m = g.nodes_per_axis();
    for (std::size_t q = 0; q < n; ++q) {
        const int j = static_cast<int>((q / static_cast<std::size_t>(st)) %
                                       static_cast<std::size_t>(m));
        const double left = (j > 0) ? v[q - static_cast<std::size_t>(st)] : 0.0;
        out[q] = (v[q] - left) * inv_h;
    }
    return out;
}

double truncate(double r, double k) { return std::max(-k, std::min(k, r)); }

GridFunction truncate(const GridFunction& u, double k) {
    GridFunction out(u.grid_ptr());
    kernels::active().clamp(u.data(), k, out.data(), u.size());
    return out;
}

double radial_cutoff(double r, double R) {
    if (r < R) return 1.0;
    if (r >= R + 1.0) return 0.0;
    return R + 1.0 - r;
}

double level_cutoff(double s, double j) { return radial_cutoff(std::abs(s), j); }

double ball_cutoff(std::span<const double> x, double l) {
    double acc = 0.0;
    for (double c : x) acc += c * c;
    return radial_cutoff(std::sqrt(acc), l);
}

double CutoffSpec::operator()(double s) const {
    switch (kind) {
        case CutoffKind::radial: return radial_cutoff(s, parameter);
        case CutoffKind::level: return level_cutoff(s, parameter);
        case CutoffKind::ball: return radial_cutoff(s, parameter);
    }
    return 0.0;
}

void write_csv(const GridFunction& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    const Grid& g = u.grid();
    const int dim = g.dim();
    for (int d = 0; d < dim; ++d) out << "i" << (d + 1) << ",";
    for (int d = 0; d < dim; ++d) out << "x" << (d + 1) << ",";
    out << "value\n";
    int idx[kernels::max_dim];
    char buf[64];
    for (std::size_t q = 0; q < g.total_nodes(); ++q) {
        g.node_multi_index(q, idx);
        for (int d = 0; d < dim; ++d) out << idx[d] << ",";
        for (int d = 0; d < dim; ++d) {
            std::snprintf(buf, sizeof buf, "%.17g,", g.coord(idx[d]));
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", u[q]);
        out << buf;
    }
}

}  // namespace aniso
