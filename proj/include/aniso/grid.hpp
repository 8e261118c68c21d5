#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace aniso {

// Contiguous run of active nodes along axis 0.
struct ActiveSpan {
    std::size_t offset;
    std::size_t length;
};

// Uniform node-centered grid on the box [-L,L]^N, N >= 2. The active domain
// is the open ball {|x| < active_radius}; everything outside it is Dirichlet
// territory where fields stay at 0. Axis 0 is the contiguous storage axis,
// node j of an axis sits at x = -L + j*h with h = 2L/(m-1). Node-centered
// cells of volume h^N carry the quadrature, so the discrete measure of a
// region is (number of nodes) * h^N.
class Grid {
public:
    Grid(int dim, double extent, int nodes_per_axis, double active_radius);

    int dim() const { return dim_; }
    double extent() const { return extent_; }
    int nodes_per_axis() const { return nodes_; }
    double mesh() const { return mesh_; }
    double active_radius() const { return active_radius_; }
    std::size_t total_nodes() const { return total_; }
    double cell_volume() const { return cell_volume_; }
    std::size_t active_count() const { return active_count_; }
    double active_measure() const { return static_cast<double>(active_count_) * cell_volume_; }

    std::ptrdiff_t stride(int axis) const { return strides_[axis]; }
    double coord(int axis_index) const { return -extent_ + axis_index * mesh_; }
    void node_coords(std::size_t node, double* x) const;
    double node_radius(std::size_t node) const;  // |x|
    std::size_t node_index(std::span<const int> idx) const;
    void node_multi_index(std::size_t node, int* idx) const;
    bool active(std::size_t node) const;
    std::span<const ActiveSpan> active_spans() const { return spans_; }

    bool same_box(const Grid& other) const;

private:
    int dim_;
    double extent_;
    int nodes_;
    double mesh_;
    double active_radius_;
    std::size_t total_;
    double cell_volume_;
    std::ptrdiff_t strides_[8];
    std::vector<ActiveSpan> spans_;
    std::size_t active_count_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int dim, double extent, int nodes_per_axis, double active_radius);

// Same box, different active ball.
GridPtr with_active_radius(const Grid& grid, double active_radius);

// Scalar field sampled at every node of a grid.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(GridPtr grid, double fill = 0.0);
    GridFunction(GridPtr grid, std::vector<double> values);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const double* data() const { return values_.data(); }
    double* data() { return values_.data(); }
    std::span<const double> values() const { return values_; }

    void enforce_dirichlet();  // zero every node outside the active ball
    double max_abs() const;
    bool all_finite() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

void require_same_box(const GridFunction& a, const GridFunction& b);

// Forward difference (u(x+h e_d) - u(x))/h at every box node, reading 0
// beyond the box faces; the discrete gradient of the zero-extended field.
GridFunction discrete_partial(const GridFunction& u, int axis);
std::vector<GridFunction> discrete_gradient(const GridFunction& u);

// Backward difference (v(x) - v(x-h e_d))/h, the negative transpose of
// discrete_partial: sum (D^d u) v = -sum u (adjoint_partial v) for fields
// vanishing on the box faces.
GridFunction adjoint_partial(const GridFunction& v, int axis);

// Pointwise truncation T_k and the two ramp cutoffs.
double truncate(double r, double k);
GridFunction truncate(const GridFunction& u, double k);

// 1 for r < R, linear ramp down on [R, R+1], 0 beyond.
double radial_cutoff(double r, double R);
// Even plateau version: 1 for |s| <= j, ramp on [j, j+1], 0 beyond.
double level_cutoff(double s, double j);
// Spatial cutoff: 1 on the ball of radius l, 0 outside radius l+1.
double ball_cutoff(std::span<const double> x, double l);

enum class CutoffKind { radial, level, ball };
struct CutoffSpec {
    CutoffKind kind;
    double parameter;  // > 0: the R, j or l of the ramp
    // radial/ball expect r = |x| >= 0, level takes a signed value.
    double operator()(double s) const;
};

// One row per node: per-axis index, coordinates, value.
void write_csv(const GridFunction& u, const std::string& path);

}  // namespace aniso
