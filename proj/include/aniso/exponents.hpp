#pragma once

#include <span>
#include <vector>

#include "aniso/grid.hpp"

namespace aniso {

// Variable exponent sampled at the grid nodes. Admissible fields satisfy
// 1 < p_minus <= p(x) <= p_plus < inf; the bounds are recomputed from the
// samples, never trusted from the caller.
class ExponentField {
public:
    ExponentField(GridPtr grid, std::vector<double> values);
    static ExponentField constant(GridPtr grid, double p);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    double operator[](std::size_t i) const { return values_[i]; }
    const double* data() const { return values_.data(); }
    std::span<const double> values() const { return values_; }
    double p_minus() const { return p_minus_; }
    double p_plus() const { return p_plus_; }

private:
    GridPtr grid_;
    std::vector<double> values_;
    double p_minus_;
    double p_plus_;
};

// The N+1 exponents (p0, p1..pN) of the anisotropic operator; construction
// enforces p0(x) >= min(p0^-, p1^-, ..., pN^-) at every node.
class ExponentVector {
public:
    ExponentVector(ExponentField p0, std::vector<ExponentField> p);

    const ExponentField& p0() const { return p0_; }
    const ExponentField& p(int i) const { return p_[static_cast<std::size_t>(i)]; }
    std::span<const ExponentField> directional() const { return p_; }
    int dim() const { return static_cast<int>(p_.size()); }
    const Grid& grid() const { return p0_.grid(); }
    double underline_p() const { return underline_p_; }
    double overline_p_max() const { return overline_p_max_; }

private:
    ExponentField p0_;
    std::vector<ExponentField> p_;
    double underline_p_;
    double overline_p_max_;
};

// p'(x) = p(x)/(p(x)-1), an involution on the admissible class.
ExponentField conjugate(const ExponentField& p);

// pbar(x) = N / sum_i 1/p_i(x) over the directional exponents.
ExponentField harmonic_mean_exponent(const ExponentVector& pv);

// Critical exponents; +inf marks nodes where pbar(x) >= N.
struct CriticalExponents {
    std::vector<double> p_star;  // N pbar/(N - pbar) below N, +inf otherwise
    std::vector<double> p_inf;   // max(p_star(x), max_i p_i(x)) nodewise
};
CriticalExponents critical_exponents(const ExponentVector& pv);

}  // namespace aniso
