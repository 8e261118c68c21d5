#include "aniso/exponents.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aniso {

ExponentField::ExponentField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->total_nodes())
        throw std::invalid_argument("exponent sample count does not match grid");
    p_minus_ = std::numeric_limits<double>::infinity();
    p_plus_ = -std::numeric_limits<double>::infinity();
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("exponent must be finite");
        p_minus_ = std::min(p_minus_, v);
        p_plus_ = std::max(p_plus_, v);
    }
    if (!(p_minus_ > 1.0))
        throw std::invalid_argument("exponent out of the admissible class: min must exceed 1");
}

ExponentField ExponentField::constant(GridPtr grid, double p) {
    std::vector<double> v(grid->total_nodes(), p);
    return ExponentField(std::move(grid), std::move(v));
}

ExponentVector::ExponentVector(ExponentField p0, std::vector<ExponentField> p)
    : p0_(std::move(p0)), p_(std::move(p)) {
    if (p_.size() != static_cast<std::size_t>(p0_.grid().dim()))
        throw std::invalid_argument("need one directional exponent per axis");
    underline_p_ = p0_.p_minus();
    overline_p_max_ = p0_.p_plus();
    for (const ExponentField& pi : p_) {
        if (!pi.grid().same_box(p0_.grid()))
            throw std::invalid_argument("exponent grid mismatch");
        underline_p_ = std::min(underline_p_, pi.p_minus());
        overline_p_max_ = std::max(overline_p_max_, pi.p_plus());
    }
    // p0(x) >= min over the essential minima of all N+1 exponents
    for (std::size_t q = 0; q < p0_.values().size(); ++q) {
        if (p0_[q] < underline_p_)
            throw std::invalid_argument("p0 falls below the global exponent minimum");
    }
}

ExponentField conjugate(const ExponentField& p) {
    std::vector<double> v(p.values().size());
    for (std::size_t q = 0; q < v.size(); ++q) v[q] = p[q] / (p[q] - 1.0);
    return ExponentField(p.grid_ptr(), std::move(v));
}

ExponentField harmonic_mean_exponent(const ExponentVector& pv) {
    const std::size_t n = pv.grid().total_nodes();
    const double N = static_cast<double>(pv.dim());
    std::vector<double> v(n);
    for (std::size_t q = 0; q < n; ++q) {
        double s = 0.0;
        for (int i = 0; i < pv.dim(); ++i) s += 1.0 / pv.p(i)[q];
        v[q] = N / s;
    }
    return ExponentField(pv.p0().grid_ptr(), std::move(v));
}

CriticalExponents critical_exponents(const ExponentVector& pv) {
    const ExponentField pbar = harmonic_mean_exponent(pv);
    const std::size_t n = pv.grid().total_nodes();
    const double N = static_cast<double>(pv.dim());
    CriticalExponents ce;
    ce.p_star.resize(n);
    ce.p_inf.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        ce.p_star[q] = (pbar[q] < N) ? N * pbar[q] / (N - pbar[q])
                                     : std::numeric_limits<double>::infinity();
        double dir_max = pv.p(0)[q];
        for (int i = 1; i < pv.dim(); ++i) dir_max = std::max(dir_max, pv.p(i)[q]);
        ce.p_inf[q] = std::max(ce.p_star[q], dir_max);
    }
    return ce;
}

}  // namespace aniso
