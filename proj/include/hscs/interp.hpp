#ifndef HSCS_INTERP_HPP
#define HSCS_INTERP_HPP

#include <algorithm>
#include <cstddef>
#include <vector>

#include "hscs/errors.hpp"

namespace hscs {

// Not-a-knot cubic spline (exact on cubic polynomials).
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double xq) const;
    double deriv(double xq) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

  private:
    std::size_t locate(double xq) const;
    std::vector<double> x_, y_, c2_, c3_, c1_; // y + c1 dx + c2 dx^2 + c3 dx^3
};

// C1 piecewise-cubic Hermite interpolation from (x, y, y') tables.
class HermiteTable {
  public:
    HermiteTable() = default;
    HermiteTable(std::vector<double> x, std::vector<double> y, std::vector<double> yp)
        : x_(std::move(x)), y_(std::move(y)), yp_(std::move(yp)) {}

    double operator()(double xq) const;
    double deriv(double xq) const;
    bool empty() const { return x_.empty(); }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }
    const std::vector<double>& yps() const { return yp_; }

  private:
    std::size_t locate(double xq) const;
    std::vector<double> x_, y_, yp_;
};

} // namespace hscs

#endif
