#ifndef HSCS_ODE_HPP
#define HSCS_ODE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "hscs/errors.hpp"

namespace hscs {

// Dormand-Prince 5(4) embedded pair on std::vector state.
// rhs(x, y, dydx) fills dydx.
class DormandPrince {
  public:
    using Rhs = std::function<void(double, const std::vector<double>&,
                                   std::vector<double>&)>;

    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double min_step_fraction = 1e-14; // of the total interval; StiffnessFailure below

    // Advance y from x0 to x1 (x1 may be < x0). `watch`, when set, is called
    // after every accepted step with (x, y).
    void integrate(const Rhs& rhs, double x0, double x1, std::vector<double>& y,
                   const std::function<void(double, const std::vector<double>&)>&
                       watch = nullptr) const;

  private:
    bool step(const Rhs& rhs, double& x, std::vector<double>& y, double& h,
              double direction, double span) const;
};

inline void DormandPrince::integrate(
    const Rhs& rhs, double x0, double x1, std::vector<double>& y,
    const std::function<void(double, const std::vector<double>&)>& watch) const {
    if (x0 == x1) return;
    const double span = std::abs(x1 - x0);
    const double dir = (x1 > x0) ? 1.0 : -1.0;
    double x = x0;
    double h = dir * span / 64.0;
    while (dir * (x1 - x) > 0) {
        if (dir * (x + h - x1) > 0) h = x1 - x;
        if (!step(rhs, x, y, h, dir, span))
            throw StiffnessFailure("step size underflow in DormandPrince");
        if (watch) watch(x, y);
    }
}

inline bool DormandPrince::step(const Rhs& rhs, double& x, std::vector<double>& y,
                                double& h, double direction, double span) const {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), y5(n);
    rhs(x, y, k1);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
        rhs(x + c2 * h, yt, k2);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(x + c3 * h, yt, k3);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(x + c4 * h, yt, k4);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] +
                    h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(x + c5 * h, yt, k5);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                a64 * k4[i] + a65 * k5[i]);
        rhs(x + h, yt, k6);
        for (std::size_t i = 0; i < n; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                b6 * k6[i]);
        rhs(x + h, y5, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc =
                abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(ei) / sc);
        }
        if (err <= 1.0) {
            x += h;
            y = y5;
            const double grow = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
            return true;
        }
        h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
        if (std::abs(h) < min_step_fraction * span) return false;
    }
}

} // namespace hscs

#endif
