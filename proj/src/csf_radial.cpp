#include <algorithm>
#include <cmath>

#include "csf_internal.hpp"
#include "hscs/csf.hpp"

// Radius factor of the two-centre problem. Work in the regularized form
// F = X (xi^2-1)^{-m/2}:
//   (xi^2-1) F'' + 2(m+1) xi F' + [m(m+1) - lambda + a xi - p^2(xi^2-1)] F = 0
// Outward branch starts from the xi = 1 Taylor expansion, inward branch from
// the decaying log-derivative X'/X = -p + (a/(2p)-1)/xi. Amplitudes are
// rescaled piecewise; only logs of the scale factors are kept.

namespace hscs::internal {

double radial_xi_max(double a, double p, int m) {
    (void)a;
    (void)m;
    const double xm = std::max(30.0, 25.0 / std::max(p, 1e-30));
    return std::min(xm, 1e7);
}

double radial_turning_point(double a, double p, int m, double lambda) {
    // outer zero of the bracket m(m+1) - lambda + a xi - p^2(xi^2-1)
    const double disc = a * a + 4.0 * p * p * (p * p - lambda + double(m) * (m + 1));
    if (disc > 0) {
        const double xt = (a + std::sqrt(disc)) / (2.0 * p * p);
        if (xt > 1.0) return xt;
    }
    return 1.0 + (m + 1.0) / std::max(p, 1e-3);
}

double radial_stretch(double s, double xi_max, double sigma) {
    return 1.0 + (xi_max - 1.0) * std::expm1(sigma * s) / std::expm1(sigma);
}

double radial_sigma(double p, double xi_max) {
    return std::max(4.0, std::log1p(std::max(p, 0.0) * (xi_max - 1.0)) + 2.0);
}

void RadialRhs::operator()(double xi, const std::vector<double>& y,
                           std::vector<double>& dy) const {
    const double u = (xi - 1.0) * (xi + 1.0);
    dy[0] = y[1];
    dy[1] = -(2.0 * (m + 1.0) * xi * y[1] +
              (double(m) * (m + 1) - lambda + a * xi - p * p * u) * y[0]) /
            u;
    if (with_integrals) {
        const double x2 = std::pow(u, m) * y[0] * y[0]; // X^2
        dy[2] = x2;
        dy[3] = xi * xi * x2;
    }
}

void advance_branch(const RadialRhs& rhs, const DormandPrince& dp, double x0,
                    double x1, BranchState& st) {
    const bool ints = rhs.with_integrals;
    // growth-rate bound keeps every rescale interval under ~e^60
    const double rate = rhs.p + std::sqrt(std::abs(rhs.a) + std::abs(rhs.lambda) + 1.0);
    const int pieces = std::max(1, int(std::ceil(std::abs(x1 - x0) * rate / 60.0)));

    double last_sign = (st.y[0] > 0) ? 1.0 : (st.y[0] < 0 ? -1.0 : 0.0);
    auto watch = [&](double, const std::vector<double>& y) {
        const double s = (y[0] > 0) ? 1.0 : (y[0] < 0 ? -1.0 : 0.0);
        if (s != 0.0 && last_sign != 0.0 && s != last_sign) ++st.nodes;
        if (s != 0.0) last_sign = s;
    };
    auto f = [&rhs](double x, const std::vector<double>& y,
                    std::vector<double>& dy) { rhs(x, y, dy); };

    for (int k = 0; k < pieces; ++k) {
        const double xa = x0 + (x1 - x0) * double(k) / pieces;
        const double xb = x0 + (x1 - x0) * double(k + 1) / pieces;
        dp.integrate(f, xa, xb, st.y, watch);
        const double mag = std::max(std::abs(st.y[0]), std::abs(st.y[1]));
        if (mag > 1e50) {
            st.y[0] /= mag;
            st.y[1] /= mag;
            if (ints) {
                st.y[2] /= mag * mag;
                st.y[3] /= mag * mag;
            }
            st.logscale += std::log(mag);
        }
    }
}

void outward_seed(double a, double p, int m, double lambda, double s0, double& F,
                  double& Fp) {
    const double c0 = double(m) * (m + 1) - lambda + a;
    const double f1 = -c0 / (2.0 * (m + 1.0));
    const double f2 =
        -((2.0 * (m + 1.0) + c0) * f1 + a - 2.0 * p * p) / (4.0 * (m + 2.0));
    F = 1.0 + f1 * s0 + f2 * s0 * s0;
    Fp = f1 + 2.0 * f2 * s0;
}

void inward_seed(double a, double p, int m, double xi_max, double& F, double& Fp) {
    const double logder_X = -p + (a / (2.0 * p) - 1.0) / xi_max;
    F = 1.0;
    Fp = logder_X - double(m) * xi_max / ((xi_max - 1.0) * (xi_max + 1.0));
}

} // namespace hscs::internal

namespace hscs {

RadialShot radial_mismatch(double a, double p, int m, double lambda) {
    using namespace internal;
    if (p <= 0) throw ContinuumState("radial_mismatch requires p > 0");

    const double xi_max = radial_xi_max(a, p, m);
    const double xt = radial_turning_point(a, p, m, lambda);
    double xi_c = 1.0 + 0.8 * (xt - 1.0);
    xi_c = std::clamp(xi_c, 1.0 + 1e-10 * (xi_max - 1.0), 1.0 + 0.8 * (xi_max - 1.0));

    DormandPrince dp;
    dp.rel_tol = 1e-11;
    dp.abs_tol = 1e-300;

    RadialRhs rhs{a, p, lambda, m, false};
    const double sigma = radial_sigma(p, xi_max);
    const int nseg = 256;

    // outward over [1+s0, xi_max]; save the state at the segment boundary
    // that snaps the matching abscissa
    const double s0 = 1e-8;
    BranchState out;
    out.y = {0, 0};
    outward_seed(a, p, m, lambda, s0, out.y[0], out.y[1]);
    double xprev = 1.0 + s0;
    double FL = 0, FLp = 0, xi_match = xi_c;
    bool matched = false;
    for (int k = 1; k <= nseg; ++k) {
        const double xk = radial_stretch(double(k) / nseg, xi_max, sigma);
        if (xk <= xprev) continue;
        advance_branch(rhs, dp, xprev, xk, out);
        xprev = xk;
        if (!matched && xk >= xi_c) {
            FL = out.y[0];
            FLp = out.y[1];
            xi_match = xk;
            matched = true;
        }
    }
    if (!matched) {
        FL = out.y[0];
        FLp = out.y[1];
        xi_match = xprev;
    }

    // inward from xi_max down to the matching abscissa
    BranchState in;
    in.y = {0, 0};
    inward_seed(a, p, m, xi_max, in.y[0], in.y[1]);
    xprev = xi_max;
    for (int k = nseg - 1; k >= 0; --k) {
        const double xk = radial_stretch(double(k) / nseg, xi_max, sigma);
        if (xk >= xprev) continue;
        if (xk < xi_match) break;
        advance_branch(rhs, dp, xprev, xk, in);
        xprev = xk;
    }
    if (xprev > xi_match) advance_branch(rhs, dp, xprev, xi_match, in);

    const double sig = std::max(p, 1.0);
    const double nl = std::hypot(FL, FLp / sig);
    const double nr = std::hypot(in.y[0], in.y[1] / sig);
    RadialShot shot;
    shot.mismatch =
        (nl > 0 && nr > 0) ? (FL * in.y[1] - FLp * in.y[0]) / (nl * nr) : 0.0;
    shot.nodes = out.nodes;
    shot.xi_match = xi_match;
    shot.xi_max = xi_max;
    return shot;
}

} // namespace hscs
