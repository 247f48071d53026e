#include "hscs/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "csf_internal.hpp"
#include "hscs/legendre.hpp"

namespace hscs {

namespace {

// xi extent of one state: first table node past the peak where the
// amplitude has dropped below e^{tail} of the peak.
double state_extent(const CsfState& st, double tail) {
    const auto& xs = st.X.F.xs();
    const auto& fs = st.X.F.ys();
    double peak = 0;
    std::size_t ipeak = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double u = (xs[i] - 1.0) * (xs[i] + 1.0);
        const double amp = std::abs(fs[i]) * std::pow(u, 0.5 * st.m);
        if (amp > peak) {
            peak = amp;
            ipeak = i;
        }
    }
    if (peak <= 0) return st.X.xi_max;
    const double cut = peak * std::exp(tail);
    for (std::size_t i = ipeak; i < xs.size(); ++i) {
        const double u = (xs[i] - 1.0) * (xs[i] + 1.0);
        if (std::abs(fs[i]) * std::pow(u, 0.5 * st.m) < cut) return xs[i];
    }
    return st.X.xi_max;
}

// variation scale near the peak (sets the first panel width)
double state_scale(const CsfState& st) {
    const auto& xs = st.X.F.xs();
    const auto& fs = st.X.F.ys();
    double peak = 0;
    double xi_peak = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double u = (xs[i] - 1.0) * (xs[i] + 1.0);
        const double amp = std::abs(fs[i]) * std::pow(u, 0.5 * st.m);
        if (amp > peak) {
            peak = amp;
            xi_peak = xs[i];
        }
    }
    const double width = std::max(xi_peak - 1.0, 0.3 / std::max(st.X.p, 1e-8));
    return std::max(width / (st.n_xi + 2.0), 1e-9);
}

QuadratureGrid make_grid(std::span<const CsfState> states, int eta_order,
                         int panel_order, double ratio, double w0, double xi_max) {
    QuadratureGrid g;
    g.d = states.front().prob.d;
    g.xi_max = xi_max;
    gauss_legendre(eta_order, g.eta, g.weta);

    std::vector<double> edges{1.0};
    double w = w0;
    while (edges.back() < xi_max) {
        edges.push_back(std::min(edges.back() + w, xi_max));
        w *= ratio;
    }
    composite_gauss_legendre(edges, panel_order, g.xi, g.wxi);
    return g;
}

} // namespace

void sample_radial(const RadialSolution& sol, std::span<const double> xi_points,
                   std::vector<double>& X, std::vector<double>& dX) {
    using namespace internal;
    const std::size_t n = xi_points.size();
    X.assign(n, 0.0);
    dX.assign(n, 0.0);
    if (n == 0) return;

    DormandPrince dp;
    dp.rel_tol = 1e-11;
    dp.abs_tol = 1e-300;
    RadialRhs rhs{sol.a, sol.p, sol.lambda, sol.m, false};

    const double xm = sol.xi_match;
    const double f_ref = sol.F(xm);
    if (f_ref == 0.0)
        throw NoConvergence("sample_radial: reference value underflowed");

    struct Raw {
        std::size_t idx;
        double F, Fp, L;
    };

    auto convert = [&](const std::vector<Raw>& raws, double ln_cal, double sign_cal) {
        for (const auto& r : raws) {
            const double xi = xi_points[r.idx];
            const double u = (xi - 1.0) * (xi + 1.0);
            const double um = std::pow(u, 0.5 * sol.m);
            if (r.F != 0.0) {
                const double v = ((r.F > 0) ? 1.0 : -1.0) * sign_cal *
                                 std::exp(std::log(std::abs(r.F)) + r.L + ln_cal);
                X[r.idx] = um * v;
                // dX = u^{m/2} (F' + m xi F / u)
                const double fp = ((r.Fp > 0) ? 1.0 : (r.Fp < 0 ? -1.0 : 0.0)) *
                                  sign_cal *
                                  ((r.Fp == 0.0)
                                       ? 0.0
                                       : std::exp(std::log(std::abs(r.Fp)) + r.L +
                                                  ln_cal));
                dX[r.idx] = um * (fp + sol.m * xi * v / u);
            }
        }
    };

    // outward branch: points at or below the glue abscissa
    {
        std::vector<Raw> raws;
        BranchState out;
        out.y = {0, 0};
        const double s0 = 1e-8;
        outward_seed(sol.a, sol.p, sol.m, sol.lambda, s0, out.y[0], out.y[1]);
        double xprev = 1.0 + s0;
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = xi_points[i];
            if (xi > xm || xi <= xprev) continue;
            advance_branch(rhs, dp, xprev, xi, out);
            xprev = xi;
            raws.push_back({i, out.y[0], out.y[1], out.logscale});
        }
        if (xprev < xm) advance_branch(rhs, dp, xprev, xm, out);
        if (out.y[0] != 0.0) {
            const double ln_cal = std::log(std::abs(f_ref)) -
                                  (std::log(std::abs(out.y[0])) + out.logscale);
            const double sign_cal = ((f_ref > 0) == (out.y[0] > 0)) ? 1.0 : -1.0;
            convert(raws, ln_cal, sign_cal);
        }
    }

    // inward branch: points above the glue abscissa, visited downward
    {
        std::vector<Raw> raws;
        BranchState in;
        in.y = {0, 0};
        inward_seed(sol.a, sol.p, sol.m, sol.xi_max, in.y[0], in.y[1]);
        double xprev = sol.xi_max;
        for (std::size_t ii = n; ii-- > 0;) {
            const double xi = xi_points[ii];
            if (xi <= xm || xi >= xprev) continue;
            advance_branch(rhs, dp, xprev, xi, in);
            xprev = xi;
            raws.push_back({ii, in.y[0], in.y[1], in.logscale});
        }
        if (!raws.empty()) {
            if (xprev > xm) advance_branch(rhs, dp, xprev, xm, in);
            if (in.y[0] != 0.0) {
                const double ln_cal = std::log(std::abs(f_ref)) -
                                      (std::log(std::abs(in.y[0])) + in.logscale);
                const double sign_cal = ((f_ref > 0) == (in.y[0] > 0)) ? 1.0 : -1.0;
                convert(raws, ln_cal, sign_cal);
            }
        }
    }
}

SampledState sample_state(const CsfState& st, const QuadratureGrid& grid) {
    SampledState s;
    s.state = &st;
    s.eps = st.eps;
    s.m = st.m;
    std::vector<double> pts;
    pts.reserve(grid.xi.size());
    for (double x : grid.xi) pts.push_back(std::min(x, st.X.xi_max));
    sample_radial(st.X, pts, s.X, s.dX);
    s.Y.resize(grid.eta.size());
    s.dY.resize(grid.eta.size());
    for (std::size_t j = 0; j < grid.eta.size(); ++j) {
        s.Y[j] = st.Y.eval(grid.eta[j]);
        s.dY[j] = st.Y.deriv(grid.eta[j]);
    }
    return s;
}

QuadratureGrid build_grid(std::span<const CsfState> states, double tol,
                          const GridOptions& opt) {
    if (states.empty()) throw IndexOutOfRange("build_grid: empty state set");

    int eta_order = opt.eta_order;
    if (eta_order <= 0) {
        int lmax = 0;
        for (const auto& st : states)
            lmax = std::max(lmax, st.m + int(st.Y.coeffs.size()));
        eta_order = lmax + 8;
    }
    double xi_max = 0, w0 = 1e300;
    for (const auto& st : states) {
        xi_max = std::max(xi_max, state_extent(st, opt.tail_log_amp));
        w0 = std::min(w0, state_scale(st));
    }
    w0 = std::min(w0, xi_max - 1.0);

    int order = opt.panel_order;
    for (int round = 0;; ++round) {
        QuadratureGrid g =
            make_grid(states, eta_order, order, opt.panel_ratio, w0, xi_max);
        double worst = 0;
        for (const auto& st : states) {
            SampledState s = sample_state(st, g);
            double x0 = 0, x2 = 0;
            for (std::size_t i = 0; i < g.xi.size(); ++i) {
                const double xx = s.X[i] * s.X[i] * g.wxi[i];
                x0 += xx;
                x2 += xx * g.xi[i] * g.xi[i];
            }
            double y2 = 0;
            for (std::size_t j = 0; j < g.eta.size(); ++j)
                y2 += s.Y[j] * s.Y[j] * g.weta[j] * g.eta[j] * g.eta[j];
            const double norm =
                g.d * g.d * g.d / 8.0 * (x2 * 1.0 - x0 * y2);
            worst = std::max(worst, std::abs(norm - 1.0));
        }
        if (worst <= tol) return g;
        if (round >= opt.max_refinements)
            throw GridOverflow("quadrature grid failed to reproduce state norms");
        order += 6;
        w0 *= 0.5;
        eta_order = int(eta_order * 1.3) + 4;
    }
}

} // namespace hscs
