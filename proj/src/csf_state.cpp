#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "csf_internal.hpp"
#include "hscs/csf.hpp"

namespace hscs {

double CtcProblem::p_of_eps(double eps) const {
    if (eps >= 0) throw ContinuumState("discrete spectrum requires eps < 0");
    return 0.5 * d * std::sqrt(-eps);
}

CtcProblem ctc_problem(const ParticleSystem& sys, double rho, int m) {
    if (rho < 0) throw GeometryViolation("rho must be >= 0");
    const auto& rm = sys.masses();
    CtcProblem prob;
    const double c = rho / std::sqrt(2.0 * rm.mu * rm.M);
    prob.a = c * (sys.Z1() * std::pow(rm.mu1, 1.5) + sys.Z2() * std::pow(rm.mu2, 1.5));
    prob.b = c * (sys.Z2() * std::pow(rm.mu2, 1.5) - sys.Z1() * std::pow(rm.mu1, 1.5));
    prob.d = sys.tgeom().d;
    prob.t1 = sys.tgeom().t1;
    prob.t2 = sys.tgeom().t2;
    prob.m = m;
    return prob;
}

namespace {

struct Shot {
    RadialShot radial;
    double lambda = 0;
};

Shot shoot(const CtcProblem& prob, int n_eta, double eps) {
    const double p = prob.p_of_eps(eps);
    Shot s;
    s.lambda = angular_eigenvalue(p * p, prob.b, prob.m, n_eta).lambda;
    s.radial = radial_mismatch(prob.a, p, prob.m, s.lambda);
    return s;
}

// Brent root search; f must change sign on [x1, x2].
double brent(const std::function<double(double)>& f, double x1, double x2, double f1,
             double f2, double xtol) {
    double a = x1, b = x2, fa = f1, fb = f2;
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                            0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                                   std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    throw NoConvergence("brent: root polish did not converge");
}

// Tabulated, normalized radius factor at a converged eigenpair.
RadialSolution tabulate_radial(const CtcProblem& prob, double eps, double lambda,
                               double y2_moment, int n_eta_for_msg) {
    using namespace internal;
    (void)n_eta_for_msg;
    const double a = prob.a, p = prob.p_of_eps(eps);
    const int m = prob.m;
    const double xi_max = radial_xi_max(a, p, m);
    const double sigma = radial_sigma(p, xi_max);
    const double xt = radial_turning_point(a, p, m, lambda);
    const double xi_c_raw = std::clamp(1.0 + 0.8 * (xt - 1.0),
                                       1.0 + 1e-10 * (xi_max - 1.0),
                                       1.0 + 0.8 * (xi_max - 1.0));

    const int n_tab = 1200;
    std::vector<double> nodes(n_tab);
    for (int j = 0; j < n_tab; ++j)
        nodes[j] = radial_stretch(double(j) / (n_tab - 1), xi_max, sigma);
    nodes.front() = 1.0;
    nodes.back() = xi_max;
    int j_c = int(std::lower_bound(nodes.begin(), nodes.end(), xi_c_raw) -
                  nodes.begin());
    j_c = std::clamp(j_c, 2, n_tab - 3);

    DormandPrince dp;
    dp.rel_tol = 1e-11;
    dp.abs_tol = 1e-300;
    RadialRhs rhs{a, p, lambda, m, true};

    struct NodeVal {
        double F = 0, Fp = 0, L = 0;
    };
    std::vector<NodeVal> tab(n_tab);

    // outward: Taylor seed just off xi = 1, through every node up to j_c
    const double s0 = 1e-8;
    BranchState out;
    out.y = {0, 0, 0, 0};
    outward_seed(a, p, m, lambda, s0, out.y[0], out.y[1]);
    {
        double F1, Fp1;
        outward_seed(a, p, m, lambda, 0.0, F1, Fp1);
        tab[0] = {F1, Fp1, 0.0};
    }
    double xprev = 1.0 + s0;
    for (int j = 1; j <= j_c; ++j) {
        advance_branch(rhs, dp, xprev, nodes[j], out);
        xprev = nodes[j];
        tab[j] = {out.y[0], out.y[1], out.logscale};
    }
    const double I0_out = out.y[2], I2_out = out.y[3], L_out = out.logscale;

    // inward: decaying seed at xi_max, down to (but not overwriting) j_c
    BranchState in;
    in.y = {0, 0, 0, 0};
    inward_seed(a, p, m, xi_max, in.y[0], in.y[1]);
    tab[n_tab - 1] = {in.y[0], in.y[1], 0.0};
    xprev = xi_max;
    for (int j = n_tab - 2; j >= j_c; --j) {
        advance_branch(rhs, dp, xprev, nodes[j], in);
        xprev = nodes[j];
        if (j > j_c) tab[j] = {in.y[0], in.y[1], in.logscale};
    }
    // inward integrals ran downward; flip to the [xi_c, xi_max] orientation
    const double I0_in = -in.y[2], I2_in = -in.y[3], L_in = in.logscale;

    // branch ratio gamma = outward/inward in true units at the match node
    const double Fo = tab[j_c].F, Fi = in.y[0];
    if (Fo == 0.0 || Fi == 0.0)
        throw NoConvergence("radial match lands on a node; cannot glue branches");
    const double ln_gamma = (std::log(std::abs(Fo)) + L_out) -
                            (std::log(std::abs(Fi)) + L_in);
    const double sign_gamma = ((Fo > 0) == (Fi > 0)) ? 1.0 : -1.0;

    // combined norm integrals (true outward units), via log-sum-exp
    auto ln_or_min = [](double v) {
        return v > 0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    };
    const double ln_I0o = ln_or_min(I0_out) + 2.0 * L_out;
    const double ln_I2o = ln_or_min(I2_out) + 2.0 * L_out;
    const double ln_I0i = ln_or_min(I0_in) + 2.0 * L_in + 2.0 * ln_gamma;
    const double ln_I2i = ln_or_min(I2_in) + 2.0 * L_in + 2.0 * ln_gamma;
    const double R = std::max(std::max(ln_I0o, ln_I0i), std::max(ln_I2o, ln_I2i));
    const double x0s = std::exp(ln_I0o - R) + std::exp(ln_I0i - R);
    const double x2s = std::exp(ln_I2o - R) + std::exp(ln_I2i - R);

    const double measure = prob.d * prob.d * prob.d / 8.0;
    const double norm_sq_scaled = measure * (x2s - x0s * y2_moment);
    if (!(norm_sq_scaled > 0))
        throw NoConvergence("non-positive norm in radial tabulation");
    const double ln_norm = 0.5 * (R + std::log(norm_sq_scaled));

    RadialSolution sol;
    sol.a = a;
    sol.p = p;
    sol.lambda = lambda;
    sol.m = m;
    sol.xi_max = xi_max;
    sol.norm0 = std::exp(R + std::log(x0s) - 2.0 * ln_norm);
    sol.norm2 = std::exp(R + std::log(x2s) - 2.0 * ln_norm);

    std::vector<double> Fv(n_tab), Fpv(n_tab);
    auto emit = [&](const NodeVal& nv, double extra_ln, double extra_sign,
                    double& F_out, double& Fp_out) {
        const double base = extra_ln - ln_norm;
        F_out = (nv.F == 0.0)
                    ? 0.0
                    : extra_sign * ((nv.F > 0) ? 1.0 : -1.0) *
                          std::exp(std::log(std::abs(nv.F)) + nv.L + base);
        Fp_out = (nv.Fp == 0.0)
                     ? 0.0
                     : extra_sign * ((nv.Fp > 0) ? 1.0 : -1.0) *
                           std::exp(std::log(std::abs(nv.Fp)) + nv.L + base);
    };
    for (int j = 0; j <= j_c; ++j) emit(tab[j], 0.0, 1.0, Fv[j], Fpv[j]);
    for (int j = j_c + 1; j < n_tab; ++j)
        emit(tab[j], ln_gamma, sign_gamma, Fv[j], Fpv[j]);

    int nodes_count = 0;
    double prev_sign = 0;
    for (int j = 0; j < n_tab; ++j) {
        const double s = (Fv[j] > 0) ? 1.0 : (Fv[j] < 0 ? -1.0 : 0.0);
        if (s != 0 && prev_sign != 0 && s != prev_sign) ++nodes_count;
        if (s != 0) prev_sign = s;
    }
    sol.n_xi = nodes_count;
    sol.F = HermiteTable(nodes, std::move(Fv), std::move(Fpv));
    return sol;
}

} // namespace

double RadialSolution::eval(double xi) const {
    if (xi < 1.0) throw OutOfDomain("xi must be >= 1");
    if (xi >= xi_max) return 0.0;
    const double u = (xi - 1.0) * (xi + 1.0);
    return std::pow(u, 0.5 * m) * F(xi);
}

double RadialSolution::eval_deriv(double xi) const {
    if (xi < 1.0) throw OutOfDomain("xi must be >= 1");
    if (xi >= xi_max) return 0.0;
    const double u = (xi - 1.0) * (xi + 1.0);
    const double um = std::pow(u, 0.5 * m);
    if (m == 0) return F.deriv(xi);
    return um * (F.deriv(xi) + m * xi * F(xi) / u);
}

CsfState solve_state(const CtcProblem& prob_in, int n_xi, int n_eta,
                     std::optional<double> eps_guess) {
    CtcProblem prob = prob_in;
    if (prob.m < 0 || n_xi < 0 || n_eta < 0)
        throw IndexOutOfRange("quantum numbers must be non-negative");
    if (prob.d <= 0) throw GeometryViolation("focal distance must be > 0");
    if (prob.a <= 0)
        throw NoBracket("no attraction (a <= 0): no discrete spectrum");
    // parameter-level problems default to symmetric foci
    if (std::abs(prob.t1 + prob.t2 - prob.d) > 1e-9 * std::max(prob.d, 1.0)) {
        prob.t1 = prob.t2 = 0.5 * prob.d;
    }

    auto nu = [&](double eps) { return shoot(prob, n_eta, eps); };

    // strictly below the united-atom ground level
    const double zsum = prob.eff_Z1() + prob.eff_Z2();
    const double e_floor = -(0.25 * zsum * zsum + 1.0) * 1.05;

    double lo = 0, hi = 0;
    Shot shot_lo, shot_hi;
    bool have = false;
    if (eps_guess && *eps_guess < 0) {
        for (double w : {0.02, 0.06, 0.18, 0.45}) {
            lo = std::max(*eps_guess * (1.0 + w), e_floor);
            hi = *eps_guess * (1.0 - w);
            shot_lo = nu(lo);
            shot_hi = nu(hi);
            if (shot_lo.radial.nodes <= n_xi && shot_hi.radial.nodes >= n_xi + 1) {
                have = true;
                break;
            }
        }
    }
    if (!have) {
        lo = e_floor;
        shot_lo = nu(lo);
        if (shot_lo.radial.nodes > n_xi)
            throw NoBracket("node count already exceeded at the lower energy bound");
        hi = e_floor * 1e-2;
        for (int k = 0; k < 8; ++k) {
            shot_hi = nu(hi);
            if (shot_hi.radial.nodes >= n_xi + 1) {
                have = true;
                break;
            }
            lo = hi;
            shot_lo = shot_hi;
            hi *= 1e-2;
        }
        if (!have)
            throw NoBracket("no eigenvalue with the requested node counts");
    }

    // bisect on the outward node count down to an adjacent, sign-changing window
    for (int iter = 0;; ++iter) {
        const bool adjacent =
            shot_lo.radial.nodes == n_xi && shot_hi.radial.nodes == n_xi + 1;
        const bool sign_change = (shot_lo.radial.mismatch > 0) !=
                                 (shot_hi.radial.mismatch > 0);
        if (adjacent && sign_change) break;
        if (std::abs(hi - lo) < 1e-14 * std::abs(lo)) break; // degenerate-tight
        if (iter > 200) throw NoConvergence("node-count bisection stalled");
        const double mid = 0.5 * (lo + hi);
        Shot sm = nu(mid);
        if (sm.radial.nodes <= n_xi) {
            lo = mid;
            shot_lo = sm;
        } else {
            hi = mid;
            shot_hi = sm;
        }
    }

    double eps_star;
    if ((shot_lo.radial.mismatch > 0) != (shot_hi.radial.mismatch > 0)) {
        auto f = [&](double e) { return nu(e).radial.mismatch; };
        eps_star = brent(f, lo, hi, shot_lo.radial.mismatch, shot_hi.radial.mismatch,
                         std::abs(lo) * 1e-13);
    } else {
        eps_star = 0.5 * (lo + hi);
    }

    const double p_star = prob.p_of_eps(eps_star);
    AngularSolution ang = angular_eigenvalue(p_star * p_star, prob.b, prob.m, n_eta);

    CsfState st;
    st.prob = prob;
    st.m = prob.m;
    st.n_xi = n_xi;
    st.n_eta = n_eta;
    st.eps = eps_star;
    st.lambda = ang.lambda;
    st.Y = std::move(ang);
    st.X = tabulate_radial(prob, eps_star, st.lambda, st.Y.eta_moment(2), n_eta);
    if (st.X.n_xi != n_xi)
        throw NoConvergence("converged branch has wrong radial node count");
    st.standard_sign = true;
    return st;
}

CsfState solve_state(const ParticleSystem& sys, double rho, int m, int n_xi,
                     int n_eta, std::optional<double> eps_guess) {
    if (rho <= 0) throw GeometryViolation("solve_state requires rho > 0");
    CsfState st = solve_state(ctc_problem(sys, rho, m), n_xi, n_eta, eps_guess);
    st.rho = rho;
    return st;
}

double CsfState::evaluate(double xi, double eta) const {
    if (xi < 1.0 || std::abs(eta) > 1.0)
        throw OutOfDomain("evaluate: need xi >= 1, |eta| <= 1");
    return X.eval(xi) * Y.eval(eta);
}

double CsfState::d_xi(double xi, double eta) const {
    if (xi < 1.0 || std::abs(eta) > 1.0)
        throw OutOfDomain("d_xi: need xi >= 1, |eta| <= 1");
    return X.eval_deriv(xi) * Y.eval(eta);
}

double CsfState::d_eta(double xi, double eta) const {
    if (xi < 1.0 || std::abs(eta) > 1.0)
        throw OutOfDomain("d_eta: need xi >= 1, |eta| <= 1");
    return X.eval(xi) * Y.deriv(eta);
}

double CsfState::eta_centroid() const {
    const double measure = prob.d * prob.d * prob.d / 8.0;
    return measure * (X.norm2 * Y.eta_moment(1) - X.norm0 * Y.eta_moment(3));
}

void CsfState::flip_sign() {
    for (double& c : Y.coeffs) c = -c;
    standard_sign = !standard_sign;
}

StateDerivative d_rho(const ParticleSystem& sys, const CsfState& state,
                      double delta_rho) {
    if (delta_rho <= 0 || state.rho - delta_rho <= 0)
        throw StepTooLarge("delta_rho must be positive and below rho");
    StateDerivative d;
    d.delta = delta_rho;
    const auto g = std::optional<double>(state.eps);
    d.plus2 = solve_state(sys, state.rho + delta_rho, state.m, state.n_xi,
                          state.n_eta, g);
    d.minus2 = solve_state(sys, state.rho - delta_rho, state.m, state.n_xi,
                           state.n_eta, g);
    d.plus = solve_state(sys, state.rho + 0.5 * delta_rho, state.m, state.n_xi,
                         state.n_eta, g);
    d.minus = solve_state(sys, state.rho - 0.5 * delta_rho, state.m, state.n_xi,
                          state.n_eta, g);
    if (!state.standard_sign) {
        d.plus.flip_sign();
        d.minus.flip_sign();
        d.plus2.flip_sign();
        d.minus2.flip_sign();
    }

    // Richardson consistency between the delta and delta/2 estimates on a
    // sample of interior points.
    double num = 0, den = 0;
    const double xm = std::min(d.plus.X.xi_max, d.minus.X.xi_max);
    for (int i = 1; i <= 8; ++i) {
        const double xi =
            1.0 + (xm - 1.0) * std::pow(double(i) / 9.0, 3.0); // cluster near 1
        for (double eta : {-0.9, -0.45, 0.0, 0.45, 0.9}) {
            const double d1 = (d.plus2.evaluate(xi, eta) -
                               d.minus2.evaluate(xi, eta)) /
                              (2.0 * delta_rho);
            const double d2 =
                (d.plus.evaluate(xi, eta) - d.minus.evaluate(xi, eta)) / delta_rho;
            num += (d1 - d2) * (d1 - d2);
            den += d2 * d2;
        }
    }
    d.richardson_residual = (den > 0) ? std::sqrt(num / den) / 3.0 : 0.0;
    if (d.richardson_residual > 1e-4)
        throw StepTooLarge("d_rho Richardson check failed; reduce delta_rho");
    return d;
}

double StateDerivative::eval(double xi, double eta) const {
    return (plus.evaluate(xi, eta) - minus.evaluate(xi, eta)) / delta;
}

ChannelLabel classify(const ParticleSystem& sys, std::span<const CsfState> ladder) {
    if (ladder.empty()) throw IndexOutOfRange("classify: empty ladder");
    const CsfState& last = ladder.back();
    const double centroid = last.eta_centroid();
    if (std::abs(centroid) < 0.9)
        throw AmbiguousLabel("state not localized at the largest rho; extend ladder");
    ChannelLabel lab;
    lab.alpha = centroid > 0 ? 2 : 1;
    lab.m = last.m;
    lab.s = last.n_xi;
    const auto& rm = sys.masses();
    const double mu_a = rm.mu_atom(lab.alpha);
    const double Za = sys.Z(lab.alpha);
    const double scaled = last.eps / (last.rho * last.rho);
    if (scaled >= 0) throw AmbiguousLabel("non-negative scaled eigenvalue");
    const double n_real =
        std::sqrt(mu_a * mu_a * mu_a * Za * Za / (-2.0 * rm.mu * rm.mu * scaled));
    lab.n = int(std::lround(n_real));
    if (lab.n < 1 || std::abs(n_real - lab.n) > 0.2)
        throw AmbiguousLabel("scaled eigenvalue off the hydrogenic ladder");
    if (lab.m > lab.n - 1 || lab.s > lab.n - lab.m - 1)
        throw AmbiguousLabel("label inconsistent with quantum-number bounds");
    lab.verified = false;
    return lab;
}

} // namespace hscs
