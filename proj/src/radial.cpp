#include "hscs/radial.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "hscs/kinematics.hpp"
#include "hscs/ode.hpp"

namespace hscs {

using json = nlohmann::json;

double Channel::theta(double rho, int J) const {
    const double gamma_bar = (gamma_coef != 0.0 && q > 0)
                                 ? gamma_coef * std::log(2.0 * q * rho)
                                 : 0.0;
    return q * rho - gamma_bar - 0.5 * M_PI * J;
}

double Channel::theta_deriv(double rho) const { return q - gamma_coef / rho; }

ChannelSpace build_channel_space(const ParticleSystem& sys, double E,
                                 const std::vector<ChannelLabel>& labels) {
    if (E >= 0) throw AboveBreakup("scattering below the three-body breakup only");
    ChannelSpace cs;
    cs.E = E;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& lab = labels[i];
        Channel ch;
        ch.basis_index = int(i);
        ch.label = lab;
        const ChannelKinematics ck = channel_kinematics(sys, E, lab.alpha, lab.n);
        ch.threshold = ck.threshold;
        ch.open = ck.open;
        ch.q = ck.q;
        ch.kappa = ck.kappa;
        ch.k = ck.k;
        ch.gamma_coef = ck.gamma_coef;
        cs.channels.push_back(ch);
    }
    std::stable_sort(cs.channels.begin(), cs.channels.end(),
                     [](const Channel& a, const Channel& b) {
                         if (a.open != b.open) return a.open;
                         return a.threshold < b.threshold;
                     });
    cs.n_total = int(cs.channels.size());
    cs.n_open = int(std::count_if(cs.channels.begin(), cs.channels.end(),
                                  [](const Channel& c) { return c.open; }));
    if (cs.n_open == 0)
        throw NoOpenChannel("all channels closed at this energy");
    return cs;
}

// ----------------------------------------------------------- radial operator

RadialOperator::RadialOperator(const CouplingSet& set, double E, int J)
    : n_(set.size()), J_(J), E_(E) {
    if (set.points.empty()) throw ValidationError("empty coupling set");
    if (J != set.basis.J)
        throw ValidationError("operator J differs from the coupling set's J");
    rho_min_ = set.rho.front();
    rho_max_ = set.rho.back();

    auto build = [&](auto pick, std::vector<CubicSpline>& out) {
        out.reserve(std::size_t(n_) * n_);
        std::vector<double> vals(set.rho.size());
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                for (std::size_t k = 0; k < set.rho.size(); ++k)
                    vals[k] = pick(set.points[k])(i, j);
                out.emplace_back(set.rho, vals);
            }
    };
    build([](const CouplingPoint& p) -> const Eigen::MatrixXd& { return p.P; }, sP_);
    build([](const CouplingPoint& p) -> const Eigen::MatrixXd& { return p.Q; }, sQ_);
    build([](const CouplingPoint& p) -> const Eigen::MatrixXd& { return p.R; }, sR_);
    build([](const CouplingPoint& p) -> const Eigen::MatrixXd& { return p.U; }, sU_);
    build([](const CouplingPoint& p) -> const Eigen::MatrixXd& { return p.W; }, sW_);
    build([](const CouplingPoint& p) -> const Eigen::MatrixXd& { return p.T; }, sT_);
}

void RadialOperator::check_range(double rho) const {
    if (rho < rho_min_ - 1e-12 || rho > rho_max_ + 1e-12)
        throw RhoOutOfRange("rho outside the coupling grid");
}

Eigen::MatrixXd RadialOperator::eval(const std::vector<CubicSpline>& s,
                                     double rho) const {
    Eigen::MatrixXd M(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) M(i, j) = s[std::size_t(i) * n_ + j](rho);
    return M;
}

Eigen::MatrixXd RadialOperator::P(double rho) const { check_range(rho); return eval(sP_, rho); }
Eigen::MatrixXd RadialOperator::Q(double rho) const { check_range(rho); return eval(sQ_, rho); }
Eigen::MatrixXd RadialOperator::R(double rho) const { check_range(rho); return eval(sR_, rho); }
Eigen::MatrixXd RadialOperator::U(double rho) const { check_range(rho); return eval(sU_, rho); }
Eigen::MatrixXd RadialOperator::W(double rho) const { check_range(rho); return eval(sW_, rho); }
Eigen::MatrixXd RadialOperator::T(double rho) const { check_range(rho); return eval(sT_, rho); }

Eigen::MatrixXd RadialOperator::dQ(double rho) const {
    check_range(rho);
    Eigen::MatrixXd M(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            M(i, j) = sQ_[std::size_t(i) * n_ + j].deriv(rho);
    return M;
}

Eigen::MatrixXd RadialOperator::system_matrix(double rho) const {
    check_range(rho);
    const int n = n_;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    S.topRightCorner(n, n).setIdentity();
    Eigen::MatrixXd C = dQ(rho) + eval(sP_, rho) + eval(sU_, rho) + eval(sW_, rho) +
                        (eval(sR_, rho) + eval(sT_, rho)) / (rho * rho);
    C.diagonal().array() += 3.0 / (4.0 * rho * rho) - E_;
    S.bottomLeftCorner(n, n) = C;
    S.bottomRightCorner(n, n) = 2.0 * eval(sQ_, rho);
    return S;
}

// ---------------------------------------------------------------- propagator

namespace {

// QR re-orthonormalization of the stacked [g; g'] columns; returns the
// smallest |R_ii|.
double reorthonormalize(Eigen::MatrixXd& Y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    const int n = int(Y.cols());
    Eigen::MatrixXd Qthin =
        qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), n);
    Eigen::MatrixXd Rm =
        qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    double min_d = 1e300;
    for (int i = 0; i < n; ++i) {
        const double di = std::abs(Rm(i, i));
        min_d = std::min(min_d, di);
        if (Rm(i, i) < 0) Qthin.col(i) = -Qthin.col(i); // deterministic sign
    }
    Y = Qthin;
    return min_d;
}

} // namespace

PropagatorState integrate(const RadialOperator& op, const ChannelSpace& channels,
                          double rho0, double rho_max,
                          const PropagatorOptions& opt) {
    (void)channels;
    const int n = op.dim();
    if (rho0 <= 0 || rho_max <= rho0)
        throw ValidationError("need 0 < rho0 < rho_max");
    op.system_matrix(rho0); // range check at both ends
    op.system_matrix(rho_max);

    // regular branch: g ~ rho^{3/2} on every basis column
    Eigen::MatrixXd Y(2 * n, n);
    Y.topRows(n) = std::pow(rho0, 1.5) * Eigen::MatrixXd::Identity(n, n);
    Y.bottomRows(n) = 1.5 * std::sqrt(rho0) * Eigen::MatrixXd::Identity(n, n);

    DormandPrince dp;
    dp.rel_tol = opt.rel_tol;
    dp.abs_tol = opt.abs_tol;

    std::vector<double> y(std::size_t(2 * n) * n);
    auto to_vec = [&]() {
        for (int c = 0; c < n; ++c)
            for (int r = 0; r < 2 * n; ++r) y[std::size_t(c) * 2 * n + r] = Y(r, c);
    };
    auto from_vec = [&]() {
        for (int c = 0; c < n; ++c)
            for (int r = 0; r < 2 * n; ++r) Y(r, c) = y[std::size_t(c) * 2 * n + r];
    };

    Eigen::MatrixXd S(2 * n, 2 * n);
    Eigen::VectorXd yc(2 * n), dyc(2 * n);
    auto rhs = [&](double rho, const std::vector<double>& yy,
                   std::vector<double>& dyy) {
        S = op.system_matrix(rho);
        for (int c = 0; c < n; ++c) {
            for (int r = 0; r < 2 * n; ++r) yc(r) = yy[std::size_t(c) * 2 * n + r];
            dyc.noalias() = S * yc;
            for (int r = 0; r < 2 * n; ++r) dyy[std::size_t(c) * 2 * n + r] = dyc(r);
        }
    };

    PropagatorState ps;
    ps.rho0 = rho0;
    ps.rho_max = rho_max;
    ps.rho_w2 = opt.window2 * rho_max;
    ps.rho_w1 = opt.window * rho_max;
    ps.rho_b = rho_max;
    ps.min_column_scale = 1e300;

    // chunked propagation with re-orthonormalization up to the first window
    const int chunks = std::max(4, opt.chunks);
    double rho = rho0;
    for (int k = 1; k <= chunks; ++k) {
        // geometric spacing resolves the rho^{3/2} region near the origin
        const double target =
            rho0 * std::pow(ps.rho_w2 / rho0, double(k) / chunks);
        to_vec();
        dp.integrate(rhs, rho, target, y);
        from_vec();
        rho = target;
        if (k < chunks) {
            const double sc = reorthonormalize(Y);
            ps.min_column_scale = std::min(ps.min_column_scale, sc);
            if (sc < 1e-250)
                throw LinearDependence("column collapse during propagation");
            ++ps.orthonormalizations;
        }
    }
    // final stretch without re-orthonormalization so all three snapshots
    // share one column basis
    ps.g_w2 = Y.topRows(n);
    ps.gp_w2 = Y.bottomRows(n);
    to_vec();
    dp.integrate(rhs, rho, ps.rho_w1, y);
    from_vec();
    ps.g_w1 = Y.topRows(n);
    ps.gp_w1 = Y.bottomRows(n);
    to_vec();
    dp.integrate(rhs, ps.rho_w1, ps.rho_b, y);
    from_vec();
    ps.g_b = Y.topRows(n);
    ps.gp_b = Y.bottomRows(n);
    return ps;
}

// -------------------------------------------------------------------- match

namespace {

struct WindowFit {
    Eigen::MatrixXd K;
    double residual = 0;
    double condition = 0;
};

WindowFit fit_window(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& hp1,
                     double rho1, const Eigen::MatrixXd& h2,
                     const Eigen::MatrixXd& hp2, double rho2,
                     const ChannelSpace& cs, int J) {
    const int no = cs.n_open;
    Eigen::MatrixXd A(no, no), C(no, no);
    double residual = 0;
    for (int i = 0; i < no; ++i) {
        const Channel& ch = cs.channels[i];
        const int r = ch.basis_index;
        const double th1 = ch.theta(rho1, J), th2 = ch.theta(rho2, J);
        const double w1 = ch.theta_deriv(rho1), w2 = ch.theta_deriv(rho2);
        Eigen::Matrix<double, 4, 2> B;
        B << std::sin(th1), std::cos(th1), std::cos(th1), -std::sin(th1),
            std::sin(th2), std::cos(th2), std::cos(th2), -std::sin(th2);
        Eigen::Matrix<double, 4, Eigen::Dynamic> rhs(4, no);
        for (int c = 0; c < no; ++c) {
            rhs(0, c) = h1(r, c);
            rhs(1, c) = hp1(r, c) / w1;
            rhs(2, c) = h2(r, c);
            rhs(3, c) = hp2(r, c) / w2;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            B, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::MatrixXd sol = svd.solve(rhs);
        residual = std::max(residual, (B * sol - rhs).cwiseAbs().maxCoeff());
        for (int c = 0; c < no; ++c) {
            A(i, c) = sol(0, c);
            C(i, c) = sol(1, c);
        }
    }

    Eigen::FullPivLu<Eigen::MatrixXd> lu(A);
    WindowFit out;
    out.residual = residual;
    Eigen::JacobiSVD<Eigen::MatrixXd> condsvd(A);
    const double smin = condsvd.singularValues().minCoeff();
    const double smax = condsvd.singularValues().maxCoeff();
    out.condition = (smin > 0) ? smax / smin : 1e300;
    if (out.condition > 1e10)
        throw IllConditionedMatch("sin-coefficient matrix nearly singular");
    Eigen::MatrixXd D = -C * lu.inverse();
    // K_ij = sqrt(q_i / q_j) D_ij
    out.K.resize(no, no);
    for (int i = 0; i < no; ++i)
        for (int j = 0; j < no; ++j)
            out.K(i, j) = std::sqrt(cs.channels[i].q / cs.channels[j].q) * D(i, j);
    return out;
}

} // namespace

MatchResult match(const PropagatorState& prop, const ChannelSpace& cs, int J) {
    const int n = cs.n_total;
    const int no = cs.n_open, ncl = n - no;

    // combinations that cancel the growing closed-channel content at rho_max
    Eigen::MatrixXd Cmb;
    if (ncl > 0) {
        Eigen::MatrixXd G(ncl, n);
        for (int c = 0; c < ncl; ++c) {
            const Channel& ch = cs.channels[no + c];
            const int r = ch.basis_index;
            for (int col = 0; col < n; ++col)
                G(c, col) = prop.g_b(r, col) + prop.gp_b(r, col) / ch.kappa;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
        Cmb = svd.matrixV().rightCols(no);
    } else {
        Cmb = Eigen::MatrixXd::Identity(n, n);
    }

    const Eigen::MatrixXd h_w1 = prop.g_w1 * Cmb, hp_w1 = prop.gp_w1 * Cmb;
    const Eigen::MatrixXd h_b = prop.g_b * Cmb, hp_b = prop.gp_b * Cmb;

    MatchResult out;

    // contamination and decay diagnostics on the physical combinations
    double max_open = 0, max_closed = 0, decay_defect = 0;
    for (int i = 0; i < no; ++i)
        max_open = std::max(max_open,
                            h_b.row(cs.channels[i].basis_index).cwiseAbs().maxCoeff());
    for (int c = 0; c < ncl; ++c) {
        const Channel& ch = cs.channels[no + c];
        const int r = ch.basis_index;
        max_closed = std::max(max_closed, h_b.row(r).cwiseAbs().maxCoeff());
        // log-slope of the dominant column against -kappa
        int cbest = 0;
        h_w1.row(r).cwiseAbs().maxCoeff(&cbest);
        const double a1 = std::abs(h_w1(r, cbest)), a2 = std::abs(h_b(r, cbest));
        if (a1 > 0 && a2 > 0) {
            const double slope = std::log(a2 / a1) / (prop.rho_b - prop.rho_w1);
            decay_defect =
                std::max(decay_defect, std::abs(slope + ch.kappa) / ch.kappa);
        }
    }
    out.closed_contamination =
        (ncl > 0 && max_open > 0) ? std::log(max_closed / max_open) : -1e300;
    if (ncl > 0 && out.closed_contamination > -15.0)
        throw ClosedChannelContamination(
            "closed channels not decayed at rho_max; extend the range");
    out.closed_decay_defect = decay_defect;

    WindowFit fit =
        fit_window(h_w1, hp_w1, prop.rho_w1, h_b, hp_b, prop.rho_b, cs, J);
    out.K = fit.K;
    out.fit_residual = fit.residual;
    out.condition = fit.condition;
    return out;
}

// ------------------------------------------------------------------- algebra

Eigen::MatrixXcd k_to_stilde(const Eigen::MatrixXd& K, int J) {
    const int n = int(K.rows());
    const std::complex<double> I(0.0, 1.0);
    Eigen::MatrixXcd Kc = K.cast<std::complex<double>>();
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(n, n);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(one - I * Kc);
    if (!lu.isInvertible())
        throw SingularMatrix("1 - iK is singular; cannot form the S matrix");
    const double sgn = (J % 2 == 0) ? 1.0 : -1.0;
    return sgn * lu.inverse() * (one + I * Kc);
}

Eigen::MatrixXd stilde_to_k(const Eigen::MatrixXcd& S, int J) {
    const int n = int(S.rows());
    const std::complex<double> I(0.0, 1.0);
    const double sgn = (J % 2 == 0) ? 1.0 : -1.0;
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(n, n);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(one + sgn * S);
    if (!lu.isInvertible())
        throw SingularMatrix("1 + (-1)^J S is singular; cannot recover K");
    Eigen::MatrixXcd K = I * (one - sgn * S) * lu.inverse();
    return K.real();
}

// ----------------------------------------------------------------- pipeline

double choose_rho_max(const CouplingSet& set, const ChannelSpace& cs,
                      bool* capped) {
    double emin = 1e300;
    for (int i = 0; i < cs.n_open; ++i)
        emin = std::min(emin, std::abs(cs.E - cs.channels[i].threshold));
    const double cut = 1e-6 * emin;

    double rho_star = -1;
    for (std::size_t k = 0; k < set.rho.size(); ++k) {
        double worst = 0;
        for (int i = 0; i < cs.n_open; ++i)
            for (int j = 0; j < cs.n_open; ++j) {
                if (i == j) continue;
                const int bi = cs.channels[i].basis_index;
                const int bj = cs.channels[j].basis_index;
                worst = std::max({worst, std::abs(set.points[k].Q(bi, bj)),
                                  std::abs(set.points[k].U(bi, bj)),
                                  std::abs(set.points[k].W(bi, bj))});
            }
        if (worst < cut) {
            rho_star = set.rho[k];
            break;
        }
    }
    bool cap = false;
    double rho_max;
    if (rho_star < 0) {
        rho_max = set.rho.back();
        cap = true;
    } else {
        rho_max = 3.0 * rho_star;
        if (rho_max > set.rho.back()) {
            rho_max = set.rho.back();
            cap = true;
        }
    }
    if (capped) *capped = cap;
    return rho_max;
}

ScatteringSolution solve_scattering(const ParticleSystem& sys,
                                    const CouplingSet& set, double E,
                                    const ScatterOptions& opt) {
    ScatteringSolution sol;
    sol.E = E;
    sol.J = set.basis.J;
    sol.channels = build_channel_space(sys, E, set.labels);

    double rho_max = opt.rho_max;
    if (rho_max <= 0) {
        rho_max = choose_rho_max(set, sol.channels, &sol.rho_max_capped);
    } else if (rho_max > set.rho.back()) {
        throw RhoOutOfRange("requested rho_max exceeds the coupling grid");
    }
    double rho0 = opt.rho0_frac * rho_max;
    rho0 = std::max(rho0, set.rho.front());

    RadialOperator op(set, E, set.basis.J);
    PropagatorState prop = integrate(op, sol.channels, rho0, rho_max, opt.prop);
    MatchResult mr = match(prop, sol.channels, set.basis.J);

    // window-shift sensitivity: refit on (window2, window1)
    {
        PropagatorState shifted = prop;
        shifted.rho_w1 = prop.rho_w2;
        shifted.g_w1 = prop.g_w2;
        shifted.gp_w1 = prop.gp_w2;
        shifted.rho_b = prop.rho_w1;
        shifted.g_b = prop.g_w1;
        shifted.gp_b = prop.gp_w1;
        try {
            MatchResult mr2 = match(shifted, sol.channels, set.basis.J);
            sol.rho_max_sensitivity = (mr2.K - mr.K).cwiseAbs().maxCoeff();
        } catch (const Error&) {
            sol.rho_max_sensitivity = -1; // window too tight to compare
        }
    }

    sol.K = mr.K;
    sol.S = k_to_stilde(mr.K, set.basis.J);
    sol.k_symmetry_defect = (mr.K - mr.K.transpose()).cwiseAbs().maxCoeff();
    Eigen::MatrixXcd uni =
        sol.S * sol.S.adjoint() -
        Eigen::MatrixXcd::Identity(sol.K.rows(), sol.K.rows());
    sol.s_unitarity_defect = uni.cwiseAbs().maxCoeff();
    sol.rho0 = rho0;
    sol.rho_max = rho_max;
    sol.closed_decay_defect = mr.closed_decay_defect;
    sol.fit_residual = mr.fit_residual;
    return sol;
}

std::string ScatteringSolution::to_json() const {
    json j;
    j["E"] = E;
    j["J"] = J;
    json chs = json::array();
    for (const auto& c : channels.channels) {
        json jc;
        jc["alpha"] = c.label.alpha;
        jc["n"] = c.label.n;
        jc["s"] = c.label.s;
        jc["m"] = c.label.m;
        jc["threshold"] = c.threshold;
        jc["open"] = c.open;
        if (c.open)
            jc["q"] = c.q;
        else
            jc["kappa"] = c.kappa;
        jc["basis_index"] = c.basis_index;
        chs.push_back(jc);
    }
    j["channels"] = chs;
    auto mat = [](const Eigen::MatrixXd& M) {
        json rows = json::array();
        for (int i = 0; i < M.rows(); ++i) {
            json r = json::array();
            for (int jj = 0; jj < M.cols(); ++jj) r.push_back(M(i, jj));
            rows.push_back(r);
        }
        return rows;
    };
    j["K"] = mat(K);
    j["S_tilde"]["re"] = mat(S.real());
    j["S_tilde"]["im"] = mat(S.imag());
    j["diagnostics"] = {{"k_symmetry_defect", k_symmetry_defect},
                        {"s_unitarity_defect", s_unitarity_defect},
                        {"rho0", rho0},
                        {"rho_max", rho_max},
                        {"rho_max_capped", rho_max_capped},
                        {"rho_max_sensitivity", rho_max_sensitivity},
                        {"closed_decay_defect", closed_decay_defect},
                        {"fit_residual", fit_residual}};
    return j.dump(2);
}

} // namespace hscs
