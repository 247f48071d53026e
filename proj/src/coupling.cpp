#include "hscs/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

namespace hscs {

using json = nlohmann::json;

// ---------------------------------------------------------------- potential

RegularizedPotential RegularizedPotential::from_system(const ParticleSystem& sys) {
    RegularizedPotential p;
    p.Z1 = sys.Z1();
    p.Z2 = sys.Z2();
    const auto& rm = sys.masses();
    p.M = rm.M;
    p.mu = rm.mu;
    p.mu1 = rm.mu1;
    p.mu2 = rm.mu2;
    p.t1 = sys.tgeom().t1;
    p.t2 = sys.tgeom().t2;
    return p;
}

namespace {
// ((1+t^2)/(1+ta^2))^{3/2} - 1 with x = (t^2-ta^2)/(1+ta^2); the Taylor
// branch removes the 0/0 noise near the coalescence points.
double bracket32(double x) {
    if (std::abs(x) < 1e-6) return x * (1.5 + 0.375 * x);
    return std::expm1(1.5 * std::log1p(x));
}
} // namespace

double RegularizedPotential::w12(double t) const {
    return Z1 * Z2 * std::sqrt(2.0 * M) * std::sqrt(1.0 + t * t);
}

double RegularizedPotential::w13(double t, double theta) const {
    const double r1t = std::sqrt(t * t + t1 * t1 + 2.0 * t * t1 * std::cos(theta));
    if (r1t == 0.0) return w13_limit();
    const double x = (t * t - t1 * t1) / (1.0 + t1 * t1);
    return Z1 * std::sqrt(2.0 * mu) * std::sqrt(1.0 + t * t) * bracket32(x) / r1t;
}

double RegularizedPotential::w23(double t, double theta) const {
    const double r2t = std::sqrt(t * t + t2 * t2 - 2.0 * t * t2 * std::cos(theta));
    if (r2t == 0.0) return w23_limit();
    const double x = (t * t - t2 * t2) / (1.0 + t2 * t2);
    return Z2 * std::sqrt(2.0 * mu) * std::sqrt(1.0 + t * t) * bracket32(x) / r2t;
}

double RegularizedPotential::sum(double t, double theta) const {
    return w12(t) + w13(t, theta) + w23(t, theta);
}

double RegularizedPotential::w13_limit() const {
    return 3.0 * Z1 * std::sqrt(2.0 * (mu - mu1));
}

double RegularizedPotential::w23_limit() const {
    return 3.0 * Z2 * std::sqrt(2.0 * (mu - mu2));
}

double RegularizedPotential::sum_xi_eta(double xi, double eta) const {
    const double d = t1 + t2;
    const double c1 = 0.5 * (t2 * t2 - t1 * t1);
    const double t_sq =
        -t1 * t2 + c1 * xi * eta + 0.25 * d * d * (xi * xi + eta * eta);
    const double v = 1.0 + t_sq;
    const double r1t = 0.5 * d * (xi + eta);
    const double r2t = 0.5 * d * (xi - eta);
    double s = Z1 * Z2 * std::sqrt(2.0 * M) * std::sqrt(v);
    s += (r1t > 0) ? Z1 * std::sqrt(2.0 * mu) * std::sqrt(v) *
                         bracket32((t_sq - t1 * t1) / (1.0 + t1 * t1)) / r1t
                   : w13_limit();
    s += (r2t > 0) ? Z2 * std::sqrt(2.0 * mu) * std::sqrt(v) *
                         bracket32((t_sq - t2 * t2) / (1.0 + t2 * t2)) / r2t
                   : w23_limit();
    return s;
}

// -------------------------------------------------------------- matrix kernels

namespace {

// coefficients of 1+t^2 = c0 + c1 xi eta + c2 (xi^2 + eta^2)
struct VPoly {
    double c0, c1, c2, d;
    VPoly(double t1, double t2)
        : c0(1.0 - t1 * t2), c1(0.5 * (t2 * t2 - t1 * t1)),
          c2(0.25 * (t1 + t2) * (t1 + t2)), d(t1 + t2) {}
    double v(double xi, double eta) const {
        return c0 + c1 * xi * eta + c2 * (xi * xi + eta * eta);
    }
    double v_xi(double xi, double eta) const { return c1 * eta + 2.0 * c2 * xi; }
    double v_eta(double xi, double eta) const { return c1 * xi + 2.0 * c2 * eta; }
};

VPoly vpoly_of(std::span<const SampledState> states) {
    const auto& prob = states.front().state->prob;
    return VPoly(prob.t1, prob.t2);
}

} // namespace

Eigen::MatrixXd compute_U(std::span<const SampledState> states,
                          const QuadratureGrid& grid, double rho) {
    return compute_U(states, grid, rho, nullptr);
}

Eigen::MatrixXd compute_R(std::span<const SampledState> states, int J,
                          const QuadratureGrid& grid) {
    const int n = int(states.size());
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    if (n == 0) return R;
    const int m = states.front().m;
    const double pref = double(J) * (J + 1) - 2.0 * m * m;
    if (pref == 0.0) return R; // structural zero
    const VPoly vp = vpoly_of(states);
    const double meas = grid.d * grid.d * grid.d / 8.0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < grid.xi.size(); ++k) {
                const double xi = grid.xi[k];
                const double xx = grid.wxi[k] * states[i].X[k] * states[j].X[k];
                double row = 0;
                for (std::size_t l = 0; l < grid.eta.size(); ++l) {
                    const double eta = grid.eta[l];
                    row += grid.weta[l] * states[i].Y[l] * states[j].Y[l] *
                           (xi * xi - eta * eta) * vp.v(xi, eta);
                }
                s += xx * row;
            }
            R(i, j) = R(j, i) = pref * meas * s;
        }
    return R;
}

Eigen::MatrixXd compute_U(std::span<const SampledState> states,
                          const QuadratureGrid& grid, double rho,
                          double* raw_sym_residual) {
    // U_ij = rho^{-2} <phi_i | v h_m v | phi_j> with v = 1+t^2, evaluated by
    // direct application of h_m to (v phi_j): the eigenrelation h_m phi = eps
    // phi supplies the v^2 eps term and the product rule supplies the exact
    // first-derivative remainder; no commutator shortcut is taken.
    const int n = int(states.size());
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n);
    if (n == 0) return U;
    const VPoly vp = vpoly_of(states);
    const double d = grid.d;
    const double meas = d * d * d / 8.0;
    const double lap_pref = 4.0 / (d * d);
    Eigen::MatrixXd raw(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < grid.xi.size(); ++k) {
                const double xi = grid.xi[k];
                const double u = (xi - 1.0) * (xi + 1.0);
                double row = 0;
                for (std::size_t l = 0; l < grid.eta.size(); ++l) {
                    const double eta = grid.eta[l];
                    const double om = (1.0 - eta) * (1.0 + eta);
                    const double v = vp.v(xi, eta);
                    const double vx = vp.v_xi(xi, eta);
                    const double ve = vp.v_eta(xi, eta);
                    const double phi_i = states[i].X[k] * states[i].Y[l];
                    const double phi_j = states[j].X[k] * states[j].Y[l];
                    const double lap =
                        2.0 * u * vx * states[j].dX[k] * states[j].Y[l] +
                        2.0 * om * ve * states[j].X[k] * states[j].dY[l] +
                        phi_j * (2.0 * xi * vx + u * 2.0 * vp.c2 - 2.0 * eta * ve +
                                 om * 2.0 * vp.c2);
                    row += grid.weta[l] *
                           ((xi * xi - eta * eta) * states[j].eps * v * v * phi_i *
                                phi_j -
                            lap_pref * phi_i * v * lap);
                }
                s += grid.wxi[k] * row;
            }
            raw(i, j) = meas * s / (rho * rho);
        }
    if (raw_sym_residual)
        *raw_sym_residual = 0.5 * (raw - raw.transpose()).cwiseAbs().maxCoeff();
    U = 0.5 * (raw + raw.transpose());
    return U;
}

Eigen::MatrixXd compute_W(std::span<const SampledState> states,
                          const QuadratureGrid& grid,
                          const RegularizedPotential& pot, double rho) {
    const int n = int(states.size());
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> wk(grid.xi.size() * grid.eta.size());
    for (std::size_t k = 0; k < grid.xi.size(); ++k)
        for (std::size_t l = 0; l < grid.eta.size(); ++l)
            wk[k * grid.eta.size() + l] = pot.sum_xi_eta(grid.xi[k], grid.eta[l]);
    const double meas = grid.d * grid.d * grid.d / 8.0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < grid.xi.size(); ++k) {
                const double xi = grid.xi[k];
                const double xx = grid.wxi[k] * states[i].X[k] * states[j].X[k];
                double row = 0;
                for (std::size_t l = 0; l < grid.eta.size(); ++l) {
                    const double eta = grid.eta[l];
                    row += grid.weta[l] * states[i].Y[l] * states[j].Y[l] *
                           (xi * xi - eta * eta) * wk[k * grid.eta.size() + l];
                }
                s += xx * row;
            }
            W(i, j) = W(j, i) = meas * s / rho;
        }
    return W;
}

Eigen::MatrixXd compute_T(std::span<const SampledState> bra,
                          std::span<const SampledState> ket, int J,
                          const QuadratureGrid& grid) {
    // T_{i m, j m'} = sqrt(J(J+1) - m m') sqrt(1 + delta_{m,1})
    //                 <phi_im | (1+t^2)(-d/dtheta + m' cot(theta)) | phi_jm'>
    const int nb = int(bra.size()), nk = int(ket.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(nb, nk);
    if (nb == 0 || nk == 0 || J == 0) return T;
    const int m = bra.front().m, mp = ket.front().m;
    if (std::abs(m - mp) != 1)
        throw MMismatch("compute_T couples m to m' = m +- 1 only");
    const double pref = std::sqrt(double(J) * (J + 1) - double(m) * mp) *
                        std::sqrt(1.0 + (m == 1 ? 1.0 : 0.0));
    const VPoly vp = vpoly_of(bra);
    const double d = grid.d;
    const double half_d = 0.5 * d;
    const double zc = 0.5 * (ket.front().state->prob.t2 - ket.front().state->prob.t1);
    const double meas = d * d * d / 8.0;
    const double t1 = bra.front().state->prob.t1;
    const double t2 = bra.front().state->prob.t2;
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nk; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < grid.xi.size(); ++k) {
                const double xi = grid.xi[k];
                double row = 0;
                for (std::size_t l = 0; l < grid.eta.size(); ++l) {
                    const double eta = grid.eta[l];
                    const double r1t = half_d * (xi + eta);
                    const double r2t = half_d * (xi - eta);
                    const double xp = half_d * std::sqrt((xi * xi - 1.0) *
                                                         (1.0 - eta * eta));
                    const double zp = zc + half_d * xi * eta;
                    // d(xi)/d(theta), d(eta)/d(theta) at fixed t
                    const double dxi_dth = xp * (-t1 / r1t + t2 / r2t) / d;
                    const double deta_dth = -xp * (t1 / r1t + t2 / r2t) / d;
                    const double dphi_dth = ket[j].dX[k] * ket[j].Y[l] * dxi_dth +
                                            ket[j].X[k] * ket[j].dY[l] * deta_dth;
                    const double phi_j = ket[j].X[k] * ket[j].Y[l];
                    const double cot_term =
                        (mp != 0) ? mp * (zp / xp) * phi_j : 0.0;
                    row += grid.weta[l] * (xi * xi - eta * eta) *
                           bra[i].X[k] * bra[i].Y[l] * vp.v(xi, eta) *
                           (-dphi_dth + cot_term);
                }
                s += grid.wxi[k] * row;
            }
            T(i, j) = pref * meas * s;
        }
    return T;
}

PQResult compute_PQ(std::span<const SampledState> states,
                    std::span<const SampledState> plus,
                    std::span<const SampledState> minus, double delta,
                    const QuadratureGrid& grid) {
    const int n = int(states.size());
    PQResult out;
    out.P = Eigen::MatrixXd::Zero(n, n);
    out.Q = Eigen::MatrixXd::Zero(n, n);
    if (n == 0) return out;

    const std::size_t nx = grid.xi.size(), ne = grid.eta.size();
    // phi = X Y factorizes but its rho-difference does not; expand the
    // products of the shifted factor sets instead.
    Eigen::MatrixXd rawQ(n, n), rawP(n, n);
    auto pair_overlap = [&](const SampledState& A, const SampledState& B) {
        double rx0 = 0, rx2 = 0;
        for (std::size_t k = 0; k < nx; ++k) {
            const double w = grid.wxi[k] * A.X[k] * B.X[k];
            rx0 += w;
            rx2 += w * grid.xi[k] * grid.xi[k];
        }
        double ae0 = 0, ae2 = 0;
        for (std::size_t l = 0; l < ne; ++l) {
            const double w = grid.weta[l] * A.Y[l] * B.Y[l];
            ae0 += w;
            ae2 += w * grid.eta[l] * grid.eta[l];
        }
        return grid.d * grid.d * grid.d / 8.0 * (rx2 * ae0 - rx0 * ae2);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            rawQ(i, j) =
                (pair_overlap(plus[i], states[j]) - pair_overlap(minus[i], states[j])) /
                delta;
            rawP(i, j) = (pair_overlap(plus[i], plus[j]) -
                          pair_overlap(plus[i], minus[j]) -
                          pair_overlap(minus[i], plus[j]) +
                          pair_overlap(minus[i], minus[j])) /
                         (delta * delta);
        }
    out.q_antisym_residual = 0.5 * (rawQ + rawQ.transpose()).cwiseAbs().maxCoeff();
    out.p_sym_residual = 0.5 * (rawP - rawP.transpose()).cwiseAbs().maxCoeff();
    out.Q = 0.5 * (rawQ - rawQ.transpose());
    out.P = 0.5 * (rawP + rawP.transpose());
    return out;
}

// ------------------------------------------------------------------ pipeline

namespace {

struct FamilyLadder {
    BasisStateId id;
    std::vector<CsfState> states; // one per rho grid point
};

CsfState solve_with_guess(const ParticleSystem& sys, double rho,
                          const BasisStateId& id, std::optional<double> guess) {
    return solve_state(sys, rho, id.m, id.n_xi, id.n_eta, guess);
}

// one grid point: quadrature grid, +-delta/2 and +-delta states, matrices
CouplingPoint build_point(const ParticleSystem& sys, const BasisSpec& basis,
                          const std::vector<FamilyLadder>& ladders, int k,
                          double rho, const CouplingOptions& opt) {
    const int n = int(basis.states.size());
    std::vector<CsfState> centre;
    centre.reserve(n);
    for (int f = 0; f < n; ++f) centre.push_back(ladders[f].states[k]);

    QuadratureGrid grid = build_grid(centre, opt.grid_tol);

    const double delta = std::max(1e-4, opt.delta_rho_rel * rho);
    std::vector<CsfState> plus_h, minus_h, plus_f, minus_f;
    for (int f = 0; f < n; ++f) {
        const auto g = std::optional<double>(centre[f].eps);
        const auto& id = basis.states[f];
        plus_h.push_back(solve_with_guess(sys, rho + 0.5 * delta, id, g));
        minus_h.push_back(solve_with_guess(sys, rho - 0.5 * delta, id, g));
        plus_f.push_back(solve_with_guess(sys, rho + delta, id, g));
        minus_f.push_back(solve_with_guess(sys, rho - delta, id, g));
    }

    std::vector<SampledState> sc, sph, smh, spf, smf;
    for (int f = 0; f < n; ++f) {
        sc.push_back(sample_state(centre[f], grid));
        sph.push_back(sample_state(plus_h[f], grid));
        smh.push_back(sample_state(minus_h[f], grid));
        spf.push_back(sample_state(plus_f[f], grid));
        smf.push_back(sample_state(minus_f[f], grid));
    }

    CouplingPoint pt;
    pt.rho = rho;
    pt.eps.resize(n);
    for (int f = 0; f < n; ++f) pt.eps[f] = centre[f].eps;

    // group indices by projection m (matrices block over equal m)
    std::vector<int> ms;
    for (const auto& s : basis.states)
        if (std::find(ms.begin(), ms.end(), s.m) == ms.end()) ms.push_back(s.m);
    std::sort(ms.begin(), ms.end());

    pt.P = Eigen::MatrixXd::Zero(n, n);
    pt.Q = Eigen::MatrixXd::Zero(n, n);
    pt.R = Eigen::MatrixXd::Zero(n, n);
    pt.U = Eigen::MatrixXd::Zero(n, n);
    pt.W = Eigen::MatrixXd::Zero(n, n);
    pt.T = Eigen::MatrixXd::Zero(n, n);

    const RegularizedPotential pot = RegularizedPotential::from_system(sys);

    auto indices_of = [&](int m) {
        std::vector<int> idx;
        for (int f = 0; f < n; ++f)
            if (basis.states[f].m == m) idx.push_back(f);
        return idx;
    };
    auto gather = [&](const std::vector<SampledState>& all,
                      const std::vector<int>& idx) {
        std::vector<SampledState> out;
        for (int f : idx) out.push_back(all[f]);
        return out;
    };
    auto scatter_block = [&](Eigen::MatrixXd& full, const Eigen::MatrixXd& blk,
                             const std::vector<int>& rows,
                             const std::vector<int>& cols) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                full(rows[i], cols[j]) = blk(int(i), int(j));
    };

    for (int m : ms) {
        const auto idx = indices_of(m);
        const auto bc = gather(sc, idx);
        const auto bph = gather(sph, idx), bmh = gather(smh, idx);

        PQResult pq = compute_PQ(bc, bph, bmh, delta, grid);
        // halving check: the delta/2 pair against the full-delta pair; the
        // residual bounds the remaining O(delta^2) error at ~|diff|/3
        PQResult pq2 = compute_PQ(bc, gather(spf, idx), gather(smf, idx),
                                  2.0 * delta, grid);
        const double qscale = std::max(pq.Q.cwiseAbs().maxCoeff(), 1e-3);
        if ((pq.Q - pq2.Q).cwiseAbs().maxCoeff() > 3e-4 * qscale)
            throw StepTooLarge("rho-derivative step failed the halving check");

        scatter_block(pt.P, pq.P, idx, idx);
        scatter_block(pt.Q, pq.Q, idx, idx);
        pt.q_antisym_residual = std::max(pt.q_antisym_residual,
                                         pq.q_antisym_residual);
        pt.p_sym_residual = std::max(pt.p_sym_residual, pq.p_sym_residual);

        scatter_block(pt.R, compute_R(bc, basis.J, grid), idx, idx);

        double u_res = 0;
        Eigen::MatrixXd Ublk = compute_U(bc, grid, rho, &u_res);
        pt.u_sym_residual = std::max(pt.u_sym_residual, u_res);
        scatter_block(pt.U, Ublk, idx, idx);

        // W integrand is manifestly i<->j symmetric; only the upper triangle
        // is evaluated, so no raw residual exists for it
        Eigen::MatrixXd Wblk = compute_W(bc, grid, pot, rho);
        scatter_block(pt.W, Wblk, idx, idx);

        // T couples this block to m+1 (both orientations enter the system)
        if (basis.J > 0) {
            const auto idx_up = indices_of(m + 1);
            if (!idx_up.empty()) {
                const auto bup = gather(sc, idx_up);
                // rows with projection m couple to columns with m+1 through
                // the transposed-orientation element T_{j m+1, i m}
                Eigen::MatrixXd Tup = compute_T(bup, bc, basis.J, grid);
                for (std::size_t i = 0; i < idx.size(); ++i)
                    for (std::size_t j = 0; j < idx_up.size(); ++j)
                        pt.T(idx[i], idx_up[j]) = Tup(int(j), int(i));
                // rows with m+1 couple back through T_{j m+1, i m} as well
                for (std::size_t i = 0; i < idx_up.size(); ++i)
                    for (std::size_t j = 0; j < idx.size(); ++j)
                        pt.T(idx_up[i], idx[j]) = Tup(int(i), int(j));
            }
        }
    }

    pt.w_sym_residual = 0.0;
    return pt;
}

CouplingSet build_coupling_set(const ParticleSystem& sys, const BasisSpec& basis,
                               const std::vector<double>& rho_grid,
                               const CouplingOptions& opt, bool parallel) {
    if (rho_grid.size() < 2)
        throw ValidationError("coupling grid needs at least two rho points");
    if (!std::is_sorted(rho_grid.begin(), rho_grid.end()) || rho_grid.front() <= 0)
        throw ValidationError("rho grid must be ascending and positive");
    if (basis.states.empty()) throw ValidationError("empty basis");

    const int nfam = int(basis.states.size());
    const int npts = int(rho_grid.size());

    // phase A: term ladders, sequential in rho (continuation); independent
    // across families. phase B: matrices per grid point; independent across
    // points. Both phases write only their own slots, so the parallel and
    // serial paths produce bitwise-identical results.
    std::vector<FamilyLadder> ladders(nfam);
    auto ladder_task = [&](int f) {
        ladders[f].id = basis.states[f];
        ladders[f].states.reserve(npts);
        std::optional<double> guess;
        for (int k = 0; k < npts; ++k) {
            CsfState st = solve_with_guess(sys, rho_grid[k], basis.states[f], guess);
            guess = st.eps;
            ladders[f].states.push_back(std::move(st));
        }
    };

    CouplingSet set;
    set.basis = basis;
    set.rho = rho_grid;
    set.points.resize(npts);
    auto point_task = [&](int k) {
        set.points[k] = build_point(sys, basis, ladders, k, rho_grid[k], opt);
    };

    if (!parallel) {
        for (int f = 0; f < nfam; ++f) ladder_task(f);
        for (int k = 0; k < npts; ++k) point_task(k);
    } else {
        std::exception_ptr err;
#ifdef _OPENMP
        const int nthreads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
        for (int f = 0; f < nfam; ++f) {
            try {
                ladder_task(f);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
        for (int k = 0; k < npts; ++k) {
            try {
                point_task(k);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
#else
        for (int f = 0; f < nfam; ++f) ladder_task(f);
        for (int k = 0; k < npts; ++k) point_task(k);
#endif
    }

    // phase C: channel labels from the ladders, extending past the grid if
    // the last point is not yet asymptotic
    if (opt.classify) {
        set.labels.resize(nfam);
        for (int f = 0; f < nfam; ++f) {
            try {
                set.labels[f] = classify(sys, ladders[f].states);
            } catch (const AmbiguousLabel&) {
                std::vector<CsfState> ext = ladders[f].states;
                double rho_ext = rho_grid.back();
                bool done = false;
                for (int g = 0; g < 4 && !done; ++g) {
                    rho_ext *= 2.0;
                    ext.push_back(solve_with_guess(sys, rho_ext, basis.states[f],
                                                   ext.back().eps));
                    try {
                        set.labels[f] = classify(sys, ext);
                        done = true;
                    } catch (const AmbiguousLabel&) {
                    }
                }
                if (!done) throw;
            }
        }
    }
    return set;
}

} // namespace

CouplingSet compute_coupling_set(const ParticleSystem& sys, const BasisSpec& basis,
                                 const std::vector<double>& rho_grid,
                                 const CouplingOptions& opt) {
    if (opt.jobs == 1)
        return build_coupling_set(sys, basis, rho_grid, opt, false);
    return build_coupling_set(sys, basis, rho_grid, opt, true);
}

CouplingSet compute_coupling_set_serial(const ParticleSystem& sys,
                                        const BasisSpec& basis,
                                        const std::vector<double>& rho_grid,
                                        CouplingOptions opt) {
    opt.jobs = 1;
    return build_coupling_set(sys, basis, rho_grid, opt, false);
}

// -------------------------------------------------------------- serialization

std::string CouplingSet::to_json() const {
    json j;
    j["J"] = basis.J;
    json bs = json::array();
    for (const auto& s : basis.states) bs.push_back({s.m, s.n_xi, s.n_eta});
    j["basis"] = bs;
    json lb = json::array();
    for (const auto& l : labels)
        lb.push_back({l.alpha, l.n, l.s, l.m, l.verified});
    j["labels"] = lb;
    j["rho"] = rho;
    json entries = json::array();
    const char* names[6] = {"P", "Q", "R", "U", "W", "T"};
    for (std::size_t k = 0; k < points.size(); ++k) {
        const Eigen::MatrixXd* mats[6] = {&points[k].P, &points[k].Q, &points[k].R,
                                          &points[k].U, &points[k].W, &points[k].T};
        for (int f = 0; f < 6; ++f) {
            const auto& M = *mats[f];
            for (int i = 0; i < M.rows(); ++i)
                for (int jj = 0; jj < M.cols(); ++jj)
                    if (M(i, jj) != 0.0)
                        entries.push_back(
                            {int(k), names[f], i, jj, M(i, jj)});
        }
        for (std::size_t i = 0; i < points[k].eps.size(); ++i)
            entries.push_back({int(k), "eps", int(i), int(i), points[k].eps[i]});
    }
    j["entries"] = entries;
    return j.dump();
}

CouplingSet CouplingSet::from_json(const std::string& text) {
    json j = json::parse(text);
    CouplingSet set;
    set.basis.J = j.at("J").get<int>();
    for (const auto& s : j.at("basis"))
        set.basis.states.push_back({s.at(0).get<int>(), s.at(1).get<int>(),
                                    s.at(2).get<int>()});
    for (const auto& l : j.at("labels")) {
        ChannelLabel cl;
        cl.alpha = l.at(0).get<int>();
        cl.n = l.at(1).get<int>();
        cl.s = l.at(2).get<int>();
        cl.m = l.at(3).get<int>();
        cl.verified = l.at(4).get<bool>();
        set.labels.push_back(cl);
    }
    set.rho = j.at("rho").get<std::vector<double>>();
    const int n = set.size();
    set.points.assign(set.rho.size(), CouplingPoint{});
    for (std::size_t k = 0; k < set.points.size(); ++k) {
        auto& pt = set.points[k];
        pt.rho = set.rho[k];
        pt.P = pt.Q = pt.R = pt.U = pt.W = pt.T = Eigen::MatrixXd::Zero(n, n);
        pt.eps.assign(n, 0.0);
    }
    for (const auto& e : j.at("entries")) {
        const int k = e.at(0).get<int>();
        const std::string name = e.at(1).get<std::string>();
        const int i = e.at(2).get<int>(), jj = e.at(3).get<int>();
        const double v = e.at(4).get<double>();
        auto& pt = set.points.at(k);
        if (name == "P") pt.P(i, jj) = v;
        else if (name == "Q") pt.Q(i, jj) = v;
        else if (name == "R") pt.R(i, jj) = v;
        else if (name == "U") pt.U(i, jj) = v;
        else if (name == "W") pt.W(i, jj) = v;
        else if (name == "T") pt.T(i, jj) = v;
        else if (name == "eps") pt.eps.at(i) = v;
        else throw ValidationError("unknown coupling entry name: " + name);
    }
    return set;
}

} // namespace hscs
