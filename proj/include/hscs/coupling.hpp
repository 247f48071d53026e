#ifndef HSCS_COUPLING_HPP
#define HSCS_COUPLING_HPP

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hscs/quadrature.hpp"

namespace hscs {

// Short-range part of the potential left over after the two-centre
// Hamiltonian is split off; finite at both coalescence points.
//   w12 = Z1 Z2 sqrt(2M) sqrt(1+t^2)
//   w13 = Z1 sqrt(2mu) sqrt(1+t^2) [((1+t^2)/(1+t1^2))^{3/2} - 1] / |t - t_1|
//   w23 = likewise around t_2
struct RegularizedPotential {
    double Z1 = 0, Z2 = 0;
    double M = 0, mu = 0, mu1 = 0, mu2 = 0;
    double t1 = 0, t2 = 0;

    static RegularizedPotential from_system(const ParticleSystem& sys);

    double w12(double t) const;
    double w13(double t, double theta) const;
    double w23(double t, double theta) const;
    double sum(double t, double theta) const;

    // radial-approach limits at the coalescence points
    double w13_limit() const;
    double w23_limit() const;

    // same integrand expressed in (xi, eta) on the sphere (used by the
    // quadrature path; avoids the cancellation in |t - t_a|)
    double sum_xi_eta(double xi, double eta) const;
};

struct BasisStateId {
    int m = 0, n_xi = 0, n_eta = 0;
    bool operator==(const BasisStateId&) const = default;
};

struct BasisSpec {
    int J = 0;
    std::vector<BasisStateId> states;
};

// All coupling matrices at one grid point, indexed by the basis order.
// T is stored in global form: T(i,j) couples state i to state j with
// m_j = m_i -+ 1 exactly as it enters the radial system.
struct CouplingPoint {
    double rho = 0;
    Eigen::MatrixXd P, Q, R, U, W, T;
    std::vector<double> eps;
    double q_antisym_residual = 0;
    double p_sym_residual = 0;
    double u_sym_residual = 0;
    double w_sym_residual = 0;
};

struct CouplingSet {
    BasisSpec basis;
    std::vector<ChannelLabel> labels; // per basis state
    std::vector<double> rho;
    std::vector<CouplingPoint> points;

    int size() const { return int(basis.states.size()); }
    std::string to_json() const;
    static CouplingSet from_json(const std::string& text);
};

// Per-family matrix builders; all states share one rho.
Eigen::MatrixXd compute_R(std::span<const SampledState> states, int J,
                          const QuadratureGrid& grid);
Eigen::MatrixXd compute_U(std::span<const SampledState> states,
                          const QuadratureGrid& grid, double rho);
Eigen::MatrixXd compute_U(std::span<const SampledState> states,
                          const QuadratureGrid& grid, double rho,
                          double* raw_sym_residual);
Eigen::MatrixXd compute_W(std::span<const SampledState> states,
                          const QuadratureGrid& grid,
                          const RegularizedPotential& pot, double rho);
Eigen::MatrixXd compute_T(std::span<const SampledState> bra,
                          std::span<const SampledState> ket, int J,
                          const QuadratureGrid& grid);

struct PQResult {
    Eigen::MatrixXd P, Q;
    double q_antisym_residual = 0;
    double p_sym_residual = 0;
};

// P = <d phi_i | d phi_j>, Q = <d phi_i | phi_j> from central differences of
// the states at rho +- delta/2 (already solved and sign-fixed).
PQResult compute_PQ(std::span<const SampledState> states,
                    std::span<const SampledState> plus,
                    std::span<const SampledState> minus, double delta,
                    const QuadratureGrid& grid);

struct CouplingOptions {
    double delta_rho_rel = 1e-4; // delta = max(1e-4, delta_rho_rel * rho)
    double grid_tol = 1e-10;
    int jobs = 0;   // 0: OpenMP default, 1: serial reference, n: n threads
    bool classify = true;
};

// Full pipeline over a rho grid: term ladders with continuation, then the
// matrix families at every grid point. Deterministic for any thread count.
CouplingSet compute_coupling_set(const ParticleSystem& sys, const BasisSpec& basis,
                                 const std::vector<double>& rho_grid,
                                 const CouplingOptions& opt = {});

// Plain-loop reference implementation (identical output).
CouplingSet compute_coupling_set_serial(const ParticleSystem& sys,
                                        const BasisSpec& basis,
                                        const std::vector<double>& rho_grid,
                                        CouplingOptions opt = {});

} // namespace hscs

#endif
