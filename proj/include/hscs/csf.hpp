#ifndef HSCS_CSF_HPP
#define HSCS_CSF_HPP

#include <optional>
#include <span>
#include <vector>

#include "hscs/interp.hpp"
#include "hscs/kinematics.hpp"

namespace hscs {

// Two-centre eigenproblem at fixed hyperradius in scaled form: charge
// parameters (a, b), focal distance d, projection m. The eigenvalue eps and
// the momentum parameter p are related by eps = -4 p^2 / d^2.
struct CtcProblem {
    double a = 0, b = 0, d = 1;
    int m = 0;
    // foci positions on the focal axis (t1 + t2 = d); defaulted symmetric
    // for parameter-level problems
    double t1 = 0.5, t2 = 0.5;

    double eff_Z1() const { return (a - b) / d; }
    double eff_Z2() const { return (a + b) / d; }
    double eps_of_p(double p) const { return -4.0 * p * p / (d * d); }
    double p_of_eps(double eps) const;
};

CtcProblem ctc_problem(const ParticleSystem& sys, double rho, int m);

// Angle factor Y(eta): eigenvector of the band matrix of
//   L_m + p^2 (1 - eta^2) - b eta
// in the normalized associated Legendre basis, L_m Pt^m_l = l(l+1) Pt^m_l.
struct AngularSolution {
    double lambda = 0;
    int m = 0, n_eta = 0;
    double p2 = 0, b = 0;
    std::vector<double> coeffs; // c_k over l = m + k, unit norm

    double eval(double eta) const;
    double deriv(double eta) const;
    // int Y^2 eta^power d(eta), power = 1, 2, 3
    double eta_moment(int power) const;
    // Y(eta) (1-eta^2)^{-m/2} at eta -> +1 (sets the sign convention)
    double edge_value() const;
};

AngularSolution angular_eigenvalue(double p2, double b, int m, int n_eta,
                                   int max_basis = 400);

// One shot of the two-sided radial integration at trial (a, p, lambda):
// `mismatch` is the scale-invariant Wronskian of the outward (regular) and
// inward (decaying) branches at the matching point; `nodes` counts the zeros
// of the outward branch on (1, xi_max).
struct RadialShot {
    double mismatch = 0;
    int nodes = 0;
    double xi_match = 0, xi_max = 0;
};

RadialShot radial_mismatch(double a, double p, int m, double lambda);

// Radius factor X(xi), stored as F = X (xi^2-1)^{-m/2} on a stretched grid.
struct RadialSolution {
    double a = 0, p = 0, lambda = 0;
    int m = 0, n_xi = 0;
    double xi_max = 0;
    double xi_match = 0; // outward/inward glue abscissa
    HermiteTable F;
    double norm0 = 0, norm2 = 0; // int X^2 dxi, int X^2 xi^2 dxi

    double eval(double xi) const;       // X(xi)
    double eval_deriv(double xi) const; // dX/dxi
};

struct ChannelLabel {
    int alpha = 0, n = 0, s = 0, m = 0;
    bool verified = false; // s comes from node bookkeeping only
};

// One normalized basis state phi(xi, eta) = X(xi) Y(eta) at fixed rho with
// <phi|phi> = (d^3/8) int (xi^2-eta^2) phi^2 = 1. Sign convention: both
// stripped edge values X/(xi^2-1)^{m/2} at xi->1 and Y/(1-eta^2)^{m/2} at
// eta->1 are positive when `standard_sign` holds.
struct CsfState {
    CtcProblem prob;
    double rho = 0;
    int m = 0, n_xi = 0, n_eta = 0;
    double eps = 0, lambda = 0;
    AngularSolution Y;
    RadialSolution X;
    bool standard_sign = true;
    std::optional<ChannelLabel> label;

    double evaluate(double xi, double eta) const;
    double d_xi(double xi, double eta) const;
    double d_eta(double xi, double eta) const;
    double eta_centroid() const; // <eta> under the full measure
    void flip_sign();
};

// Eigenpair (eps, lambda) with the requested node counts: outer root search
// on eps (node-count bisection bracket, then Wronskian zero), inner angular
// eigenvalue per trial eps.
CsfState solve_state(const CtcProblem& prob, int n_xi, int n_eta,
                     std::optional<double> eps_guess = std::nullopt);
CsfState solve_state(const ParticleSystem& sys, double rho, int m, int n_xi,
                     int n_eta, std::optional<double> eps_guess = std::nullopt);

// d(phi)/d(rho) by central differences of sign-fixed normalized states, with
// a delta/2 Richardson consistency check (StepTooLarge on failure).
struct StateDerivative {
    CsfState plus, minus;   // rho +- delta/2
    CsfState plus2, minus2; // rho +- delta
    double delta = 0;
    double richardson_residual = 0;

    double eval(double xi, double eta) const;
};

StateDerivative d_rho(const ParticleSystem& sys, const CsfState& state,
                      double delta_rho);

// Asymptotic channel label from a family tracked over an increasing rho
// ladder: alpha from the eta centroid at the last point, n from matching
// eps/rho^2 to the scaled hydrogenic ladder, s = n_xi (unverified).
ChannelLabel classify(const ParticleSystem& sys, std::span<const CsfState> ladder);

} // namespace hscs

#endif
