#ifndef HSCS_RADIAL_HPP
#define HSCS_RADIAL_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hscs/coupling.hpp"
#include "hscs/interp.hpp"

namespace hscs {

struct Channel {
    int basis_index = -1; // column/row in the coupling matrices
    ChannelLabel label;
    double threshold = 0;
    bool open = false;
    double q = 0, kappa = 0, k = 0;
    double gamma_coef = 0; // gamma_bar(rho) = gamma_coef log(2 q rho)

    double theta(double rho, int J) const; // q rho - gamma_bar - pi J/2
    double theta_deriv(double rho) const;  // q - gamma_coef / rho
};

struct ChannelSpace {
    double E = 0;
    std::vector<Channel> channels; // open first (ascending threshold), then closed
    int n_open = 0;
    int n_total = 0;
};

// Channel list for a labeled basis at total energy E (< 0, below breakup).
ChannelSpace build_channel_space(const ParticleSystem& sys, double E,
                                 const std::vector<ChannelLabel>& labels);

// First-order form of the coupled radial system,
//   f'' = (3/(4 rho^2) - E) f + 2 Q f' + (Q' + P + U + W + R/rho^2 + T/rho^2) f,
// with all families interpolated in rho by not-a-knot cubic splines.
class RadialOperator {
  public:
    RadialOperator(const CouplingSet& set, double E, int J);

    int dim() const { return n_; }
    double E() const { return E_; }
    int J() const { return J_; }
    double rho_min() const { return rho_min_; }
    double rho_max() const { return rho_max_; }

    // y' = S(rho) y on y = [f; f'] (2n x 2n)
    Eigen::MatrixXd system_matrix(double rho) const;

    // individual interpolated families (tests, diagnostics)
    Eigen::MatrixXd P(double rho) const;
    Eigen::MatrixXd Q(double rho) const;
    Eigen::MatrixXd dQ(double rho) const;
    Eigen::MatrixXd R(double rho) const;
    Eigen::MatrixXd U(double rho) const;
    Eigen::MatrixXd W(double rho) const;
    Eigen::MatrixXd T(double rho) const;

  private:
    Eigen::MatrixXd eval(const std::vector<CubicSpline>& s, double rho) const;
    void check_range(double rho) const;

    int n_ = 0, J_ = 0;
    double E_ = 0, rho_min_ = 0, rho_max_ = 0;
    std::vector<CubicSpline> sP_, sQ_, sR_, sU_, sW_, sT_;
};

struct PropagatorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int chunks = 64;        // re-orthonormalization intervals up to the window
    double window = 0.98;   // first matching radius as a fraction of rho_max
    double window2 = 0.96;  // sensitivity window
};

struct PropagatorState {
    double rho0 = 0, rho_max = 0;
    // snapshots sharing one column basis (no re-orthonormalization between)
    double rho_w2 = 0, rho_w1 = 0, rho_b = 0;
    Eigen::MatrixXd g_w2, gp_w2, g_w1, gp_w1, g_b, gp_b;
    int orthonormalizations = 0;
    double min_column_scale = 0; // smallest |R_ii| over the QR sweeps
};

// Columns started on the regular rho^{3/2} branch at rho0 and propagated to
// rho_max with periodic column re-orthonormalization.
PropagatorState integrate(const RadialOperator& op, const ChannelSpace& channels,
                          double rho0, double rho_max,
                          const PropagatorOptions& opt = {});

struct MatchResult {
    Eigen::MatrixXd K; // n_open x n_open, channel order
    double fit_residual = 0;
    double condition = 0;
    double closed_contamination = 0; // log amplitude ratio at rho_max
    double closed_decay_defect = 0;  // worst relative log-slope error vs -kappa
};

// Least-squares fit of the open rows at the two window radii to
//   sin(theta_j) delta_ij - sqrt(q_j/q_i) K_ij cos(theta_i),
// after removing the growing closed-channel content.
MatchResult match(const PropagatorState& prop, const ChannelSpace& channels, int J);

Eigen::MatrixXcd k_to_stilde(const Eigen::MatrixXd& K, int J);
Eigen::MatrixXd stilde_to_k(const Eigen::MatrixXcd& S, int J);

struct ScatteringSolution {
    double E = 0;
    int J = 0;
    ChannelSpace channels;
    Eigen::MatrixXd K;
    Eigen::MatrixXcd S;
    double k_symmetry_defect = 0;
    double s_unitarity_defect = 0;
    double rho0 = 0, rho_max = 0;
    bool rho_max_capped = false;     // auto rule exhausted the coupling grid
    double rho_max_sensitivity = 0;  // |K(window2) - K(window1)|_max
    double closed_decay_defect = 0;
    double fit_residual = 0;
    std::string to_json() const;
};

struct ScatterOptions {
    double rho_max = 0;      // 0: automatic
    double rho0_frac = 1e-3; // rho0 = rho0_frac * rho_max
    PropagatorOptions prop;
};

// rho_max rule: 3x the radius where every open-open off-diagonal coupling has
// dropped below 1e-6 of the smallest open |E - threshold|, capped by the
// coupling grid.
double choose_rho_max(const CouplingSet& set, const ChannelSpace& channels,
                      bool* capped = nullptr);

ScatteringSolution solve_scattering(const ParticleSystem& sys,
                                    const CouplingSet& set, double E,
                                    const ScatterOptions& opt = {});

} // namespace hscs

#endif
