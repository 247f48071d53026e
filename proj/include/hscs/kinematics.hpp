#ifndef HSCS_KINEMATICS_HPP
#define HSCS_KINEMATICS_HPP

#include <array>
#include <utility>

#include "hscs/errors.hpp"

namespace hscs {

// Pair/cluster reduced masses of the three-body system.
//   M    : (1,2) pair            M = m1 m2 / (m1+m2)
//   mu   : 3 against (1,2)       mu = m3 (m1+m2) / (m1+m2+m3)
//   mu_a : atom (a,3)            mu_a = m_a m3 / (m_a+m3)
//   M_a  : spectator against atom a
struct ReducedMasses {
    double M = 0, mu = 0;
    double mu1 = 0, mu2 = 0;
    double M1 = 0, M2 = 0;

    double mu_atom(int alpha) const { return alpha == 1 ? mu1 : mu2; }
    double M_atom(int alpha) const { return alpha == 1 ? M1 : M2; }
};

// Focal points of the two-centre problem in t-space: t_a = sqrt(mu M)/m_a.
// The focal distance d = t1 + t2 equals sqrt(mu/M).
struct TGeometry {
    double t1 = 0, t2 = 0, d = 0;
};

// Parameters of the Coulomb spheroidal equations at fixed hyperradius:
// a, b are the charge parameters (linear in rho), p = (d/2) sqrt(-eps).
struct CsfParameters {
    double a = 0, b = 0, p = 0;
};

// Three particles: charges Z1,Z2 > 0 (Z2 = 0 admitted as the one-centre
// reduction used by tests), Z3 = -1 fixed. Atomic units throughout.
class ParticleSystem {
  public:
    ParticleSystem(double m1, double m2, double m3, double Z1, double Z2);

    double m(int i) const { return m_[i - 1]; }
    double Z(int alpha) const { return alpha == 1 ? Z1_ : Z2_; }
    double Z1() const { return Z1_; }
    double Z2() const { return Z2_; }
    static constexpr double Z3 = -1.0;

    const ReducedMasses& masses() const { return red_; }
    const TGeometry& tgeom() const { return tg_; }

  private:
    std::array<double, 3> m_{};
    double Z1_ = 0, Z2_ = 0;
    ReducedMasses red_;
    TGeometry tg_;
};

ParticleSystem build_system(double m1, double m2, double m3, double Z1, double Z2);
ReducedMasses reduced_masses(double m1, double m2, double m3);

// (r1, r2, R) -> (xi, eta); throws GeometryViolation when the triangle
// inequalities fail beyond 1e-12 relative.
std::pair<double, double> to_spheroidal(double r1, double r2, double R);
std::pair<double, double> from_spheroidal(double xi, double eta, double R);

// Hyperradius from the three interparticle distances, and from the Jacobi
// pair (R, r). Both are degree-1 homogeneous in the lengths.
double hyperradius(const ParticleSystem& sys, double r1, double r2, double R);
double hyperradius_jacobi(const ParticleSystem& sys, double R, double r);

// Effective charges Z~_a(rho) = rho Z_a sqrt(2) mu_a^{3/2} / mu.
std::pair<double, double> effective_charges(const ParticleSystem& sys, double rho);

// CSF parameters (a, b, p) for eigenvalue eps < 0 at hyperradius rho.
CsfParameters csf_parameters(const ParticleSystem& sys, double rho, double eps);

// One internal configuration in all four coordinate sets.
struct InternalPoint {
    double r1 = 0, r2 = 0, R = 0; // interparticle distances
    double rho = 0, chi = 0, theta = 0; // hyperspherical; theta is the polar angle of t
    double xi = 1, eta = 0; // prolate spheroidal on the rho-sphere
    double t = 0; // t = tan(chi/2)

    static InternalPoint from_distances(const ParticleSystem& sys,
                                        double r1, double r2, double R);
    static InternalPoint from_spheroidal(const ParticleSystem& sys,
                                         double rho, double xi, double eta);
};

// Kinematics of one arrangement channel (alpha, n) at total energy E.
//   threshold  E_an = -Z_a^2 mu_a / (2 n^2)
//   q          sqrt(E - E_an) for an open channel
//   kappa      sqrt(E_an - E) for a closed one
//   k          relative momentum sqrt(2 M_a (E - E_an)) (open only)
//   gamma_coef coefficient of the logarithmic phase:
//              gamma_bar(rho) = (Z_a - 1) Z_{3-a} M_a k^{-1} log(2 q rho)
struct ChannelKinematics {
    int alpha = 1, n = 1;
    double threshold = 0;
    bool open = false;
    double q = 0, kappa = 0, k = 0;
    double gamma_coef = 0;

    double gamma_bar(double rho) const;
    double gamma_bar_deriv(double rho) const { return open ? gamma_coef / rho : 0.0; }
};

ChannelKinematics channel_kinematics(const ParticleSystem& sys, double E,
                                     int alpha, int n);

// Hydrogenic threshold alone (used widely in tests and channel setup).
double channel_threshold(const ParticleSystem& sys, int alpha, int n);

} // namespace hscs

#endif
