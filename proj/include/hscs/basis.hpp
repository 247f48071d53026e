#ifndef HSCS_BASIS_HPP
#define HSCS_BASIS_HPP

#include <array>
#include <string>
#include <vector>

#include "hscs/csf.hpp"
#include "hscs/wigner.hpp"

namespace hscs {

// Volume weight of the transformed wave function: g = rho^5 (1+t^2)^{-3}.
double weight_factor(double rho, double t);

// Full basis element on the rho-sphere: rotor factor times the two-centre
// state, Phi(Omega) = D^{J,parity}_{K m}(Phi,Theta,phi) phi(xi,eta).
struct HscsFunction {
    RotorIndex rotor;
    const CsfState* state = nullptr;

    std::complex<double> eval(double xi, double eta, double Phi, double Theta,
                              double phi) const;
};

HscsFunction assemble(const RotorIndex& rotor, const CsfState& state);

// Curves of the xi/eta net on the sphere rho = rho0, mapped through
// x = rho sin(chi) cos(theta), y = rho sin(chi) sin(theta), z = rho cos(chi),
// with tan(chi/2) = t. Poles sit at the coalescence points.
struct NetCurve {
    std::string id;
    char family = 'x'; // 'x' iso-xi, 'e' iso-eta
    double value = 0;
    std::vector<std::array<double, 3>> points;
};

struct NetPole {
    std::string name;
    std::array<double, 3> point{};
};

struct ThreePoleNet {
    double rho0 = 0;
    std::vector<NetCurve> curves;
    std::vector<NetPole> poles;
};

ThreePoleNet three_pole_net(const ParticleSystem& sys, double rho0, int n_xi_lines,
                            int n_eta_lines, int samples_per_curve = 181);

} // namespace hscs

#endif
