#include "hscs/basis.hpp"

#include <cmath>

namespace hscs {

double weight_factor(double rho, double t) {
    const double v = 1.0 + t * t;
    return std::pow(rho, 5) / (v * v * v);
}

std::complex<double> HscsFunction::eval(double xi, double eta, double Phi,
                                        double Theta, double phi) const {
    return symmetrized_D(rotor, Phi, Theta, phi) * state->evaluate(xi, eta);
}

HscsFunction assemble(const RotorIndex& rotor, const CsfState& state) {
    rotor.validate();
    if (rotor.is_null())
        throw IndexOutOfRange("assemble: null rotor combination (m=0, parity=-(-1)^J)");
    if (rotor.m != state.m)
        throw MMismatch("assemble: rotor and CSF projections differ");
    return HscsFunction{rotor, &state};
}

namespace {

std::array<double, 3> to_sphere(double rho0, double zp, double xp) {
    const double t = std::hypot(zp, xp);
    const double theta = std::atan2(xp, zp);
    const double chi = 2.0 * std::atan(t);
    return {rho0 * std::sin(chi) * std::cos(theta),
            rho0 * std::sin(chi) * std::sin(theta), rho0 * std::cos(chi)};
}

} // namespace

ThreePoleNet three_pole_net(const ParticleSystem& sys, double rho0, int n_xi_lines,
                            int n_eta_lines, int samples_per_curve) {
    if (rho0 <= 0) throw GeometryViolation("rho0 must be > 0");
    if (n_xi_lines < 1 || n_eta_lines < 1 || samples_per_curve < 2)
        throw IndexOutOfRange("need at least one line per family");

    const auto& tg = sys.tgeom();
    const double zc = 0.5 * (tg.t2 - tg.t1);
    const double half_d = 0.5 * tg.d;

    ThreePoleNet net;
    net.rho0 = rho0;

    // far-field extent: largest ellipse reaches chi ~ 0.9 pi
    const double t_top = std::tan(0.45 * M_PI);
    const double xi_top = std::max(2.0, (t_top + std::abs(zc)) / half_d);
    const double u_max = std::acosh(xi_top);
    const double w_max = std::asinh((t_top + std::abs(zc)) / half_d) + 0.3;

    const int ns = samples_per_curve;
    for (int k = 1; k <= n_xi_lines; ++k) {
        const double xi = std::cosh(u_max * k / n_xi_lines);
        NetCurve c;
        c.family = 'x';
        c.value = xi;
        c.id = "xi-" + std::to_string(k);
        c.points.reserve(ns);
        for (int i = 0; i < ns; ++i) {
            const double v = M_PI * i / (ns - 1); // eta = cos v along the ellipse
            const double zp = zc + half_d * xi * std::cos(v);
            const double xp = half_d * std::sqrt(xi * xi - 1.0) * std::sin(v);
            c.points.push_back(to_sphere(rho0, zp, xp));
        }
        net.curves.push_back(std::move(c));
    }
    for (int j = 0; j <= n_eta_lines + 1; ++j) {
        // j = 0 and j = n+1 are the eta = +-1 boundary rays through the poles
        const double eta = std::cos(M_PI * j / (n_eta_lines + 1.0));
        NetCurve c;
        c.family = 'e';
        c.value = eta;
        c.id = "eta-" + std::to_string(j);
        c.points.reserve(ns);
        for (int i = 0; i < ns; ++i) {
            const double w = w_max * i / (ns - 1);
            const double zp = zc + half_d * eta * std::cosh(w);
            const double om = std::max(0.0, 1.0 - eta * eta);
            const double xp = half_d * std::sqrt(om) * std::sinh(w);
            c.points.push_back(to_sphere(rho0, zp, xp));
        }
        net.curves.push_back(std::move(c));
    }

    const double chi1 = 2.0 * std::atan(tg.t1);
    const double chi2 = 2.0 * std::atan(tg.t2);
    net.poles.push_back(
        {"coalescence-13",
         {-rho0 * std::sin(chi1), 0.0, rho0 * std::cos(chi1)}});
    net.poles.push_back(
        {"coalescence-23", {rho0 * std::sin(chi2), 0.0, rho0 * std::cos(chi2)}});
    net.poles.push_back({"coalescence-12", {0.0, 0.0, -rho0}});
    return net;
}

} // namespace hscs
