#include "hscs/kinematics.hpp"

#include <cmath>

namespace hscs {

namespace {
constexpr double kDegeneracyTol = 1e-12;
constexpr double kGeometryTol = 1e-12;
} // namespace

ReducedMasses reduced_masses(double m1, double m2, double m3) {
    if (m1 <= 0 || m2 <= 0 || m3 <= 0)
        throw NonPositiveInput("all masses must be > 0");
    const double total = m1 + m2 + m3;
    ReducedMasses r;
    r.M = m1 * m2 / (m1 + m2);
    r.mu = m3 * (m1 + m2) / total;
    r.mu1 = m1 * m3 / (m1 + m3);
    r.mu2 = m2 * m3 / (m2 + m3);
    r.M1 = m2 * (m1 + m3) / total;
    r.M2 = m1 * (m2 + m3) / total;
    return r;
}

ParticleSystem::ParticleSystem(double m1, double m2, double m3, double Z1, double Z2)
    : m_{m1, m2, m3}, Z1_(Z1), Z2_(Z2) {
    if (m1 <= 0 || m2 <= 0 || m3 <= 0)
        throw NonPositiveInput("all masses must be > 0");
    if (Z1 <= 0)
        throw NonPositiveInput("Z1 must be > 0");
    if (Z2 < 0)
        throw NonPositiveInput("Z2 must be >= 0 (0 selects the one-centre reduction)");
    if (m1 == m2 && Z1 == Z2)
        throw IdenticalParticles("particles 1 and 2 must not be identical");

    red_ = reduced_masses(m1, m2, m3);

    // Equal effective charges would delocalize every large-rho eigenstate
    // over both centres; reject the degenerate mass/charge combination.
    if (Z2 > 0) {
        const double ratio = std::pow(red_.mu2 / red_.mu1, 1.5);
        if (std::abs(Z1 / Z2 - ratio) < kDegeneracyTol)
            throw DegenerateCharges("Z1/Z2 equals (mu2/mu1)^(3/2)");
    }

    tg_.t1 = std::sqrt(red_.mu * red_.M) / m1;
    tg_.t2 = std::sqrt(red_.mu * red_.M) / m2;
    tg_.d = tg_.t1 + tg_.t2;
}

ParticleSystem build_system(double m1, double m2, double m3, double Z1, double Z2) {
    return ParticleSystem(m1, m2, m3, Z1, Z2);
}

std::pair<double, double> to_spheroidal(double r1, double r2, double R) {
    if (R <= 0 || r1 < 0 || r2 < 0)
        throw GeometryViolation("need R > 0 and r1, r2 >= 0");
    const double scale = r1 + r2 + R;
    if (r1 + r2 - R < -kGeometryTol * scale || r1 + R - r2 < -kGeometryTol * scale ||
        r2 + R - r1 < -kGeometryTol * scale)
        throw GeometryViolation("triangle inequality violated");
    double xi = (r1 + r2) / R;
    double eta = (r1 - r2) / R;
    if (xi < 1.0) xi = 1.0;
    if (eta > 1.0) eta = 1.0;
    if (eta < -1.0) eta = -1.0;
    return {xi, eta};
}

std::pair<double, double> from_spheroidal(double xi, double eta, double R) {
    if (xi < 1.0 || std::abs(eta) > 1.0 || R <= 0)
        throw GeometryViolation("need xi >= 1, |eta| <= 1, R > 0");
    return {R * (xi + eta) / 2.0, R * (xi - eta) / 2.0};
}

double hyperradius(const ParticleSystem& sys, double r1, double r2, double R) {
    to_spheroidal(r1, r2, R); // geometry check
    const double m1 = sys.m(1), m2 = sys.m(2), m3 = sys.m(3);
    const double total = m1 + m2 + m3;
    return std::sqrt(2.0 * (m1 * m3 * r1 * r1 + m2 * m3 * r2 * r2 + m1 * m2 * R * R) /
                     total);
}

double hyperradius_jacobi(const ParticleSystem& sys, double R, double r) {
    if (R < 0 || r < 0)
        throw GeometryViolation("Jacobi lengths must be >= 0");
    const auto& rm = sys.masses();
    return std::sqrt(2.0 * (rm.M * R * R + rm.mu * r * r));
}

std::pair<double, double> effective_charges(const ParticleSystem& sys, double rho) {
    if (rho < 0)
        throw GeometryViolation("rho must be >= 0");
    const auto& rm = sys.masses();
    const double c = rho * std::sqrt(2.0) / rm.mu;
    return {c * sys.Z1() * std::pow(rm.mu1, 1.5), c * sys.Z2() * std::pow(rm.mu2, 1.5)};
}

CsfParameters csf_parameters(const ParticleSystem& sys, double rho, double eps) {
    if (rho < 0)
        throw GeometryViolation("rho must be >= 0");
    if (eps >= 0)
        throw ContinuumState("csf_parameters requires eps < 0 (discrete spectrum)");
    const auto& rm = sys.masses();
    CsfParameters out;
    const double c = rho / std::sqrt(2.0 * rm.mu * rm.M);
    out.a = c * (sys.Z1() * std::pow(rm.mu1, 1.5) + sys.Z2() * std::pow(rm.mu2, 1.5));
    out.b = c * (sys.Z2() * std::pow(rm.mu2, 1.5) - sys.Z1() * std::pow(rm.mu1, 1.5));
    out.p = 0.5 * std::sqrt(-rm.mu * eps / rm.M);
    return out;
}

InternalPoint InternalPoint::from_distances(const ParticleSystem& sys, double r1,
                                            double r2, double R) {
    InternalPoint pt;
    pt.r1 = r1;
    pt.r2 = r2;
    pt.R = R;
    std::tie(pt.xi, pt.eta) = to_spheroidal(r1, r2, R);

    // Jacobi vector r = x3 - (m1 x1 + m2 x2)/(m1+m2); its length and the
    // angle against R follow from the law of cosines.
    const double m1 = sys.m(1), m2 = sys.m(2);
    const double c2 = m2 / (m1 + m2);
    const double r1R = (r1 * r1 + R * R - r2 * r2) / 2.0; // r_1 . R
    double r_sq = r1 * r1 + c2 * c2 * R * R - 2.0 * c2 * r1R;
    if (r_sq < 0) r_sq = 0;
    const double r = std::sqrt(r_sq);

    const auto& rm = sys.masses();
    pt.rho = std::sqrt(2.0 * (rm.M * R * R + rm.mu * r * r));
    pt.t = std::sqrt(rm.mu / rm.M) * r / R;
    pt.chi = 2.0 * std::atan(pt.t);
    const double rR = r1R - c2 * R * R; // r . R
    pt.theta = (r > 0) ? std::acos(std::clamp(rR / (r * R), -1.0, 1.0)) : 0.0;
    return pt;
}

InternalPoint InternalPoint::from_spheroidal(const ParticleSystem& sys, double rho,
                                             double xi, double eta) {
    if (rho <= 0)
        throw GeometryViolation("rho must be > 0");
    if (xi < 1.0 || std::abs(eta) > 1.0)
        throw GeometryViolation("need xi >= 1, |eta| <= 1");
    const double m1 = sys.m(1), m2 = sys.m(2);
    const double c1 = m1 / (m1 + m2), c2 = m2 / (m1 + m2);
    const auto& rm = sys.masses();
    // r^2 = R^2 [ c1 (xi+eta)^2/4 + c2 (xi-eta)^2/4 - c1 c2 ]
    const double s = c1 * (xi + eta) * (xi + eta) / 4.0 +
                     c2 * (xi - eta) * (xi - eta) / 4.0 - c1 * c2;
    const double R = rho / std::sqrt(2.0 * (rm.M + rm.mu * s));
    auto [r1, r2] = hscs::from_spheroidal(xi, eta, R);
    return from_distances(sys, r1, r2, R);
}

double channel_threshold(const ParticleSystem& sys, int alpha, int n) {
    if (alpha != 1 && alpha != 2)
        throw IndexOutOfRange("alpha must be 1 or 2");
    if (n < 1)
        throw IndexOutOfRange("n must be >= 1");
    const double Z = sys.Z(alpha);
    return -Z * Z * sys.masses().mu_atom(alpha) / (2.0 * n * n);
}

double ChannelKinematics::gamma_bar(double rho) const {
    if (!open || gamma_coef == 0.0) return 0.0;
    return gamma_coef * std::log(2.0 * q * rho);
}

ChannelKinematics channel_kinematics(const ParticleSystem& sys, double E, int alpha,
                                     int n) {
    ChannelKinematics ck;
    ck.alpha = alpha;
    ck.n = n;
    ck.threshold = channel_threshold(sys, alpha, n);
    const double diff = E - ck.threshold;
    if (diff > 0) {
        ck.open = true;
        ck.q = std::sqrt(diff);
        ck.k = std::sqrt(2.0 * sys.masses().M_atom(alpha) * diff);
        const double Zother = sys.Z(3 - alpha);
        ck.gamma_coef = (sys.Z(alpha) - 1.0) * Zother * sys.masses().M_atom(alpha) / ck.k;
    } else {
        ck.open = false;
        ck.kappa = std::sqrt(-diff);
    }
    return ck;
}

} // namespace hscs
