#include "hscs/wigner.hpp"

#include <cmath>
#include <vector>

namespace hscs {

double wigner_small_d(int J, int K, int m, double Theta) {
    if (J < 0 || std::abs(K) > J || std::abs(m) > J)
        throw IndexOutOfRange("wigner_small_d: need |K|, |m| <= J");
    if (J == 0) return 1.0;

    const double s = std::sin(Theta), c = std::cos(Theta);
    if (std::abs(s) < 1e-12) {
        if (c > 0) return (K == m) ? 1.0 : 0.0; // Theta ~ 0
        // Theta ~ pi
        if (K != -m) return 0.0;
        return ((J - m) % 2 == 0) ? 1.0 : -1.0;
    }

    // edge seed d^J_{J,m}, then three-term recursion downward in K
    const double lg = 0.5 * (std::lgamma(2.0 * J + 1.0) - std::lgamma(J + m + 1.0) -
                             std::lgamma(J - m + 1.0));
    const double ch = std::cos(0.5 * Theta), sh = std::sin(0.5 * Theta);
    double dJ = std::exp(lg + (J + m) * std::log(std::abs(ch)) +
                         (J - m) * std::log(std::abs(sh)));
    if ((J - m) % 2 != 0) dJ = -dJ;
    if (ch < 0 && (J + m) % 2 != 0) dJ = -dJ; // Theta > pi edge case

    if (K == J) return dJ;
    double above = 0.0, cur = dJ;
    for (int k = J; k > K; --k) {
        const double c_up = std::sqrt(double(J - k) * (J + k + 1));
        const double c_dn = std::sqrt(double(J + k) * (J - k + 1));
        const double next = (2.0 * (m - k * c) / s * cur - c_up * above) / c_dn;
        above = cur;
        cur = next;
    }
    return cur;
}

std::complex<double> wigner_D(int J, int K, int m, double Phi, double Theta,
                              double phi) {
    const double d = wigner_small_d(J, K, m, Theta);
    return std::polar(d, -(K * Phi + m * phi));
}

void RotorIndex::validate() const {
    if (J < 0 || std::abs(K) > J || m < 0 || m > J)
        throw IndexOutOfRange("rotor: need |K| <= J and 0 <= m <= J");
    if (parity != 1 && parity != -1)
        throw IndexOutOfRange("rotor: parity must be +-1");
}

std::complex<double> symmetrized_D(const RotorIndex& r, double Phi, double Theta,
                                   double phi) {
    r.validate();
    const double A = ((r.K % 2 == 0) ? 1.0 : -1.0) *
                     std::sqrt((2.0 * r.J + 1.0) / (r.m == 0 ? 2.0 : 1.0)) /
                     (4.0 * M_PI);
    const double ph = ((r.J + r.m) % 2 == 0) ? 1.0 : -1.0;
    return A * (wigner_D(r.J, -r.K, r.m, Phi, Theta, phi) +
                double(r.parity) * ph * wigner_D(r.J, -r.K, -r.m, Phi, Theta, phi));
}

} // namespace hscs
