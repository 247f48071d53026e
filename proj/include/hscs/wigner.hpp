#ifndef HSCS_WIGNER_HPP
#define HSCS_WIGNER_HPP

#include <complex>

#include "hscs/errors.hpp"

namespace hscs {

// Real rotation matrix element d^J_{K m}(Theta), stable three-term
// recursion in K from the K = J edge seed.
double wigner_small_d(int J, int K, int m, double Theta);

// D^J_{K m}(Phi, Theta, phi) = exp(-i K Phi) d^J_{K m}(Theta) exp(-i m phi)
std::complex<double> wigner_D(int J, int K, int m, double Phi, double Theta,
                              double phi);

// Parity-adapted rotor index. |K| <= J, 0 <= m <= J, parity = +-1. The
// combination m = 0 with parity = -(-1)^J vanishes identically.
struct RotorIndex {
    int J = 0, K = 0, m = 0;
    int parity = 1;

    bool is_null() const { return m == 0 && parity != ((J % 2 == 0) ? 1 : -1); }
    void validate() const;
};

// Normalized parity-symmetrized D-function
//   A^J_{Km} [ D^J_{-K,m} + parity (-1)^{J+m} D^J_{-K,-m} ],
//   A^J_{Km} = (-1)^K sqrt((2J+1)/(1+delta_{0m})) / (4 pi),
// unit-normalized over dPhi sinTheta dTheta dphi.
std::complex<double> symmetrized_D(const RotorIndex& r, double Phi, double Theta,
                                   double phi);

} // namespace hscs

#endif
