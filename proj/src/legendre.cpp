#include "hscs/legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace hscs {

double assoc_legendre_rec(int l, int m) {
    // a_l = sqrt(((l+1)^2 - m^2) / ((2l+1)(2l+3)))
    const double num = double(l + 1 - m) * double(l + 1 + m);
    return std::sqrt(num / (double(2 * l + 1) * double(2 * l + 3)));
}

namespace {
// Pt^m_m(x) = (-1)^m sqrt((2m+1)/2) sqrt((2m)!) / (2^m m!) (1-x^2)^{m/2},
// evaluated through logarithms so large m cannot overflow.
double seed_log_prefactor(int m) {
    return 0.5 * std::log((2.0 * m + 1.0) / 2.0) + 0.5 * std::lgamma(2.0 * m + 1.0) -
           m * std::log(2.0) - std::lgamma(m + 1.0);
}
} // namespace

std::vector<double> assoc_legendre_row(int m, int count, double x) {
    std::vector<double> p(count);
    if (count <= 0) return p;
    const double omx2 = std::max(0.0, (1.0 - x) * (1.0 + x));
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    double pmm;
    if (m == 0) {
        pmm = std::sqrt(0.5);
    } else if (omx2 == 0.0) {
        pmm = 0.0;
    } else {
        pmm = sign * std::exp(seed_log_prefactor(m) + 0.5 * m * std::log(omx2));
    }
    p[0] = pmm;
    if (count == 1) return p;
    double prev2 = 0.0, prev1 = pmm;
    for (int k = 1; k < count; ++k) {
        const int l = m + k - 1;
        const double al = assoc_legendre_rec(l, m);
        const double alm1 = (k >= 2) ? assoc_legendre_rec(l - 1, m) : 0.0;
        const double next = (x * prev1 - alm1 * prev2) / al;
        p[k] = next;
        prev2 = prev1;
        prev1 = next;
    }
    return p;
}

std::pair<std::vector<double>, std::vector<double>>
assoc_legendre_row_deriv(int m, int count, double x) {
    auto p = assoc_legendre_row(m, count, x);
    std::vector<double> dp(count, 0.0);
    const double omx2 = (1.0 - x) * (1.0 + x);
    if (omx2 <= 0.0) {
        // Derivative at the end points only needed for m <= 1 in practice;
        // fall back to a one-sided difference there.
        const double h = 1e-7 * (x > 0 ? -1.0 : 1.0);
        auto ph = assoc_legendre_row(m, count, x + h);
        for (int k = 0; k < count; ++k) dp[k] = (ph[k] - p[k]) / h;
        return {p, dp};
    }
    for (int k = 0; k < count; ++k) {
        const int l = m + k;
        // (1-x^2) dPt_l/dx = -l x Pt_l + (2l+1) a_{l-1} Pt_{l-1}
        const double below = (k >= 1) ? p[k - 1] : 0.0;
        const double alm1 = (k >= 1) ? assoc_legendre_rec(l - 1, m) : 0.0;
        dp[k] = (-l * x * p[k] + (2.0 * l + 1.0) * alm1 * below) / omx2;
    }
    return {p, dp};
}

double assoc_legendre_edge(int l, int m) {
    // lim_{x->1} Pt^m_l(x) (1-x^2)^{-m/2}
    //   = (-1)^m / (2^m m!) sqrt((2l+1)/2 * (l+m)!/(l-m)!)
    const double lg = 0.5 * std::log((2.0 * l + 1.0) / 2.0) +
                      0.5 * (std::lgamma(l + m + 1.0) - std::lgamma(l - m + 1.0)) -
                      m * std::log(2.0) - std::lgamma(m + 1.0);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(lg);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int mhalf = (n + 1) / 2;
    for (int i = 0; i < mhalf; ++i) {
        // Newton iteration from the Chebyshev estimate.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

void composite_gauss_legendre(const std::vector<double>& edges, int order,
                              std::vector<double>& x, std::vector<double>& w) {
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    x.clear();
    w.clear();
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double lo = edges[p], hi = edges[p + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int i = 0; i < order; ++i) {
            x.push_back(mid + half * gx[i]);
            w.push_back(half * gw[i]);
        }
    }
}

} // namespace hscs
