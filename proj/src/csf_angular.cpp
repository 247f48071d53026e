#include <cmath>

#include <Eigen/Dense>

#include "hscs/csf.hpp"
#include "hscs/legendre.hpp"

namespace hscs {

namespace {

// Pentadiagonal symmetric matrix of L_m + p^2(1-eta^2) - b eta over the
// normalized associated Legendre basis, l = m + k, k = 0..nbasis-1.
Eigen::MatrixXd angular_matrix(double p2, double b, int m, int nbasis) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nbasis, nbasis);
    for (int k = 0; k < nbasis; ++k) {
        const int l = m + k;
        const double al = assoc_legendre_rec(l, m);
        const double alm1 = (k >= 1) ? assoc_legendre_rec(l - 1, m) : 0.0;
        M(k, k) = double(l) * (l + 1.0) + p2 * (1.0 - al * al - alm1 * alm1);
        if (k + 1 < nbasis) {
            M(k, k + 1) = -b * al;
            M(k + 1, k) = -b * al;
        }
        if (k + 2 < nbasis) {
            const double alp1 = assoc_legendre_rec(l + 1, m);
            M(k, k + 2) = -p2 * al * alp1;
            M(k + 2, k) = -p2 * al * alp1;
        }
    }
    return M;
}

} // namespace

AngularSolution angular_eigenvalue(double p2, double b, int m, int n_eta,
                                   int max_basis) {
    if (m < 0 || n_eta < 0)
        throw IndexOutOfRange("angular_eigenvalue: need m >= 0, n_eta >= 0");

    constexpr double tail_tol = 1e-14;
    int nbasis = std::max(16, n_eta + 12);
    while (true) {
        if (nbasis > max_basis)
            throw NoConvergence("angular basis reached cap without tail convergence");
        Eigen::MatrixXd M = angular_matrix(p2, b, m, nbasis);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        if (es.info() != Eigen::Success)
            throw NoConvergence("angular eigensolver failure");
        // eigenvalues ascend with the node count of Y
        Eigen::VectorXd v = es.eigenvectors().col(n_eta);
        const double tail = std::max(std::abs(v(nbasis - 1)), std::abs(v(nbasis - 2)));
        if (tail < tail_tol) {
            AngularSolution out;
            out.lambda = es.eigenvalues()(n_eta);
            out.m = m;
            out.n_eta = n_eta;
            out.p2 = p2;
            out.b = b;
            out.coeffs.assign(v.data(), v.data() + nbasis);
            // sign convention: stripped edge value at eta -> +1 positive
            if (out.edge_value() < 0)
                for (double& c : out.coeffs) c = -c;
            return out;
        }
        nbasis = std::min(max_basis, 2 * nbasis);
        if (nbasis == max_basis && tail >= tail_tol) {
            // one last attempt at the cap before giving up
            Eigen::MatrixXd M2 = angular_matrix(p2, b, m, nbasis);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(M2);
            Eigen::VectorXd v2 = es2.eigenvectors().col(n_eta);
            const double tail2 =
                std::max(std::abs(v2(nbasis - 1)), std::abs(v2(nbasis - 2)));
            if (tail2 >= tail_tol)
                throw NoConvergence(
                    "angular basis reached cap without tail convergence");
            AngularSolution out;
            out.lambda = es2.eigenvalues()(n_eta);
            out.m = m;
            out.n_eta = n_eta;
            out.p2 = p2;
            out.b = b;
            out.coeffs.assign(v2.data(), v2.data() + nbasis);
            if (out.edge_value() < 0)
                for (double& c : out.coeffs) c = -c;
            return out;
        }
    }
}

double AngularSolution::eval(double eta) const {
    const auto p = assoc_legendre_row(m, int(coeffs.size()), eta);
    double s = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * p[k];
    return s;
}

double AngularSolution::deriv(double eta) const {
    const auto [p, dp] = assoc_legendre_row_deriv(m, int(coeffs.size()), eta);
    double s = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * dp[k];
    return s;
}

double AngularSolution::eta_moment(int power) const {
    // apply the tridiagonal eta-matrix `power` times to the coefficients
    const int n = int(coeffs.size());
    std::vector<double> cur(coeffs), next(n);
    for (int it = 0; it < power; ++it) {
        for (int k = 0; k < n; ++k) {
            const int l = m + k;
            double v = 0;
            if (k >= 1) v += assoc_legendre_rec(l - 1, m) * cur[k - 1];
            if (k + 1 < n) v += assoc_legendre_rec(l, m) * cur[k + 1];
            next[k] = v;
        }
        cur.swap(next);
    }
    double s = 0;
    for (int k = 0; k < n; ++k) s += coeffs[k] * cur[k];
    return s;
}

double AngularSolution::edge_value() const {
    double s = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        s += coeffs[k] * assoc_legendre_edge(m + int(k), m);
    return s;
}

} // namespace hscs
