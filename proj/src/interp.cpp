#include "hscs/interp.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace hscs {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw OutOfDomain("CubicSpline needs matching tables with >= 2 points");
    c1_.assign(n - 1, 0.0);
    c2_.assign(n - 1, 0.0);
    c3_.assign(n - 1, 0.0);
    if (n == 2) {
        c1_[0] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
        return;
    }
    if (n == 3) {
        // single quadratic through three points
        Eigen::Matrix3d A;
        Eigen::Vector3d b;
        for (int i = 0; i < 3; ++i) {
            const double dx = x_[i] - x_[0];
            A(i, 0) = 1.0;
            A(i, 1) = dx;
            A(i, 2) = dx * dx;
            b(i) = y_[i];
        }
        Eigen::Vector3d c = A.fullPivLu().solve(b);
        for (std::size_t s = 0; s < 2; ++s) {
            const double dx = x_[s] - x_[0];
            c1_[s] = c(1) + 2.0 * c(2) * dx;
            c2_[s] = c(2);
            c3_[s] = 0.0;
        }
        return;
    }

    // Solve for second derivatives with not-a-knot end conditions.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1];
        const double hr = x_[i + 1] - x_[i];
        A(i, i - 1) = hl;
        A(i, i) = 2.0 * (hl + hr);
        A(i, i + 1) = hr;
        rhs(i) = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    }
    const double h0 = x_[1] - x_[0], h1 = x_[2] - x_[1];
    A(0, 0) = h1;
    A(0, 1) = -(h0 + h1);
    A(0, 2) = h0;
    const double hm = x_[n - 2] - x_[n - 3], hn = x_[n - 1] - x_[n - 2];
    A(n - 1, n - 3) = hn;
    A(n - 1, n - 2) = -(hm + hn);
    A(n - 1, n - 1) = hm;
    Eigen::VectorXd m = A.partialPivLu().solve(rhs);

    for (std::size_t s = 0; s + 1 < n; ++s) {
        const double h = x_[s + 1] - x_[s];
        c1_[s] = (y_[s + 1] - y_[s]) / h - h * (2.0 * m(s) + m(s + 1)) / 6.0;
        c2_[s] = m(s) / 2.0;
        c3_[s] = (m(s + 1) - m(s)) / (6.0 * h);
    }
}

std::size_t CubicSpline::locate(double xq) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t i = (it == x_.begin()) ? 0 : std::size_t(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double xq) const {
    const std::size_t s = locate(xq);
    const double dx = xq - x_[s];
    return y_[s] + dx * (c1_[s] + dx * (c2_[s] + dx * c3_[s]));
}

double CubicSpline::deriv(double xq) const {
    const std::size_t s = locate(xq);
    const double dx = xq - x_[s];
    return c1_[s] + dx * (2.0 * c2_[s] + dx * 3.0 * c3_[s]);
}

std::size_t HermiteTable::locate(double xq) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t i = (it == x_.begin()) ? 0 : std::size_t(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double HermiteTable::operator()(double xq) const {
    if (x_.empty()) throw OutOfDomain("empty HermiteTable");
    if (xq <= x_.front()) return y_.front() + yp_.front() * (xq - x_.front());
    if (xq >= x_.back()) return y_.back() + yp_.back() * (xq - x_.back());
    const std::size_t s = locate(xq);
    const double h = x_[s + 1] - x_[s];
    const double u = (xq - x_[s]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y_[s] + (u3 - 2 * u2 + u) * h * yp_[s] +
           (-2 * u3 + 3 * u2) * y_[s + 1] + (u3 - u2) * h * yp_[s + 1];
}

double HermiteTable::deriv(double xq) const {
    if (x_.empty()) throw OutOfDomain("empty HermiteTable");
    if (xq <= x_.front()) return yp_.front();
    if (xq >= x_.back()) return yp_.back();
    const std::size_t s = locate(xq);
    const double h = x_[s + 1] - x_[s];
    const double u = (xq - x_[s]) / h;
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * y_[s] + (3 * u2 - 4 * u + 1) * h * yp_[s] +
            (-6 * u2 + 6 * u) * y_[s + 1] + (3 * u2 - 2 * u) * h * yp_[s + 1]) /
           h;
}

} // namespace hscs
