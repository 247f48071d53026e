#ifndef HSCS_LEGENDRE_HPP
#define HSCS_LEGENDRE_HPP

#include <cstddef>
#include <vector>

namespace hscs {

// Normalized associated Legendre functions Pt^m_l with
//   int_{-1}^{1} Pt^m_l(x) Pt^m_l'(x) dx = delta_{ll'}.
// Recurrence coefficient of x Pt^m_l = a_l Pt^m_{l+1} + a_{l-1} Pt^m_{l-1}.
double assoc_legendre_rec(int l, int m);

// Values Pt^m_l(x) for l = m .. m+count-1 by upward recurrence.
std::vector<double> assoc_legendre_row(int m, int count, double x);

// Same but also derivatives dPt^m_l/dx (second member of the pair).
std::pair<std::vector<double>, std::vector<double>>
assoc_legendre_row_deriv(int m, int count, double x);

// Edge-limit of Pt^m_l(x) (1-x^2)^{-m/2} at x -> 1 (positive for even m,
// sign (-1)^m is the Condon-Shortley phase).
double assoc_legendre_edge(int l, int m);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Composite Gauss-Legendre rule on [a, b]: `edges` are panel boundaries
// (ascending, first = a, last = b), `order` points per panel.
void composite_gauss_legendre(const std::vector<double>& edges, int order,
                              std::vector<double>& x, std::vector<double>& w);

} // namespace hscs

#endif
