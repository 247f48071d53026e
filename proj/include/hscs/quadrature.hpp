#ifndef HSCS_QUADRATURE_HPP
#define HSCS_QUADRATURE_HPP

#include <span>
#include <vector>

#include "hscs/csf.hpp"

namespace hscs {

// Product quadrature for the <f|g> integrals on the rho-sphere:
// Gauss-Legendre in eta on [-1,1], composite Gauss-Legendre in xi on
// [1, xi_max] with panels growing geometrically away from xi = 1. The
// measure weight (d^3/8)(xi^2 - eta^2) is applied by integrate().
struct QuadratureGrid {
    std::vector<double> xi, wxi;
    std::vector<double> eta, weta;
    double xi_max = 0;
    double d = 0;

    template <class F>
    double integrate(F&& f) const {
        double total = 0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
            double row = 0;
            for (std::size_t j = 0; j < eta.size(); ++j)
                row += weta[j] * (xi[i] * xi[i] - eta[j] * eta[j]) * f(xi[i], eta[j]);
            total += wxi[i] * row;
        }
        return d * d * d / 8.0 * total;
    }
};

struct GridOptions {
    int eta_order = 0;      // 0: choose from the states' expansion lengths
    int panel_order = 12;
    double panel_ratio = 1.7;
    double tail_log_amp = -30.0; // xi extent: state amplitude below e^{tail}
    int max_refinements = 4;
};

// Grid sized so every state's norm is reproduced to `tol` (checked; throws
// GridOverflow when refinement cannot reach it).
QuadratureGrid build_grid(std::span<const CsfState> states, double tol,
                          const GridOptions& opt = {});

// State factors evaluated on the grid nodes by re-integrating the radial
// equation through the nodes (no interpolation error).
struct SampledState {
    const CsfState* state = nullptr;
    std::vector<double> X, dX; // at grid.xi
    std::vector<double> Y, dY; // at grid.eta
    double eps = 0;
    int m = 0;
};

SampledState sample_state(const CsfState& st, const QuadratureGrid& grid);

// Exact re-integration of the radius factor at arbitrary ascending points.
void sample_radial(const RadialSolution& sol, std::span<const double> xi_points,
                   std::vector<double>& X, std::vector<double>& dX);

} // namespace hscs

#endif
