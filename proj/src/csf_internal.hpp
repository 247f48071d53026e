#ifndef HSCS_CSF_INTERNAL_HPP
#define HSCS_CSF_INTERNAL_HPP

#include <vector>

#include "hscs/ode.hpp"

// Shared internals of the radial shooting integrator (csf_radial.cpp) used
// by the tabulation pass in csf_state.cpp.

namespace hscs::internal {

double radial_xi_max(double a, double p, int m);
double radial_turning_point(double a, double p, int m, double lambda);
double radial_stretch(double s, double xi_max, double sigma);
double radial_sigma(double p, double xi_max);

struct RadialRhs {
    double a, p, lambda;
    int m;
    bool with_integrals = false;
    void operator()(double xi, const std::vector<double>& y,
                    std::vector<double>& dy) const;
};

struct BranchState {
    std::vector<double> y; // F, F' (+ I0, I2)
    double logscale = 0;   // true = stored * exp(logscale)
    int nodes = 0;
};

void advance_branch(const RadialRhs& rhs, const DormandPrince& dp, double x0,
                    double x1, BranchState& st);
void outward_seed(double a, double p, int m, double lambda, double s0, double& F,
                  double& Fp);
void inward_seed(double a, double p, int m, double xi_max, double& F, double& Fp);

} // namespace hscs::internal

#endif
