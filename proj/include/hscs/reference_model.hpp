#ifndef HSCS_REFERENCE_MODEL_HPP
#define HSCS_REFERENCE_MODEL_HPP

#include "hscs/coupling.hpp"

namespace hscs {

// Synthetic J = 0 coupling set over the physical channel thresholds of `sys`,
// with the exact structural properties of the real families (Q antisymmetric
// with zero diagonal, P/U/W symmetric, U_ii -> threshold, exponential decay)
// and frozen parameters. Channels beyond the third couple weakly. Used by the
// scattering-algebra checks and as the single-channel oracle problem.
struct ReferenceModelOptions {
    int n_channels = 3;
    double coupling_scale = 0.05;
    double weak_scale = 5e-3; // channels 4, 5, ...
    double beta = 0.5;        // exponential range of U/Q/P couplings
};

CouplingSet reference_model(const ParticleSystem& sys,
                            const std::vector<double>& rho_grid,
                            const ReferenceModelOptions& opt = {});

// The channel labels the model uses, in basis order.
std::vector<ChannelLabel> reference_model_labels(int n_channels);

} // namespace hscs

#endif
