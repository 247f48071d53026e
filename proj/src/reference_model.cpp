#include "hscs/reference_model.hpp"

#include <cmath>

namespace hscs {

std::vector<ChannelLabel> reference_model_labels(int n_channels) {
    // thresholds for m = (1,2,1), Z = (1,2): -4/3, -1/3, -1/4, -4/27, -1/16
    static const ChannelLabel all[5] = {{2, 1, 0, 0, true},
                                        {2, 2, 0, 0, true},
                                        {1, 1, 0, 0, true},
                                        {2, 3, 0, 0, true},
                                        {1, 2, 0, 0, true}};
    if (n_channels < 1 || n_channels > 5)
        throw ValidationError("reference model supports 1..5 channels");
    return {all, all + n_channels};
}

CouplingSet reference_model(const ParticleSystem& sys,
                            const std::vector<double>& rho_grid,
                            const ReferenceModelOptions& opt) {
    const int n = opt.n_channels;
    CouplingSet set;
    set.basis.J = 0;
    for (int i = 0; i < n; ++i) set.basis.states.push_back({0, i, 0});
    set.labels = reference_model_labels(n);
    set.rho = rho_grid;

    std::vector<double> thresholds(n);
    for (int i = 0; i < n; ++i)
        thresholds[i] =
            channel_threshold(sys, set.labels[i].alpha, set.labels[i].n);

    // frozen model parameters
    auto amp = [&](int i, int j) {
        const double base = (i >= 3 || j >= 3) ? opt.weak_scale : opt.coupling_scale;
        return base / (1.0 + std::abs(i - j));
    };

    for (std::size_t k = 0; k < rho_grid.size(); ++k) {
        const double rho = rho_grid[k];
        CouplingPoint pt;
        pt.rho = rho;
        pt.P = Eigen::MatrixXd::Zero(n, n);
        pt.Q = Eigen::MatrixXd::Zero(n, n);
        pt.R = Eigen::MatrixXd::Zero(n, n);
        pt.U = Eigen::MatrixXd::Zero(n, n);
        pt.W = Eigen::MatrixXd::Zero(n, n);
        pt.T = Eigen::MatrixXd::Zero(n, n);
        pt.eps.assign(n, 0.0);
        const double e = std::exp(-opt.beta * rho);
        for (int i = 0; i < n; ++i) {
            pt.U(i, i) = thresholds[i] + 0.4 * (i % 2 ? 1.0 : -1.0) * e;
            pt.W(i, i) = 0.2 / ((rho + 1.0) * (rho + 1.0));
            pt.P(i, i) = 0.01 * e;
            for (int j = i + 1; j < n; ++j) {
                pt.U(i, j) = pt.U(j, i) = amp(i, j) * e;
                pt.W(i, j) = pt.W(j, i) = 0.5 * amp(i, j) / ((rho + 1.0) * (rho + 1.0));
                pt.Q(i, j) = amp(i, j) * rho * e;
                pt.Q(j, i) = -pt.Q(i, j);
                pt.P(i, j) = pt.P(j, i) = 0.2 * amp(i, j) * e;
            }
        }
        set.points.push_back(std::move(pt));
    }
    return set;
}

} // namespace hscs
