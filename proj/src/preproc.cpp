#include "patrec/preproc.hpp"

#include <algorithm>
#include <cmath>

namespace patrec {

namespace {

void require_dim(Eigen::Index expected, const DataSet& ds, const char* what) {
    if (ds.d() != expected)
        throw Error(errc::dimension_mismatch,
                    std::string(what) + " trained on " + std::to_string(expected) +
                        " features, input has " + std::to_string(ds.d()));
}

}  // namespace

ZmuvState zmuv_train(const DataSet& ds, kernels::Backend backend) {
    if (ds.n() < 1) throw Error(errc::empty_dataset, "zmuv needs at least one observation");
    auto mc = kernels::mean_covariance(ds.observations(), backend);
    ZmuvState state;
    state.means = std::move(mc.mean);
    state.stds = mc.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return state;
}

DataSet zmuv_run(const ZmuvState& state, const DataSet& ds) {
    require_dim(state.means.size(), ds, "zmuv");
    Eigen::VectorXd divisors = state.stds;
    for (Eigen::Index j = 0; j < divisors.size(); ++j)
        if (divisors(j) == 0.0) divisors(j) = 1.0;
    Eigen::MatrixXd out =
        (ds.observations().rowwise() - state.means.transpose()).array().rowwise() /
        divisors.transpose().array();
    return ds.with_observations(std::move(out), ds.feature_names());
}

PcaState pca_train(const DataSet& ds, int n_components, kernels::Backend backend) {
    if (ds.n() < 1) throw Error(errc::empty_dataset, "pca needs at least one observation");
    const Eigen::Index limit = std::min<Eigen::Index>(ds.n() - 1, ds.d());
    if (n_components < 1 || n_components > limit)
        throw Error(errc::too_many_components,
                    "n_components " + std::to_string(n_components) + " outside [1, " +
                        std::to_string(limit) + "] for " + std::to_string(ds.n()) + "x" +
                        std::to_string(ds.d()) + " data");

    auto mc = kernels::mean_covariance(ds.observations(), backend);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mc.cov);
    if (solver.info() != Eigen::Success)
        throw Error(errc::degenerate_data, "eigendecomposition of the covariance failed");

    // solver returns ascending eigenvalues; take the top m in descending order
    const Eigen::Index d = ds.d();
    const Eigen::Index m = n_components;
    PcaState state;
    state.mean = std::move(mc.mean);
    state.components.resize(d, m);
    state.eigenvalues.resize(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        state.eigenvalues(c) = solver.eigenvalues()(d - 1 - c);
        state.components.col(c) = solver.eigenvectors().col(d - 1 - c);
    }

    // sign convention: largest-magnitude entry positive, ties to lowest index
    for (Eigen::Index c = 0; c < m; ++c) {
        Eigen::Index pivot = 0;
        double best = std::abs(state.components(0, c));
        for (Eigen::Index r = 1; r < d; ++r) {
            const double mag = std::abs(state.components(r, c));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (state.components(pivot, c) < 0.0) state.components.col(c) = -state.components.col(c);
    }
    return state;
}

DataSet pca_run(const PcaState& state, const DataSet& ds) {
    require_dim(state.mean.size(), ds, "pca");
    Eigen::MatrixXd out =
        (ds.observations().rowwise() - state.mean.transpose()) * state.components;
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(state.components.cols()));
    for (Eigen::Index c = 0; c < state.components.cols(); ++c)
        names.push_back("pc" + std::to_string(c + 1));
    return ds.with_observations(std::move(out), std::move(names));
}

}  // namespace patrec
