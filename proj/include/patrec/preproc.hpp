#pragma once

#include <Eigen/Dense>

#include "patrec/dataset.hpp"
#include "patrec/kernels.hpp"

namespace patrec {

/// Per-feature statistics learned by zero-mean/unit-variance normalization.
struct ZmuvState {
    Eigen::VectorXd means;
    Eigen::VectorXd stds;  // sample standard deviation, n-1 denominator
};

/// Learns per-column mean and sample standard deviation.
ZmuvState zmuv_train(const DataSet& ds,
                     kernels::Backend backend = kernels::default_backend());

/// x' = (x - mean) / std per column; columns with zero deviation divide by 1,
/// so constant features map to zero.
DataSet zmuv_run(const ZmuvState& state, const DataSet& ds);

/// Principal components basis learned from the training covariance.
struct PcaState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;   // d x m, orthonormal columns
    Eigen::VectorXd eigenvalues;  // length m, descending
};

/// Top n_components eigenvectors of the sample covariance of centered data.
/// Sign is fixed so each component's largest-magnitude entry is positive
/// (ties broken by lowest index), making the result reproducible bit for bit.
/// Data is always centered with the stored mean; no internal rescaling.
PcaState pca_train(const DataSet& ds, int n_components,
                   kernels::Backend backend = kernels::default_backend());

/// (X - mean) * components; output features are named pc1..pcm.
DataSet pca_run(const PcaState& state, const DataSet& ds);

}  // namespace patrec
