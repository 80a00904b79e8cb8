#pragma once

#include <Eigen/Dense>
#include <vector>

#include "patrec/dataset.hpp"
#include "patrec/kernels.hpp"

namespace patrec {

struct KernelSpec {
    enum class Kind { rbf };
    Kind kind = Kind::rbf;
    double bandwidth = 1.0;  // sigma of exp(-|x-z|^2 / (2 sigma^2))

    bool operator==(const KernelSpec&) const = default;
};

/// Class-conditional Gaussian (prior, mean, covariance) plus the cached
/// Cholesky factor of the regularized covariance.
struct ClassGaussian {
    int label = 0;
    double prior = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;         // regularized, symmetric positive definite
    Eigen::MatrixXd chol_lower;  // derived from cov, rebuilt on deserialization
};

/// Gaussian maximum a posteriori classifier state; classes sorted by label.
struct MapState {
    std::vector<ClassGaussian> classes;
};

/// Per-class maximum-likelihood mean and sample covariance with empirical
/// class priors. Covariances get eps*(trace/d)*I added (eps starting at 1e-6,
/// escalating tenfold until the Cholesky succeeds).
MapState map_train(const DataSet& ds, kernels::Backend backend = kernels::default_backend());

/// Posterior p(c|x) proportional to prior_c * N(x; mean_c, cov_c), normalized
/// per row. Two classes emit a single column with the higher label's
/// posterior; more classes emit one column per label in ascending order.
DataSet map_run(const MapState& state, const DataSet& ds,
                kernels::Backend backend = kernels::default_backend());

struct IterationLimits {
    int max_outer = 500;       // precision-update sweeps
    int max_inner = 100;       // Newton steps per sweep
    double grad_tol = 1e-8;    // inner stop on gradient norm
    double alpha_tol = 1e-4;   // outer stop on max |delta log alpha|
    double prune_threshold = 1e8;

    bool operator==(const IterationLimits&) const = default;
};

/// Sparse kernel logistic model: the training inputs whose basis functions
/// survived precision pruning, their weights, and a separate bias weight.
struct RvmState {
    Eigen::MatrixXd relevance_vectors;        // r x d
    Eigen::VectorXd weights;                  // length r
    double bias = 0.0;
    KernelSpec kernel;
    std::vector<Eigen::Index> active_indices; // original training rows, length r
    bool converged = true;
    int outer_iterations = 0;
};

/// Relevance vector machine for binary class labels. Builds the kernel design
/// matrix with a bias column, then alternates a Newton (IRLS) fit of the
/// weights with evidence updates alpha_i <- gamma_i / mu_i^2, pruning bases
/// whose precision exceeds the threshold. The bias basis is never pruned; its
/// precision is capped at the threshold instead. Hitting the outer iteration
/// cap returns the state with converged = false.
RvmState rvm_train(const DataSet& ds, const KernelSpec& kernel = {},
                   const IterationLimits& limits = {},
                   kernels::Backend backend = kernels::default_backend());

/// score = logistic(bias + sum_j w_j k(x, rv_j)), one column, values kept
/// inside the open interval (0,1).
DataSet rvm_run(const RvmState& state, const DataSet& ds,
                kernels::Backend backend = kernels::default_backend());

/// Numerically stable logistic, clamped to (0,1) even where the exact value
/// would round to an endpoint.
double logistic(double a) noexcept;

}  // namespace patrec
