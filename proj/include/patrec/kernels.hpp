#pragma once

#include <Eigen/Dense>

namespace patrec::kernels {

/// Numeric hot loops come in two interchangeable flavors. The serial one is
/// the reference; the OpenMP one distributes independent output elements
/// across threads and sums every element in the same order, so the two
/// backends produce bit-identical results and either can be used anywhere.
enum class Backend { serial, openmp };

bool openmp_available() noexcept;
int max_threads() noexcept;

/// openmp when compiled with OpenMP support, serial otherwise.
Backend default_backend() noexcept;

/// RBF Gram matrix: out(i,j) = exp(-|x_i - z_j|^2 / (2 sigma^2)).
Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z, double sigma,
                         Backend backend = default_backend());

struct MeanCov {
    Eigen::VectorXd mean;  // column means
    Eigen::MatrixXd cov;   // sample covariance, n-1 denominator
};

/// Column means and sample covariance of the rows of x. With a single row
/// the covariance is the zero matrix.
MeanCov mean_covariance(const Eigen::MatrixXd& x, Backend backend = default_backend());

/// Per-row multivariate Gaussian log density N(x_i; mean, L L^T) given the
/// lower Cholesky factor of the covariance.
Eigen::VectorXd mvn_log_density_rows(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                                     const Eigen::MatrixXd& chol_lower,
                                     Backend backend = default_backend());

}  // namespace patrec::kernels
