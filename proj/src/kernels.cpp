#include "patrec/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace patrec::kernels {

bool openmp_available() noexcept {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Backend default_backend() noexcept {
    return openmp_available() ? Backend::openmp : Backend::serial;
}

namespace {

constexpr double k_log_2pi = 1.8378770664093454836;

// Every element is produced by exactly one iteration and summed left to
// right over the feature axis, which is what makes the backends bit-equal.
inline double rbf_entry(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z, Eigen::Index i,
                        Eigen::Index j, double inv_two_sigma_sq) {
    double dist_sq = 0.0;
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const double diff = x(i, k) - z(j, k);
        dist_sq += diff * diff;
    }
    return std::exp(-dist_sq * inv_two_sigma_sq);
}

inline double column_sum(const Eigen::MatrixXd& x, Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) s += x(i, j);
    return s;
}

inline double centered_product_sum(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                                   Eigen::Index j, Eigen::Index k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        s += (x(i, j) - mean(j)) * (x(i, k) - mean(k));
    return s;
}

inline double row_log_density(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                              const Eigen::MatrixXd& chol_lower, Eigen::Index i,
                              double constant) {
    // forward substitution L y = (x_i - mean), then |y|^2 is the Mahalanobis term
    const Eigen::Index d = mean.size();
    double quad = 0.0;
    Eigen::VectorXd y(d);
    for (Eigen::Index r = 0; r < d; ++r) {
        double s = x(i, r) - mean(r);
        for (Eigen::Index c = 0; c < r; ++c) s -= chol_lower(r, c) * y(c);
        y(r) = s / chol_lower(r, r);
        quad += y(r) * y(r);
    }
    return constant - 0.5 * quad;
}

}  // namespace

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z, double sigma,
                         Backend backend) {
    const Eigen::Index n = x.rows();
    const Eigen::Index m = z.rows();
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    Eigen::MatrixXd out(n, m);
    if (backend == Backend::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                out(i, j) = rbf_entry(x, z, i, j, inv_two_sigma_sq);
    } else {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                out(i, j) = rbf_entry(x, z, i, j, inv_two_sigma_sq);
    }
    return out;
}

MeanCov mean_covariance(const Eigen::MatrixXd& x, Backend backend) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    MeanCov result;
    result.mean.resize(d);
    result.cov = Eigen::MatrixXd::Zero(d, d);

    if (backend == Backend::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (Eigen::Index j = 0; j < d; ++j) result.mean(j) = column_sum(x, j) / double(n);
    } else {
        for (Eigen::Index j = 0; j < d; ++j) result.mean(j) = column_sum(x, j) / double(n);
    }
    if (n < 2) return result;  // zero covariance for a single row

    const Eigen::Index pairs = d * (d + 1) / 2;
    const double denom = double(n - 1);
    if (backend == Backend::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (Eigen::Index p = 0; p < pairs; ++p) {
            // unflatten upper-triangle pair index
            Eigen::Index j = 0;
            Eigen::Index rem = p;
            while (rem >= d - j) {
                rem -= d - j;
                ++j;
            }
            const Eigen::Index k = j + rem;
            const double v = centered_product_sum(x, result.mean, j, k) / denom;
            result.cov(j, k) = v;
            result.cov(k, j) = v;
        }
    } else {
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = j; k < d; ++k) {
                const double v = centered_product_sum(x, result.mean, j, k) / denom;
                result.cov(j, k) = v;
                result.cov(k, j) = v;
            }
    }
    return result;
}

Eigen::VectorXd mvn_log_density_rows(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                                     const Eigen::MatrixXd& chol_lower, Backend backend) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = mean.size();
    double log_det = 0.0;
    for (Eigen::Index r = 0; r < d; ++r) log_det += std::log(chol_lower(r, r));
    const double constant = -0.5 * double(d) * k_log_2pi - log_det;

    Eigen::VectorXd out(n);
    if (backend == Backend::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (Eigen::Index i = 0; i < n; ++i)
            out(i) = row_log_density(x, mean, chol_lower, i, constant);
    } else {
        for (Eigen::Index i = 0; i < n; ++i)
            out(i) = row_log_density(x, mean, chol_lower, i, constant);
    }
    return out;
}

}  // namespace patrec::kernels
