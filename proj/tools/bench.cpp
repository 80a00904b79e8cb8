// Times the serial kernels against the OpenMP ones on synthetic data.
// Both backends compute identical results by construction, so the only
// question is throughput; on a single hardware thread expect parity.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "patrec/kernels.hpp"

namespace {

using patrec::kernels::Backend;

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = static_cast<double>(eng()) / static_cast<double>(UINT64_MAX) * 2.0 - 1.0;
        }
    }
    return m;
}

double checksum = 0.0;  // keeps the optimizer from dropping the work

template <typename Fn>
double best_of_ms(Fn&& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        checksum += fn();
        const auto stop = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
        if (ms < best) best = ms;
    }
    return best;
}

void report(const char* name, double serial_ms, double openmp_ms) {
    std::printf("%-24s %10.2f ms %10.2f ms %9.2fx\n", name, serial_ms, openmp_ms,
                serial_ms / openmp_ms);
}

}  // namespace

int main(int argc, char** argv) {
    const Eigen::Index n = argc > 1 ? std::atol(argv[1]) : 1200;
    const Eigen::Index d = argc > 2 ? std::atol(argv[2]) : 16;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 3;

    std::printf("n=%ld d=%ld reps=%d threads=%d openmp=%s\n", static_cast<long>(n),
                static_cast<long>(d), reps, patrec::kernels::max_threads(),
                patrec::kernels::openmp_available() ? "yes" : "no");
    if (patrec::kernels::max_threads() == 1) {
        std::printf("single thread available: expect speedup near 1.0\n");
    }
    std::printf("%-24s %13s %13s %10s\n", "kernel", "serial", "openmp", "speedup");

    const Eigen::MatrixXd x = random_matrix(n, d, 11);
    const Eigen::MatrixXd z = random_matrix(n / 2, d, 12);

    report("rbf_gram",
           best_of_ms([&] { return patrec::kernels::rbf_gram(x, z, 1.0, Backend::serial).sum(); },
                      reps),
           best_of_ms([&] { return patrec::kernels::rbf_gram(x, z, 1.0, Backend::openmp).sum(); },
                      reps));

    report("mean_covariance",
           best_of_ms(
               [&] { return patrec::kernels::mean_covariance(x, Backend::serial).cov.sum(); },
               reps),
           best_of_ms(
               [&] { return patrec::kernels::mean_covariance(x, Backend::openmp).cov.sum(); },
               reps));

    const auto mc = patrec::kernels::mean_covariance(x, Backend::serial);
    Eigen::MatrixXd cov = mc.cov;
    cov.diagonal().array() += 1e-3;  // keep the factorization comfortably positive definite
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

    report("mvn_log_density_rows",
           best_of_ms(
               [&] {
                   return patrec::kernels::mvn_log_density_rows(x, mc.mean, chol, Backend::serial)
                       .sum();
               },
               reps),
           best_of_ms(
               [&] {
                   return patrec::kernels::mvn_log_density_rows(x, mc.mean, chol, Backend::openmp)
                       .sum();
               },
               reps));

    std::printf("checksum %.6g\n", checksum);
    return 0;
}
