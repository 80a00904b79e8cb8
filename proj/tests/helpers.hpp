#pragma once

#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "patrec/dataset.hpp"
#include "patrec/error.hpp"

namespace testutil {

/// Runs fn and asserts it throws a patrec::Error of the given category.
template <typename Fn>
void expect_error(patrec::errc code, Fn&& fn) {
    bool threw = false;
    try {
        fn();
    } catch (const patrec::Error& e) {
        threw = true;
        CHECK_MESSAGE(e.code() == code, (std::string("wrong error category: ") + e.what()));
    }
    CHECK_MESSAGE(threw, "expected an error, none was thrown");
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = normal(eng);
    return m;
}

/// Two same-sized classes of unit-variance Gaussians whose means sit
/// `separation` apart along every axis. Labels 0 and 1, class 1 first.
inline patrec::DataSet two_blobs(Eigen::Index per_class, Eigen::Index d, double separation,
                                 std::uint64_t seed) {
    Eigen::MatrixXd obs = gaussian_matrix(2 * per_class, d, seed);
    obs.topRows(per_class).array() += separation / 2.0;
    obs.bottomRows(per_class).array() -= separation / 2.0;
    std::vector<int> labels(static_cast<std::size_t>(2 * per_class), 0);
    for (Eigen::Index i = 0; i < per_class; ++i) labels[static_cast<std::size_t>(i)] = 1;
    return patrec::DataSet(std::move(obs),
                           patrec::TargetBlock::classes(std::move(labels)));
}

inline patrec::DataSet unlabeled(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    return patrec::DataSet(gaussian_matrix(n, d, seed));
}

}  // namespace testutil
