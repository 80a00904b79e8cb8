#include "patrec/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace patrec {

namespace {

void require_class_labels(const DataSet& ds, const char* what) {
    if (!ds.has_targets() || ds.targets().kind != TargetBlock::Kind::class_labels)
        throw Error(errc::missing_targets, std::string(what) + " needs class-label targets");
}

void require_dim(Eigen::Index expected, const DataSet& ds, const char* what) {
    if (ds.d() != expected)
        throw Error(errc::dimension_mismatch,
                    std::string(what) + " trained on " + std::to_string(expected) +
                        " features, input has " + std::to_string(ds.d()));
}

std::map<int, std::vector<Eigen::Index>> rows_by_label(const TargetBlock& targets) {
    std::map<int, std::vector<Eigen::Index>> groups;
    for (std::size_t i = 0; i < targets.labels.size(); ++i)
        groups[targets.labels[i]].push_back(static_cast<Eigen::Index>(i));
    return groups;
}

// eps*(trace/d)*I smoothing, escalating until the factorization succeeds
void regularize_and_factor(ClassGaussian& g) {
    const Eigen::Index d = g.cov.rows();
    double scale = g.cov.trace() / double(d);
    if (!(scale > 0.0)) scale = 1.0;
    double eps = 1e-6;
    for (int attempt = 0; attempt < 60; ++attempt) {
        Eigen::MatrixXd candidate =
            g.cov + eps * scale * Eigen::MatrixXd::Identity(d, d);
        Eigen::LLT<Eigen::MatrixXd> llt(candidate);
        if (llt.info() == Eigen::Success) {
            g.cov = std::move(candidate);
            g.chol_lower = llt.matrixL();
            return;
        }
        eps *= 10.0;
    }
    throw Error(errc::degenerate_data, "class covariance could not be made positive definite");
}

double penalized_nll(const Eigen::MatrixXd& phi, const Eigen::VectorXd& targets,
                     const Eigen::VectorXd& alpha, const Eigen::VectorXd& w) {
    const Eigen::VectorXd a = phi * w;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        // softplus(a) - t*a, computed without overflow
        const double v = a(i);
        nll += std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))) - targets(i) * v;
    }
    return nll + 0.5 * alpha.cwiseProduct(w.cwiseAbs2()).sum();
}

}  // namespace

double logistic(double a) noexcept {
    double s;
    if (a >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-a));
    } else {
        const double e = std::exp(a);
        s = e / (1.0 + e);
    }
    s = std::min(s, std::nextafter(1.0, 0.0));
    return std::max(s, std::numeric_limits<double>::min());
}

MapState map_train(const DataSet& ds, kernels::Backend backend) {
    require_class_labels(ds, "map classifier");
    auto groups = rows_by_label(ds.targets());
    if (groups.size() < 2)
        throw Error(errc::single_class, "training data contains a single class");
    for (const auto& [label, rows] : groups)
        if (rows.size() < 2)
            throw Error(errc::too_few_per_class,
                        "class " + std::to_string(label) + " has only " +
                            std::to_string(rows.size()) + " observation(s)");

    MapState state;
    state.classes.reserve(groups.size());
    for (const auto& [label, rows] : groups) {
        DataSet class_rows = take_rows(ds, rows);
        auto mc = kernels::mean_covariance(class_rows.observations(), backend);
        ClassGaussian g;
        g.label = label;
        g.prior = double(rows.size()) / double(ds.n());
        g.mean = std::move(mc.mean);
        g.cov = std::move(mc.cov);
        regularize_and_factor(g);
        state.classes.push_back(std::move(g));
    }
    return state;
}

DataSet map_run(const MapState& state, const DataSet& ds, kernels::Backend backend) {
    if (state.classes.empty()) throw Error(errc::not_trained, "map classifier has no classes");
    require_dim(state.classes.front().mean.size(), ds, "map classifier");

    const Eigen::Index n = ds.n();
    const Eigen::Index c = static_cast<Eigen::Index>(state.classes.size());
    Eigen::MatrixXd log_joint(n, c);
    for (Eigen::Index k = 0; k < c; ++k) {
        const ClassGaussian& g = state.classes[static_cast<std::size_t>(k)];
        log_joint.col(k) =
            kernels::mvn_log_density_rows(ds.observations(), g.mean, g.chol_lower, backend)
                .array() +
            std::log(g.prior);
    }

    Eigen::MatrixXd posterior(n, c);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double peak = log_joint.row(i).maxCoeff();
        double total = 0.0;
        for (Eigen::Index k = 0; k < c; ++k) {
            posterior(i, k) = std::exp(log_joint(i, k) - peak);
            total += posterior(i, k);
        }
        posterior.row(i) /= total;
    }

    if (c == 2) {
        // single score column: posterior of the higher label
        return ds.with_observations(posterior.col(1), {"score"});
    }
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(c));
    for (const auto& g : state.classes) names.push_back("score_" + std::to_string(g.label));
    return ds.with_observations(std::move(posterior), std::move(names));
}

RvmState rvm_train(const DataSet& ds, const KernelSpec& kernel, const IterationLimits& limits,
                   kernels::Backend backend) {
    require_class_labels(ds, "rvm");
    auto groups = rows_by_label(ds.targets());
    if (groups.size() != 2)
        throw Error(errc::not_binary, "rvm needs exactly two classes, got " +
                                          std::to_string(groups.size()));
    if (ds.n() < 2) throw Error(errc::empty_dataset, "rvm needs at least two observations");

    const Eigen::Index n = ds.n();
    const int positive_label = groups.rbegin()->first;
    Eigen::VectorXd targets(n);
    for (Eigen::Index i = 0; i < n; ++i)
        targets(i) = ds.targets().labels[static_cast<std::size_t>(i)] == positive_label ? 1.0
                                                                                        : 0.0;

    // design matrix: bias column followed by one kernel basis per training row
    Eigen::MatrixXd phi_full(n, n + 1);
    phi_full.col(0).setOnes();
    phi_full.rightCols(n) =
        kernels::rbf_gram(ds.observations(), ds.observations(), kernel.bandwidth, backend);

    std::vector<Eigen::Index> active(static_cast<std::size_t>(n) + 1);
    for (std::size_t j = 0; j < active.size(); ++j) active[j] = static_cast<Eigen::Index>(j);
    Eigen::VectorXd alpha = Eigen::VectorXd::Ones(n + 1);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);

    bool converged = false;
    int outer = 0;
    for (; outer < limits.max_outer; ++outer) {
        const Eigen::Index k = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd phi(n, k);
        for (Eigen::Index j = 0; j < k; ++j)
            phi.col(j) = phi_full.col(active[static_cast<std::size_t>(j)]);

        // IRLS: Newton steps with halving, each accepted step lowers the
        // penalized negative log likelihood
        for (int inner = 0; inner < limits.max_inner; ++inner) {
            const Eigen::VectorXd activation = phi * w;
            Eigen::VectorXd y(n);
            for (Eigen::Index i = 0; i < n; ++i) y(i) = logistic(activation(i));
            const Eigen::VectorXd grad =
                phi.transpose() * (targets - y) - alpha.cwiseProduct(w);
            if (grad.norm() < limits.grad_tol) break;
            const Eigen::VectorXd weights_irls =
                (y.array() * (1.0 - y.array())).max(1e-12).matrix();
            Eigen::MatrixXd hessian = phi.transpose() * weights_irls.asDiagonal() * phi;
            hessian.diagonal() += alpha;
            const Eigen::VectorXd step = hessian.ldlt().solve(grad);
            const double f0 = penalized_nll(phi, targets, alpha, w);
            double lambda = 1.0;
            Eigen::VectorXd next = w + step;
            while (lambda > 1e-10 && penalized_nll(phi, targets, alpha, next) >= f0) {
                lambda *= 0.5;
                next = w + lambda * step;
            }
            if (lambda <= 1e-10) break;  // at the mode to working precision
            w = std::move(next);
        }

        // Laplace covariance at the mode drives the precision update
        const Eigen::VectorXd activation = phi * w;
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = logistic(activation(i));
        const Eigen::VectorXd weights_irls =
            (y.array() * (1.0 - y.array())).max(1e-12).matrix();
        Eigen::MatrixXd hessian = phi.transpose() * weights_irls.asDiagonal() * phi;
        hessian.diagonal() += alpha;
        const Eigen::MatrixXd sigma =
            hessian.ldlt().solve(Eigen::MatrixXd::Identity(k, k));

        Eigen::VectorXd new_alpha(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            const double gamma = std::max(1.0 - alpha(j) * sigma(j, j), 0.0);
            const double mu_sq = w(j) * w(j);
            new_alpha(j) = mu_sq > 0.0 ? gamma / mu_sq
                                       : std::numeric_limits<double>::infinity();
        }
        new_alpha(0) = std::min(new_alpha(0), limits.prune_threshold);  // bias stays

        bool pruned = false;
        bool settled = true;
        std::vector<Eigen::Index> next_active;
        std::vector<double> next_alpha, next_w;
        for (Eigen::Index j = 0; j < k; ++j) {
            const bool keep = j == 0 || new_alpha(j) <= limits.prune_threshold;
            if (!keep) {
                pruned = true;
                continue;
            }
            const double delta = std::abs(std::log(std::max(new_alpha(j), 1e-300)) -
                                          std::log(std::max(alpha(j), 1e-300)));
            if (delta >= limits.alpha_tol) settled = false;
            next_active.push_back(active[static_cast<std::size_t>(j)]);
            next_alpha.push_back(new_alpha(j));
            next_w.push_back(w(j));
        }
        active = std::move(next_active);
        alpha = Eigen::Map<Eigen::VectorXd>(next_alpha.data(),
                                            static_cast<Eigen::Index>(next_alpha.size()));
        w = Eigen::Map<Eigen::VectorXd>(next_w.data(),
                                        static_cast<Eigen::Index>(next_w.size()));
        if (settled && !pruned) {
            converged = true;
            ++outer;
            break;
        }
    }

    RvmState state;
    state.kernel = kernel;
    state.converged = converged;
    state.outer_iterations = outer;
    state.bias = w(0);
    const Eigen::Index r = static_cast<Eigen::Index>(active.size()) - 1;
    state.weights = w.segment(1, r);
    state.relevance_vectors.resize(r, ds.d());
    state.active_indices.reserve(static_cast<std::size_t>(r));
    for (Eigen::Index j = 0; j < r; ++j) {
        const Eigen::Index row = active[static_cast<std::size_t>(j) + 1] - 1;
        state.active_indices.push_back(row);
        state.relevance_vectors.row(j) = ds.observations().row(row);
    }
    return state;
}

DataSet rvm_run(const RvmState& state, const DataSet& ds, kernels::Backend backend) {
    require_dim(state.relevance_vectors.cols(), ds, "rvm");
    const Eigen::Index n = ds.n();
    Eigen::VectorXd scores(n);
    if (state.weights.size() == 0) {
        for (Eigen::Index i = 0; i < n; ++i) scores(i) = logistic(state.bias);
    } else {
        const Eigen::MatrixXd gram = kernels::rbf_gram(ds.observations(), state.relevance_vectors,
                                                       state.kernel.bandwidth, backend);
        const Eigen::VectorXd activation =
            (gram * state.weights).array() + state.bias;
        for (Eigen::Index i = 0; i < n; ++i) scores(i) = logistic(activation(i));
    }
    return ds.with_observations(scores, {"score"});
}

}  // namespace patrec
