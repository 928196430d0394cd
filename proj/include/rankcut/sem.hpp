#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rankcut/augment.hpp"
#include "rankcut/dag.hpp"
#include "rankcut/error.hpp"
#include "rankcut/selection.hpp"

namespace rankcut {

/// Linear-Gaussian SEM  X = Lambda X + E,  E ~ N(0, diag(phi)),  shifted by mean mu.
/// Lambda(j, i) is the weight of edge i -> j.
class LinearSem {
public:
    LinearSem() = default;

    explicit LinearSem(Dag graph) : LinearSem(graph, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(graph.size()))) {}

    LinearSem(Dag graph, Eigen::VectorXd phi, std::optional<Eigen::VectorXd> mu = std::nullopt)
        : graph_(std::move(graph)), phi_(std::move(phi)) {
        const auto n = static_cast<Eigen::Index>(graph_.size());
        if (!graph_.nodes_with_role(NodeRole::SelectionResponse).empty()) {
            throw InputError("a linear SEM is defined over observed and latent nodes only");
        }
        if (phi_.size() != n) throw InputError("noise variance vector has the wrong length");
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!std::isfinite(phi_(i)) || phi_(i) <= 0.0) {
                throw InputError("noise variance of '" + graph_.node(static_cast<std::size_t>(i)).name +
                                 "' must be positive");
            }
        }
        mu_ = mu ? *mu : Eigen::VectorXd::Zero(n);
        if (mu_.size() != n) throw InputError("mean vector has the wrong length");
        lambda_ = Eigen::MatrixXd::Zero(n, n);
        for (const auto& e : graph_.edges()) {
            lambda_(static_cast<Eigen::Index>(e.child), static_cast<Eigen::Index>(e.parent)) = e.weight;
        }
    }

    [[nodiscard]] const Dag& graph() const { return graph_; }
    [[nodiscard]] const Eigen::MatrixXd& lambda() const { return lambda_; }
    [[nodiscard]] const Eigen::VectorXd& phi() const { return phi_; }
    [[nodiscard]] const Eigen::VectorXd& mu() const { return mu_; }
    [[nodiscard]] std::size_t size() const { return graph_.size(); }

    [[nodiscard]] std::vector<std::string> labels() const {
        std::vector<std::string> out;
        for (const auto& n : graph_.nodes()) out.push_back(n.name);
        return out;
    }

private:
    Dag graph_;
    Eigen::MatrixXd lambda_;
    Eigen::VectorXd phi_;
    Eigen::VectorXd mu_;
};

/// Labelled covariance matrix; `sample_count` is empty for population quantities.
struct CovarianceMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd values;
    std::optional<std::size_t> sample_count;

    [[nodiscard]] std::size_t size() const { return labels.size(); }

    [[nodiscard]] std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) return i;
        }
        throw InputError("unknown variable '" + label + "'");
    }

    [[nodiscard]] std::vector<std::size_t> indices_of(const std::vector<std::string>& names) const {
        std::vector<std::size_t> out;
        for (const auto& n : names) out.push_back(index_of(n));
        return out;
    }

    [[nodiscard]] Eigen::MatrixXd block(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
        Eigen::MatrixXd out(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < cols.size(); ++j) {
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    values(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
            }
        }
        return out;
    }

    [[nodiscard]] Eigen::MatrixXd block(const std::vector<std::string>& rows, const std::vector<std::string>& cols) const {
        return block(indices_of(rows), indices_of(cols));
    }

    [[nodiscard]] double operator()(const std::string& r, const std::string& c) const {
        return values(static_cast<Eigen::Index>(index_of(r)), static_cast<Eigen::Index>(index_of(c)));
    }

    /// Symmetric to 1e-12 relative, nonnegative diagonal.
    [[nodiscard]] bool well_formed() const {
        const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
        if ((values - values.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
        return (values.diagonal().array() >= 0.0).all();
    }
};

namespace detail {

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                                 const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
        }
    }
    return out;
}

}  // namespace detail

/// Sigma = (I - Lambda)^{-1} Phi (I - Lambda)^{-T}.
inline CovarianceMatrix population_covariance(const LinearSem& sem) {
    const auto n = static_cast<Eigen::Index>(sem.size());
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - sem.lambda();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw NumericalError("I - Lambda is numerically singular");
    const Eigen::MatrixXd inv = lu.inverse();
    return {sem.labels(), detail::symmetrized(inv * sem.phi().asDiagonal() * inv.transpose()), std::nullopt};
}

/// k x |X| matrix whose row i holds condition i's coefficients on its targets.
inline Eigen::MatrixXd loading_matrix(const LinearSem& sem, const SelectionConfig& config) {
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(config.size()),
                                                  static_cast<Eigen::Index>(sem.size()));
    for (std::size_t i = 0; i < config.size(); ++i) {
        const auto& cond = config.conditions[i];
        cond.validate();
        for (std::size_t t = 0; t < cond.targets.size(); ++t) {
            auto idx = sem.graph().find(cond.targets[t]);
            if (!idx) throw ConfigError("selection target '" + cond.targets[t] + "' is not a model variable");
            beta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*idx)) = cond.coeffs[t];
        }
    }
    return beta;
}

/// Pre-selection covariance of (X, Y):  [Sigma, Sigma B'; B Sigma, B Sigma B' + diag(var eps)].
inline CovarianceMatrix joint_covariance_with_responses(const LinearSem& sem, const SelectionConfig& config) {
    const auto sigma = population_covariance(sem);
    const Eigen::MatrixXd beta = loading_matrix(sem, config);
    const auto p = static_cast<Eigen::Index>(sem.size());
    const auto k = static_cast<Eigen::Index>(config.size());
    Eigen::MatrixXd joint(p + k, p + k);
    const Eigen::MatrixXd sxy = sigma.values * beta.transpose();
    Eigen::MatrixXd syy = beta * sxy;
    for (Eigen::Index i = 0; i < k; ++i) syy(i, i) += config.conditions[static_cast<std::size_t>(i)].noise.variance();
    joint.topLeftCorner(p, p) = sigma.values;
    joint.topRightCorner(p, k) = sxy;
    joint.bottomLeftCorner(k, p) = sxy.transpose();
    joint.bottomRightCorner(k, k) = syy;

    auto labels = sigma.labels;
    for (std::size_t i = 0; i < config.size(); ++i) labels.push_back(config.response_name(i));
    return {std::move(labels), detail::symmetrized(joint), std::nullopt};
}

/// Cov(X | Y = y) = S_XX - S_XY S_YY^{-1} S_YX for jointly Gaussian (X, Y); independent of y.
inline CovarianceMatrix pointwise_conditional_covariance(const CovarianceMatrix& sigma,
                                                         const std::vector<std::size_t>& x_idx,
                                                         const std::vector<std::size_t>& y_idx) {
    for (auto i : x_idx) {
        if (i >= sigma.size()) throw InputError("conditional covariance index out of range");
    }
    for (auto i : y_idx) {
        if (i >= sigma.size()) throw InputError("conditional covariance index out of range");
    }
    std::vector<std::string> labels;
    for (auto i : x_idx) labels.push_back(sigma.labels[i]);
    const Eigen::MatrixXd sxx = detail::submatrix(sigma.values, x_idx, x_idx);
    if (y_idx.empty()) return {std::move(labels), sxx, sigma.sample_count};

    const Eigen::MatrixXd sxy = detail::submatrix(sigma.values, x_idx, y_idx);
    const Eigen::MatrixXd syy = detail::submatrix(sigma.values, y_idx, y_idx);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(syy);
    const auto d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || dmax == 0.0 || d.minCoeff() <= 1e-12 * dmax) {
        throw DegenerateSelection("covariance of the selection responses is singular");
    }
    return {std::move(labels), detail::symmetrized(sxx - sxy * ldlt.solve(sxy.transpose())), sigma.sample_count};
}

namespace detail {

inline double normal_pdf(double z) {
    if (!std::isfinite(z)) return 0.0;
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Variance of N(mean, sd^2) restricted to a union of intervals.
inline double truncated_normal_variance(double mean, double sd, const AdmissibleSet& set) {
    double mass = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto& iv : set.intervals()) {
        const double a = (iv.lo - mean) / sd;
        const double b = (iv.hi - mean) / sd;
        const double pa = normal_pdf(a), pb = normal_pdf(b);
        const double ta = std::isfinite(a) ? a * pa : 0.0;
        const double tb = std::isfinite(b) ? b * pb : 0.0;
        const double w = (a >= 0.0) ? 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2))
                                    : normal_cdf(b) - normal_cdf(a);
        mass += w;
        m1 += pa - pb;
        m2 += w + ta - tb;
    }
    if (mass <= 0.0) throw InfeasibleSelection("admissible set has zero probability under the response marginal");
    const double mean_z = m1 / mass;
    return sd * sd * (m2 / mass - mean_z * mean_z);
}

}  // namespace detail

/// Exact post-selection covariance of X for the Gaussian cases with a closed form:
/// every condition pointwise (singleton admissible set, Gaussian noise), or a single
/// condition with an interval admissible set and Gaussian or constant noise. Other
/// configurations need Monte Carlo.
inline CovarianceMatrix gaussian_post_selection_covariance(const LinearSem& sem, const SelectionConfig& config) {
    const auto joint = joint_covariance_with_responses(sem, config);
    std::vector<std::size_t> xs(sem.size()), ys;
    for (std::size_t i = 0; i < sem.size(); ++i) xs[i] = i;
    for (std::size_t i = 0; i < config.size(); ++i) ys.push_back(sem.size() + i);
    if (config.empty()) return pointwise_conditional_covariance(joint, xs, ys);

    const bool pointwise = std::all_of(config.conditions.begin(), config.conditions.end(), [](const auto& c) {
        return !c.admissible.has_positive_measure() && c.noise.kind == NoiseKind::Gaussian &&
               c.admissible.points().size() == 1;
    });
    if (pointwise) return pointwise_conditional_covariance(joint, xs, ys);

    const auto& cond = config.conditions.front();
    const bool single_interval = config.size() == 1 && cond.admissible.points().empty() &&
                                 (cond.noise.kind == NoiseKind::Gaussian || cond.noise.kind == NoiseKind::Constant);
    if (!single_interval) {
        throw ConfigError("no closed-form post-selection covariance for this selection; use Monte Carlo");
    }
    auto base = pointwise_conditional_covariance(joint, xs, ys);
    const auto p = static_cast<Eigen::Index>(sem.size());
    const Eigen::VectorXd sxy = joint.values.topRightCorner(p, 1);
    const double syy = joint.values(p, p);
    const double mean_y = (loading_matrix(sem, config) * sem.mu())(0) + cond.noise.param * (cond.noise.stochastic() ? 0.0 : 1.0);
    const double vy = detail::truncated_normal_variance(mean_y, std::sqrt(syy), cond.admissible);
    const Eigen::VectorXd proj = sxy / syy;
    base.values += vy * proj * proj.transpose();
    base.values = detail::symmetrized(base.values);
    return base;
}

}  // namespace rankcut
