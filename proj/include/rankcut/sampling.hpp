#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rankcut/error.hpp"
#include "rankcut/selection.hpp"
#include "rankcut/sem.hpp"

namespace rankcut {

/// Column-labelled data matrix, one sample per row.
struct Dataset {
    std::vector<std::string> labels;
    Eigen::MatrixXd values;

    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    [[nodiscard]] std::size_t cols() const { return labels.size(); }

    [[nodiscard]] std::size_t column(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) return i;
        }
        throw InputError("data has no column '" + label + "'");
    }

    [[nodiscard]] std::vector<std::size_t> columns(const std::vector<std::string>& names) const {
        std::vector<std::size_t> out;
        for (const auto& n : names) out.push_back(column(n));
        return out;
    }

    [[nodiscard]] Dataset select(const std::vector<std::size_t>& cols) const {
        Dataset out;
        out.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out.labels.push_back(labels.at(cols[j]));
            out.values.col(static_cast<Eigen::Index>(j)) = values.col(static_cast<Eigen::Index>(cols[j]));
        }
        return out;
    }
};

struct SampleOptions {
    double min_acceptance_rate = 1e-4;
    std::uint64_t proposals_before_check = 1'000'000;
};

struct SampleStats {
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;

    [[nodiscard]] double acceptance_rate() const {
        return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
    }
};

namespace detail {

struct CompiledCondition {
    std::vector<std::size_t> targets;
    const SelectionCondition* cond;
};

class AncestralSampler {
public:
    AncestralSampler(const LinearSem& sem, const SelectionConfig& config) : sem_(sem) {
        const auto& g = sem.graph();
        for (std::size_t j = 0; j < g.size(); ++j) {
            std::vector<std::pair<std::size_t, double>> ps;
            for (auto i : g.parents(j)) {
                ps.emplace_back(i, sem.lambda()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
            }
            parents_.push_back(std::move(ps));
            sd_.push_back(std::sqrt(sem.phi()(static_cast<Eigen::Index>(j))));
        }
        for (const auto& cond : config.conditions) {
            cond.validate();
            CompiledCondition cc{{}, &cond};
            for (const auto& t : cond.targets) {
                auto idx = g.find(t);
                if (!idx) throw ConfigError("selection target '" + t + "' is not a model variable");
                cc.targets.push_back(*idx);
            }
            conditions_.push_back(std::move(cc));
        }
    }

    template <class Rng>
    void draw(Rng& rng, std::vector<double>& x) {
        std::normal_distribution<double> std_normal(0.0, 1.0);
        const auto& mu = sem_.mu();
        x.assign(sem_.size(), 0.0);
        for (auto j : sem_.graph().topological_order()) {
            double v = mu(static_cast<Eigen::Index>(j));
            for (const auto& [i, w] : parents_[j]) v += w * (x[i] - mu(static_cast<Eigen::Index>(i)));
            x[j] = v + sd_[j] * std_normal(rng);
        }
    }

    [[nodiscard]] double score(std::size_t c, const std::vector<double>& x) const {
        const auto& cc = conditions_[c];
        double s = 0.0;
        for (std::size_t t = 0; t < cc.targets.size(); ++t) s += cc.cond->coeffs[t] * x[cc.targets[t]];
        return s;
    }

    /// One Bernoulli trial of "all responses admissible".
    template <class Rng>
    bool accept(Rng& rng, const std::vector<double>& x) {
        for (std::size_t c = 0; c < conditions_.size(); ++c) {
            const auto& cond = *conditions_[c].cond;
            const double s = score(c, x);
            if (cond.admissible.has_positive_measure() || !cond.noise.stochastic()) {
                if (!cond.admissible.contains(s + cond.noise.draw(rng))) return false;
            } else {
                double w = 0.0;
                for (double y : cond.admissible.points()) w += cond.noise.pdf(y - s);
                w /= cond.noise.pdf_max() * static_cast<double>(cond.admissible.points().size());
                if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= w) return false;
            }
        }
        return true;
    }

    [[nodiscard]] std::size_t condition_count() const { return conditions_.size(); }

private:
    const LinearSem& sem_;
    std::vector<std::vector<std::pair<std::size_t, double>>> parents_;
    std::vector<double> sd_;
    std::vector<CompiledCondition> conditions_;
};

}  // namespace detail

/// n i.i.d. rows from the post-selection distribution: ancestral sampling of the SEM,
/// then rejection on every condition. Point-only admissible sets under stochastic noise
/// are accepted with probability proportional to the noise density at the points.
inline Dataset sample(const LinearSem& sem, const SelectionConfig& config, std::size_t n, std::uint64_t seed,
                      const SampleOptions& opts = {}, SampleStats* stats = nullptr) {
    if (n < 1) throw InputError("sample size must be at least 1");
    detail::AncestralSampler sampler(sem, config);
    std::mt19937_64 rng(seed);
    Dataset out{sem.labels(), Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sem.size()))};
    SampleStats st;
    std::vector<double> x;
    while (st.accepted < n) {
        sampler.draw(rng, x);
        ++st.proposals;
        if (sampler.accept(rng, x)) {
            for (std::size_t j = 0; j < x.size(); ++j) {
                out.values(static_cast<Eigen::Index>(st.accepted), static_cast<Eigen::Index>(j)) = x[j];
            }
            ++st.accepted;
        }
        if (st.proposals % opts.proposals_before_check == 0 && st.acceptance_rate() < opts.min_acceptance_rate) {
            throw InfeasibleSelection("acceptance rate " + std::to_string(st.acceptance_rate()) + " after " +
                                      std::to_string(st.proposals) + " proposals is below the floor " +
                                      std::to_string(opts.min_acceptance_rate));
        }
    }
    if (stats) *stats = st;
    return out;
}

/// n unselected draws of (X, Y), with Y_i = beta_i' V_i + eps_i. Columns: X names then response names.
inline Dataset draw_joint(const LinearSem& sem, const SelectionConfig& config, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw InputError("sample size must be at least 1");
    detail::AncestralSampler sampler(sem, config);
    std::mt19937_64 rng(seed);
    const std::size_t p = sem.size();
    const std::size_t k = config.size();
    Dataset out{sem.labels(), Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + k))};
    for (std::size_t i = 0; i < k; ++i) out.labels.push_back(config.response_name(i));
    std::vector<double> x;
    for (std::size_t r = 0; r < n; ++r) {
        sampler.draw(rng, x);
        const auto row = static_cast<Eigen::Index>(r);
        for (std::size_t j = 0; j < p; ++j) out.values(row, static_cast<Eigen::Index>(j)) = x[j];
        for (std::size_t c = 0; c < k; ++c) {
            out.values(row, static_cast<Eigen::Index>(p + c)) = sampler.score(c, x) + config.conditions[c].noise.draw(rng);
        }
    }
    return out;
}

/// Unbiased sample covariance (divisor n - 1).
inline CovarianceMatrix sample_covariance(const Dataset& data) {
    const auto n = data.values.rows();
    if (n < 2) throw InputError("sample covariance needs at least two rows");
    const Eigen::RowVectorXd mean = data.values.colwise().mean();
    const Eigen::MatrixXd centered = data.values.rowwise() - mean;
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    return {data.labels, detail::symmetrized(cov), static_cast<std::size_t>(n)};
}

/// Monte Carlo estimate of the post-selection covariance of X.
inline CovarianceMatrix mc_post_selection_covariance(const LinearSem& sem, const SelectionConfig& config,
                                                     std::size_t n, std::uint64_t seed, const SampleOptions& opts = {}) {
    return sample_covariance(sample(sem, config, n, seed, opts));
}

}  // namespace rankcut
