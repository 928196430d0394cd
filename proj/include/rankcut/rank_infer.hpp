#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "rankcut/error.hpp"
#include "rankcut/sampling.hpp"

namespace rankcut {

enum class RankMethod { SingularValueThreshold, CanonicalCorrelationTest };

inline std::string_view rank_method_name(RankMethod m) {
    return m == RankMethod::SingularValueThreshold ? "svd" : "cca";
}

inline RankMethod parse_rank_method(std::string_view s) {
    if (s == "svd") return RankMethod::SingularValueThreshold;
    if (s == "cca") return RankMethod::CanonicalCorrelationTest;
    throw ConfigError("unknown rank method '" + std::string(s) + "' (expected cca or svd)");
}

struct RankTestSpec {
    RankMethod method = RankMethod::CanonicalCorrelationTest;
    double alpha = 0.05;
    double rel_tol = 0.05;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigError("rel_tol must lie in (0, 1)");
    }
};

/// Outcome of a rank estimate. For the canonical-correlation test, statistics[r] and
/// p_values[r] belong to H0: rank <= r, for r = 0 .. min(p, q) - 1.
struct RankDecision {
    std::size_t rank = 0;
    RankMethod method = RankMethod::CanonicalCorrelationTest;
    std::vector<double> statistics;
    std::vector<double> p_values;
    std::vector<double> canonical_correlations;
    std::vector<double> singular_values;
    std::string note;
};

inline std::vector<double> singular_values(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return {};
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

/// Count of singular values above rel_tol * max(sigma_1, reference_scale). A positive
/// reference scale lets an exactly zero block read as rank 0 rather than as noise.
inline std::size_t svd_rank(const Eigen::MatrixXd& m, double rel_tol, double reference_scale = 0.0) {
    if (!m.allFinite()) throw InputError("svd_rank needs finite entries");
    const auto sv = singular_values(m);
    if (sv.empty()) return 0;
    const double thresh = rel_tol * std::max(sv.front(), reference_scale);
    std::size_t r = 0;
    for (double s : sv) r += s > thresh ? 1 : 0;
    return r;
}

namespace detail {

/// Inverse square root of a symmetric PSD matrix; adds a ridge when the spectrum is ill-conditioned.
inline Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& s, bool& ridged) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    Eigen::VectorXd ev = eig.eigenvalues();
    const double top = std::max(ev.maxCoeff(), 0.0);
    if (top <= 0.0) throw NumericalError("within-set covariance is zero");
    if (ev.minCoeff() <= 1e-10 * top) {
        ridged = true;
        ev = ev.cwiseMax(0.0).array() + 1e-8 * top;
    }
    return eig.eigenvectors() * ev.cwiseInverse().cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

/// Sample canonical correlations between column sets a and b, descending.
inline std::vector<double> canonical_correlations(const CovarianceMatrix& cov, const std::vector<std::size_t>& a,
                                                  const std::vector<std::size_t>& b, bool* ridged = nullptr) {
    bool r = false;
    const Eigen::MatrixXd wa = detail::inverse_sqrt(cov.block(a, a), r);
    const Eigen::MatrixXd wb = detail::inverse_sqrt(cov.block(b, b), r);
    auto rho = singular_values(wa * cov.block(a, b) * wb);
    for (auto& x : rho) x = std::clamp(x, 0.0, 1.0 - 1e-15);
    if (ridged) *ridged = r;
    return rho;
}

namespace detail {

inline void check_columns(const CovarianceMatrix& cov, const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b) {
    if (a.empty() || b.empty()) throw InputError("rank queries need nonempty column sets");
    for (const auto* s : {&a, &b}) {
        for (auto i : *s) {
            if (i >= cov.size()) throw InputError("column index out of range");
        }
    }
}

inline bool overlapping(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    for (auto i : a) {
        if (std::find(b.begin(), b.end(), i) != b.end()) return true;
    }
    return false;
}

}  // namespace detail

/// Sequential Bartlett test on a sample covariance: for r = 0, 1, ... test H0: rank <= r with
///   -(n - (p + q + 3) / 2) * sum_{i > r} ln(1 - rho_i^2)  ~  chi2((p - r)(q - r))
/// and return the first r that is not rejected at level alpha.
inline RankDecision cca_rank(const CovarianceMatrix& cov, const std::vector<std::size_t>& a,
                             const std::vector<std::size_t>& b, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    detail::check_columns(cov, a, b);
    if (detail::overlapping(a, b)) {
        throw InputError("canonical-correlation rank test needs disjoint column sets; use svd_rank for overlapping sets");
    }
    if (!cov.sample_count) throw InputError("canonical-correlation rank test needs a sample covariance");
    const auto n = static_cast<double>(*cov.sample_count);
    const auto p = static_cast<double>(a.size());
    const auto q = static_cast<double>(b.size());
    if (!(n > p + q + 2)) {
        throw InputError("canonical-correlation rank test needs more than " + std::to_string(a.size() + b.size() + 2) +
                         " rows");
    }

    RankDecision out;
    out.method = RankMethod::CanonicalCorrelationTest;
    bool ridged = false;
    out.canonical_correlations = canonical_correlations(cov, a, b, &ridged);
    if (ridged) out.note = "ill-conditioned within-set covariance; ridge regularization applied";

    const auto& rho = out.canonical_correlations;
    const std::size_t m = rho.size();
    const double factor = n - (p + q + 3.0) / 2.0;
    out.rank = m;
    bool decided = false;
    for (std::size_t r = 0; r < m; ++r) {
        double sum = 0.0;
        for (std::size_t i = r; i < m; ++i) sum += std::log1p(-rho[i] * rho[i]);
        const double stat = -factor * sum;
        const double df = (p - static_cast<double>(r)) * (q - static_cast<double>(r));
        const double pv = boost::math::gamma_q(df / 2.0, std::max(stat, 0.0) / 2.0);
        out.statistics.push_back(stat);
        out.p_values.push_back(pv);
        if (!decided && pv >= alpha) {
            out.rank = r;
            decided = true;
        }
    }
    return out;
}

inline RankDecision cca_rank(const Dataset& data, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                             double alpha) {
    if (data.rows() < 2) throw InputError("canonical-correlation rank test needs data");
    return cca_rank(sample_covariance(data), a, b, alpha);
}

/// Routes to the requested method; overlapping column sets always use the singular-value
/// threshold on the covariance block.
inline RankDecision estimate_rank(const CovarianceMatrix& cov, const std::vector<std::size_t>& a,
                                  const std::vector<std::size_t>& b, const RankTestSpec& spec) {
    spec.validate();
    detail::check_columns(cov, a, b);
    const bool overlap = detail::overlapping(a, b);
    if (spec.method == RankMethod::CanonicalCorrelationTest && !overlap) return cca_rank(cov, a, b, spec.alpha);

    RankDecision out;
    out.method = RankMethod::SingularValueThreshold;
    const Eigen::MatrixXd block = cov.block(a, b);
    out.singular_values = singular_values(block);
    const double scale = std::sqrt(cov.block(a, a).diagonal().maxCoeff() * cov.block(b, b).diagonal().maxCoeff());
    out.rank = svd_rank(block, spec.rel_tol, scale);
    if (overlap && spec.method == RankMethod::CanonicalCorrelationTest) {
        out.note = "overlapping column sets; used singular-value threshold";
    }
    return out;
}

inline RankDecision estimate_rank(const Dataset& data, const std::vector<std::size_t>& a,
                                  const std::vector<std::size_t>& b, const RankTestSpec& spec) {
    return estimate_rank(sample_covariance(data), a, b, spec);
}

/// Rank of a block of an exact covariance matrix, thresholded relative to the diagonal scale.
inline std::size_t covariance_block_rank(const CovarianceMatrix& cov, const std::vector<std::size_t>& a,
                                         const std::vector<std::size_t>& b, double rel_tol) {
    const double scale = std::sqrt(cov.block(a, a).diagonal().maxCoeff() * cov.block(b, b).diagonal().maxCoeff());
    return svd_rank(cov.block(a, b), rel_tol, scale);
}

}  // namespace rankcut
