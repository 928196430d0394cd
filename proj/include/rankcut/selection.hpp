#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rankcut/error.hpp"

namespace rankcut {

/// Distribution of the additive selection noise. The exponential, Laplace and uniform
/// kinds are the "custom" family: centred, and their selection probabilities go through
/// numerical quadrature rather than a closed-form CDF.
enum class NoiseKind { Constant, Gaussian, Logistic, Exponential, Laplace, Uniform };

inline std::string_view noise_kind_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::Constant: return "constant";
        case NoiseKind::Gaussian: return "gaussian";
        case NoiseKind::Logistic: return "logistic";
        case NoiseKind::Exponential: return "exponential";
        case NoiseKind::Laplace: return "laplace";
        case NoiseKind::Uniform: return "uniform";
    }
    return "constant";
}

inline NoiseKind parse_noise_kind(std::string_view s) {
    for (auto k : {NoiseKind::Constant, NoiseKind::Gaussian, NoiseKind::Logistic, NoiseKind::Exponential,
                   NoiseKind::Laplace, NoiseKind::Uniform}) {
        if (noise_kind_name(k) == s) return k;
    }
    throw ConfigError("unknown noise kind '" + std::string(s) + "'");
}

/// `param` meaning per kind: Constant -> offset, Gaussian -> variance, Logistic -> scale,
/// Exponential -> rate, Laplace -> scale, Uniform -> half-width.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::Constant;
    double param = 0.0;

    static NoiseSpec constant(double value = 0.0) { return {NoiseKind::Constant, value}; }
    static NoiseSpec gaussian(double variance) { return {NoiseKind::Gaussian, variance}; }
    static NoiseSpec logistic(double scale) { return {NoiseKind::Logistic, scale}; }
    static NoiseSpec exponential(double rate) { return {NoiseKind::Exponential, rate}; }
    static NoiseSpec laplace(double scale) { return {NoiseKind::Laplace, scale}; }
    static NoiseSpec uniform(double half_width) { return {NoiseKind::Uniform, half_width}; }

    [[nodiscard]] bool stochastic() const { return kind != NoiseKind::Constant; }
    [[nodiscard]] bool custom() const {
        return kind == NoiseKind::Exponential || kind == NoiseKind::Laplace || kind == NoiseKind::Uniform;
    }

    void validate() const {
        if (!std::isfinite(param)) throw ConfigError("noise parameter must be finite");
        if (stochastic() && param <= 0.0) {
            throw ConfigError(std::string(noise_kind_name(kind)) + " noise needs a positive parameter");
        }
    }

    [[nodiscard]] double variance() const {
        switch (kind) {
            case NoiseKind::Constant: return 0.0;
            case NoiseKind::Gaussian: return param;
            case NoiseKind::Logistic: return param * param * std::numbers::pi * std::numbers::pi / 3.0;
            case NoiseKind::Exponential: return 1.0 / (param * param);
            case NoiseKind::Laplace: return 2.0 * param * param;
            case NoiseKind::Uniform: return param * param / 3.0;
        }
        return 0.0;
    }

    [[nodiscard]] double pdf(double u) const {
        switch (kind) {
            case NoiseKind::Constant: return 0.0;
            case NoiseKind::Gaussian:
                return std::exp(-0.5 * u * u / param) / std::sqrt(2.0 * std::numbers::pi * param);
            case NoiseKind::Logistic: {
                const double e = std::exp(-std::abs(u) / param);
                return e / (param * (1.0 + e) * (1.0 + e));
            }
            case NoiseKind::Exponential: {
                const double x = u + 1.0 / param;
                return x < 0.0 ? 0.0 : param * std::exp(-param * x);
            }
            case NoiseKind::Laplace: return std::exp(-std::abs(u) / param) / (2.0 * param);
            case NoiseKind::Uniform: return std::abs(u) <= param ? 0.5 / param : 0.0;
        }
        return 0.0;
    }

    /// Largest value the density attains.
    [[nodiscard]] double pdf_max() const {
        switch (kind) {
            case NoiseKind::Constant: return 0.0;
            case NoiseKind::Gaussian: return 1.0 / std::sqrt(2.0 * std::numbers::pi * param);
            case NoiseKind::Logistic: return 0.25 / param;
            case NoiseKind::Exponential: return param;
            case NoiseKind::Laplace: return 0.5 / param;
            case NoiseKind::Uniform: return 0.5 / param;
        }
        return 0.0;
    }

    /// Interval of nonzero density (closure).
    [[nodiscard]] std::pair<double, double> support() const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (kind) {
            case NoiseKind::Exponential: return {-1.0 / param, inf};
            case NoiseKind::Uniform: return {-param, param};
            default: return {-inf, inf};
        }
    }

    /// P(lo < eps < hi). Closed form for Gaussian/logistic, adaptive quadrature otherwise.
    [[nodiscard]] double mass(double lo, double hi) const {
        if (!(lo < hi)) return 0.0;
        switch (kind) {
            case NoiseKind::Constant: return (lo < param && param < hi) ? 1.0 : 0.0;
            case NoiseKind::Gaussian: {
                const double s = std::sqrt(2.0 * param);
                // erfc keeps precision in both tails
                if (lo >= 0.0) return 0.5 * (std::erfc(lo / s) - std::erfc(hi / s));
                if (hi <= 0.0) return 0.5 * (std::erfc(-hi / s) - std::erfc(-lo / s));
                return 1.0 - 0.5 * std::erfc(hi / s) - 0.5 * std::erfc(-lo / s);
            }
            case NoiseKind::Logistic: {
                auto cdf = [&](double x) {
                    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
                    if (x == std::numeric_limits<double>::infinity()) return 1.0;
                    return 1.0 / (1.0 + std::exp(-x / param));
                };
                return cdf(hi) - cdf(lo);
            }
            default: {
                auto [slo, shi] = support();
                const double a = std::max(lo, slo);
                const double b = std::min(hi, shi);
                if (!(a < b)) return 0.0;
                auto density = [this](double u) { return pdf(u); };
                double err = 0.0;
                const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(density, a, b, 30,
                                                                                               1e-12, &err);
                return std::clamp(v, 0.0, 1.0);
            }
        }
    }

    template <class Rng>
    double draw(Rng& rng) const {
        switch (kind) {
            case NoiseKind::Constant: return param;
            case NoiseKind::Gaussian: return std::normal_distribution<double>(0.0, std::sqrt(param))(rng);
            case NoiseKind::Logistic: {
                const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                const double p = std::clamp(u, 1e-300, 1.0 - 1e-16);
                return param * std::log(p / (1.0 - p));
            }
            case NoiseKind::Exponential:
                return std::exponential_distribution<double>(param)(rng) - 1.0 / param;
            case NoiseKind::Laplace: {
                std::exponential_distribution<double> e(1.0 / param);
                const double first = e(rng);
                return first - e(rng);
            }
            case NoiseKind::Uniform: return std::uniform_real_distribution<double>(-param, param)(rng);
        }
        return 0.0;
    }
};

/// A proper subset of the real line made of intervals and isolated points.
class AdmissibleSet {
public:
    struct Interval {
        double lo;
        double hi;
        bool lo_closed = false;
        bool hi_closed = false;

        [[nodiscard]] bool contains(double y) const {
            return (y > lo || (lo_closed && y == lo)) && (y < hi || (hi_closed && y == hi));
        }
        friend bool operator==(const Interval&, const Interval&) = default;
    };

    AdmissibleSet() = default;
    AdmissibleSet(std::vector<Interval> intervals, std::vector<double> points)
        : intervals_(std::move(intervals)), points_(std::move(points)) {
        normalize();
    }

    static AdmissibleSet open_interval(double lo, double hi) { return AdmissibleSet({{lo, hi}}, {}); }
    static AdmissibleSet above(double lo) {
        return AdmissibleSet({{lo, std::numeric_limits<double>::infinity()}}, {});
    }
    static AdmissibleSet point(double v) { return AdmissibleSet({}, {v}); }

    [[nodiscard]] const std::vector<Interval>& intervals() const { return intervals_; }
    [[nodiscard]] const std::vector<double>& points() const { return points_; }
    [[nodiscard]] bool has_positive_measure() const { return !intervals_.empty(); }

    [[nodiscard]] bool contains(double y) const {
        for (const auto& iv : intervals_) {
            if (iv.contains(y)) return true;
        }
        return std::find(points_.begin(), points_.end(), y) != points_.end();
    }

    friend bool operator==(const AdmissibleSet&, const AdmissibleSet&) = default;

private:
    void normalize() {
        for (const auto& iv : intervals_) {
            if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo < iv.hi)) {
                throw ConfigError("admissible interval needs lo < hi");
            }
        }
        for (double p : points_) {
            if (!std::isfinite(p)) throw ConfigError("admissible point must be finite");
        }
        std::sort(intervals_.begin(), intervals_.end(),
                  [](const Interval& a, const Interval& b) {
                      return a.lo < b.lo || (a.lo == b.lo && a.lo_closed && !b.lo_closed);
                  });
        std::vector<Interval> merged;
        for (const auto& iv : intervals_) {
            if (!merged.empty()) {
                auto& last = merged.back();
                const bool touches = iv.lo < last.hi || (iv.lo == last.hi && (last.hi_closed || iv.lo_closed));
                if (touches) {
                    if (iv.hi > last.hi) {
                        last.hi = iv.hi;
                        last.hi_closed = iv.hi_closed;
                    } else if (iv.hi == last.hi) {
                        last.hi_closed = last.hi_closed || iv.hi_closed;
                    }
                    continue;
                }
            }
            merged.push_back(iv);
        }
        intervals_ = std::move(merged);
        std::sort(points_.begin(), points_.end());
        points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
        std::erase_if(points_, [this](double p) {
            return std::any_of(intervals_.begin(), intervals_.end(), [p](const Interval& iv) { return iv.contains(p); });
        });
        // A point sitting on an open endpoint closes it.
        std::vector<double> isolated;
        for (double p : points_) {
            bool glued = false;
            for (auto& iv : intervals_) {
                if (p == iv.lo) iv.lo_closed = glued = true;
                if (p == iv.hi) iv.hi_closed = glued = true;
            }
            if (!glued) isolated.push_back(p);
        }
        points_ = std::move(isolated);
        if (intervals_.empty() && points_.empty()) throw ConfigError("admissible set is empty");
        for (const auto& iv : intervals_) {
            if (iv.lo == -std::numeric_limits<double>::infinity() && iv.hi == std::numeric_limits<double>::infinity()) {
                throw ConfigError("admissible set must be a proper subset of the real line");
            }
        }
    }

    std::vector<Interval> intervals_;
    std::vector<double> points_;
};

/// One selection condition: response Y = coeffs' * targets + noise, kept iff Y is admissible.
struct SelectionCondition {
    std::string name;  // response node name; empty -> "Y<i>"
    std::vector<std::string> targets;
    std::vector<double> coeffs;
    NoiseSpec noise;
    AdmissibleSet admissible;

    void validate() const {
        if (targets.empty()) throw ConfigError("selection condition has no target variables");
        if (targets.size() != coeffs.size()) {
            throw ConfigError("selection condition has " + std::to_string(targets.size()) + " targets but " +
                              std::to_string(coeffs.size()) + " coefficients");
        }
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (!std::isfinite(coeffs[i]) || coeffs[i] == 0.0) {
                throw ConfigError("selection coefficient for '" + targets[i] + "' must be finite and nonzero");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (targets[j] == targets[i]) throw ConfigError("duplicate selection target '" + targets[i] + "'");
            }
        }
        noise.validate();
        if (!admissible.has_positive_measure() && !noise.stochastic()) {
            throw ConfigError("singleton admissible values with constant noise select a measure-zero event");
        }
    }

    [[nodiscard]] double linear_score(const std::vector<double>& values) const {
        if (values.size() != coeffs.size()) {
            throw InputError("expected " + std::to_string(coeffs.size()) + " target values, got " +
                             std::to_string(values.size()));
        }
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) s += coeffs[i] * values[i];
        return s;
    }
};

struct SelectionConfig {
    std::vector<SelectionCondition> conditions;

    [[nodiscard]] std::size_t size() const { return conditions.size(); }
    [[nodiscard]] bool empty() const { return conditions.empty(); }

    [[nodiscard]] std::string response_name(std::size_t i) const {
        const auto& n = conditions.at(i).name;
        return n.empty() ? "Y" + std::to_string(i + 1) : n;
    }
};

/// P(Y in admissible | targets = values): the noise mass over {u : u + beta'v admissible}.
/// Isolated points carry no mass under stochastic noise.
inline double selection_probability(const SelectionCondition& cond, const std::vector<double>& values) {
    const double s = cond.linear_score(values);
    if (!cond.noise.stochastic()) return cond.admissible.contains(s + cond.noise.param) ? 1.0 : 0.0;
    double p = 0.0;
    for (const auto& iv : cond.admissible.intervals()) p += cond.noise.mass(iv.lo - s, iv.hi - s);
    return std::clamp(p, 0.0, 1.0);
}

/// Acceptance probability used by rejection sampling. Equals selection_probability when the
/// admissible set has positive measure; for point-only sets under stochastic noise it is the
/// noise density at the points relative to its maximum, which targets X | Y = y exactly.
inline double selection_weight(const SelectionCondition& cond, const std::vector<double>& values) {
    if (cond.admissible.has_positive_measure() || !cond.noise.stochastic()) {
        return selection_probability(cond, values);
    }
    const double s = cond.linear_score(values);
    double w = 0.0;
    for (double y : cond.admissible.points()) w += cond.noise.pdf(y - s);
    return w / (cond.noise.pdf_max() * static_cast<double>(cond.admissible.points().size()));
}

}  // namespace rankcut
