#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "rankcut/augment.hpp"
#include "rankcut/error.hpp"
#include "rankcut/fci.hpp"
#include "rankcut/io.hpp"
#include "rankcut/latent.hpp"
#include "rankcut/pag.hpp"
#include "rankcut/rank_infer.hpp"
#include "rankcut/sampling.hpp"
#include "rankcut/sem.hpp"

namespace rankcut {

enum class PercentileMethod { Auto, Analytic, Empirical };

inline std::string_view percentile_method_name(PercentileMethod m) {
    switch (m) {
        case PercentileMethod::Auto: return "auto";
        case PercentileMethod::Analytic: return "analytic";
        case PercentileMethod::Empirical: return "empirical";
    }
    return "auto";
}

/// Synthetic experiment settings. Negative n_selections / selection_parents mean "derive
/// from n_latents" (n/5 and ceil(0.3 n)); sample_size 0 is a dry run.
struct ExperimentConfig {
    std::size_t n_latents = 5;
    double avg_degree = 2.0;
    std::size_t measurements_min = 2;
    std::size_t measurements_max = 3;
    double coeff_min = 0.5;
    double coeff_max = 2.0;
    int n_selections = -1;
    int selection_parents = -1;
    double percentile_lo = 40.0;
    double percentile_hi = 60.0;
    PercentileMethod percentile_method = PercentileMethod::Auto;
    std::size_t empirical_draws = 100000;
    NoiseSpec noise = NoiseSpec::gaussian(1.0);
    std::size_t sample_size = 10000;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    RankTestSpec rank = {};
    bool baseline = true;
    std::size_t max_retries = 10;
    double min_acceptance_rate = 1e-4;
    bool record_timing = false;

    [[nodiscard]] std::size_t selection_count() const {
        return n_selections >= 0 ? static_cast<std::size_t>(n_selections) : n_latents / 5;
    }

    [[nodiscard]] std::size_t mean_selection_parents() const {
        if (selection_parents > 0) return static_cast<std::size_t>(selection_parents);
        return static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(n_latents) - 1e-12));
    }

    void validate() const {
        if (n_latents < 1) throw ConfigError("n_latents must be positive");
        if (avg_degree < 0.0 || (n_latents > 1 && avg_degree > static_cast<double>(n_latents - 1))) {
            throw ConfigError("avg_degree must lie in [0, n_latents - 1]");
        }
        if (n_latents == 1 && avg_degree != 0.0) throw ConfigError("a single latent needs avg_degree 0");
        if (measurements_min < 2 || measurements_max < measurements_min) {
            throw ConfigError("measurement counts need 2 <= measurements_min <= measurements_max");
        }
        if (!(coeff_min > 0.0 && coeff_min < coeff_max)) throw ConfigError("coefficients need 0 < coeff_min < coeff_max");
        if (selection_parents == 0) throw ConfigError("selection_parents must be positive");
        if (!(0.0 < percentile_lo && percentile_lo < percentile_hi && percentile_hi < 100.0)) {
            throw ConfigError("percentile window must satisfy 0 < lo < hi < 100");
        }
        if (empirical_draws < 100) throw ConfigError("empirical_draws must be at least 100");
        noise.validate();
        if (percentile_method == PercentileMethod::Analytic && noise.kind != NoiseKind::Gaussian &&
            noise.kind != NoiseKind::Constant) {
            throw ConfigError("analytic percentiles need Gaussian or constant selection noise");
        }
        if (seeds.empty()) throw ConfigError("at least one seed is required");
        if (max_retries < 1) throw ConfigError("max_retries must be positive");
        rank.validate();
    }
};

inline Json config_to_json(const ExperimentConfig& c) {
    return {{"n_latents", c.n_latents},
            {"avg_degree", c.avg_degree},
            {"measurements_min", c.measurements_min},
            {"measurements_max", c.measurements_max},
            {"coeff_min", c.coeff_min},
            {"coeff_max", c.coeff_max},
            {"n_selections", c.selection_count()},
            {"selection_parents", c.mean_selection_parents()},
            {"percentile_lo", c.percentile_lo},
            {"percentile_hi", c.percentile_hi},
            {"percentile_method", std::string(percentile_method_name(c.percentile_method))},
            {"empirical_draws", c.empirical_draws},
            {"noise", {{"kind", std::string(noise_kind_name(c.noise.kind))}, {"param", c.noise.param}}},
            {"sample_size", c.sample_size},
            {"seeds", c.seeds},
            {"rank_method", std::string(rank_method_name(c.rank.method))},
            {"alpha", c.rank.alpha},
            {"rel_tol", c.rank.rel_tol},
            {"baseline", c.baseline},
            {"max_retries", c.max_retries},
            {"min_acceptance_rate", c.min_acceptance_rate},
            {"record_timing", c.record_timing}};
}

/// Reads a config JSON; absent keys keep their defaults, unknown keys are rejected.
inline ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source = "<config>") {
    detail::JsonDoc doc(text, source);
    const auto& root = doc.root();
    if (!root.is_object()) doc.fail("", "expected a JSON object");
    ExperimentConfig c;
    auto count = [&](const Json& v, const std::string& p) {
        if (!v.is_number_integer() || v.get<long long>() < 0) doc.fail(p, "expected a nonnegative integer");
        return static_cast<std::size_t>(v.get<long long>());
    };
    auto flag = [&](const Json& v, const std::string& p) {
        if (!v.is_boolean()) doc.fail(p, "expected true or false");
        return v.get<bool>();
    };
    for (auto it = root.begin(); it != root.end(); ++it) {
        const auto& k = it.key();
        const auto& v = it.value();
        const auto p = "/" + k;
        if (k == "n_latents") c.n_latents = count(v, p);
        else if (k == "avg_degree") c.avg_degree = doc.get_number(v, p);
        else if (k == "measurements_min") c.measurements_min = count(v, p);
        else if (k == "measurements_max") c.measurements_max = count(v, p);
        else if (k == "coeff_min") c.coeff_min = doc.get_number(v, p);
        else if (k == "coeff_max") c.coeff_max = doc.get_number(v, p);
        else if (k == "n_selections") c.n_selections = static_cast<int>(count(v, p));
        else if (k == "selection_parents") c.selection_parents = static_cast<int>(count(v, p));
        else if (k == "percentile_lo") c.percentile_lo = doc.get_number(v, p);
        else if (k == "percentile_hi") c.percentile_hi = doc.get_number(v, p);
        else if (k == "percentile_method") {
            const auto s = doc.get_string(v, p);
            if (s == "auto") c.percentile_method = PercentileMethod::Auto;
            else if (s == "analytic") c.percentile_method = PercentileMethod::Analytic;
            else if (s == "empirical") c.percentile_method = PercentileMethod::Empirical;
            else doc.fail(p, "percentile_method must be auto, analytic or empirical");
        } else if (k == "empirical_draws") c.empirical_draws = count(v, p);
        else if (k == "noise") {
            try {
                c.noise.kind = parse_noise_kind(doc.get_string(doc.need(v, p, "kind"), p + "/kind"));
            } catch (const ConfigError& e) {
                doc.fail(p + "/kind", e.what());
            }
            c.noise.param = doc.get_number(doc.need(v, p, "param"), p + "/param");
        } else if (k == "sample_size") c.sample_size = count(v, p);
        else if (k == "seeds") {
            c.seeds.clear();
            const auto& arr = doc.get_array(v, p);
            for (std::size_t i = 0; i < arr.size(); ++i) c.seeds.push_back(count(arr[i], p + "/" + std::to_string(i)));
        } else if (k == "rank_method") {
            try {
                c.rank.method = parse_rank_method(doc.get_string(v, p));
            } catch (const ConfigError& e) {
                doc.fail(p, e.what());
            }
        } else if (k == "alpha") c.rank.alpha = doc.get_number(v, p);
        else if (k == "rel_tol") c.rank.rel_tol = doc.get_number(v, p);
        else if (k == "baseline") c.baseline = flag(v, p);
        else if (k == "max_retries") c.max_retries = count(v, p);
        else if (k == "min_acceptance_rate") c.min_acceptance_rate = doc.get_number(v, p);
        else if (k == "record_timing") c.record_timing = flag(v, p);
        else doc.fail(p, "unknown config key '" + k + "'");
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return c;
}

// ---- metrics ----------------------------------------------------------------

namespace detail {

inline void check_same_labels(const Pag& a, const Pag& b) {
    if (a.labels() != b.labels()) throw InputError("PAG comparison needs identical labels in identical order");
}

}  // namespace detail

/// Number of ordered pairs (i, j), i != j, whose endpoint marks differ.
inline std::size_t edge_mark_diff(const Pag& a, const Pag& b) {
    detail::check_same_labels(a, b);
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) d += (i != j && a.mark(i, j) != b.mark(i, j)) ? 1 : 0;
    }
    return d;
}

/// Number of unordered pairs adjacent in exactly one of the two graphs.
inline std::size_t skeleton_shd(const Pag& a, const Pag& b) {
    detail::check_same_labels(a, b);
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) d += a.adjacent(i, j) != b.adjacent(i, j) ? 1 : 0;
    }
    return d;
}

// ---- random models ----------------------------------------------------------

struct GeneratedModel {
    Model model;
    Pag truth;
    std::size_t attempt = 0;
};

namespace detail {

inline std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t attempt, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(attempt), static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

inline double two_sided(std::mt19937_64& rng, double lo, double hi) {
    const double m = std::uniform_real_distribution<double>(lo, hi)(rng);
    return std::bernoulli_distribution(0.5)(rng) ? -m : m;
}

/// Linear-interpolation quantile of sorted data, q in [0, 1].
inline double quantile_sorted(const std::vector<double>& xs, double q) {
    const double h = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace detail

/// Erdos-Renyi latent DAG with pure measurements and percentile-window selections on latents.
/// The ground truth is FCI run on d-separation in the selection-augmented graph.
inline GeneratedModel random_model(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t attempt = 0) {
    cfg.validate();
    auto rng = detail::seeded(seed, attempt, 0);
    const std::size_t n = cfg.n_latents;

    DagBuilder b;
    std::vector<std::string> latents;
    for (std::size_t i = 1; i <= n; ++i) {
        latents.push_back("L" + std::to_string(i));
        b.node(latents.back(), NodeRole::Latent);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const double p = n > 1 ? cfg.avg_degree / static_cast<double>(n - 1) : 0.0;
    std::bernoulli_distribution coin(std::min(p, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (coin(rng)) b.edge(latents[order[i]], latents[order[j]], detail::two_sided(rng, cfg.coeff_min, cfg.coeff_max));
        }
    }
    std::vector<MeasurementClustering::Entry> entries;
    std::uniform_int_distribution<std::size_t> mcount(cfg.measurements_min, cfg.measurements_max);
    std::size_t next = 1;
    for (const auto& l : latents) {
        MeasurementClustering::Entry e{l, {}};
        const auto m = mcount(rng);
        for (std::size_t k = 0; k < m; ++k) {
            e.measurements.push_back("X" + std::to_string(next++));
            b.node(e.measurements.back()).edge(l, e.measurements.back(), detail::two_sided(rng, cfg.coeff_min, cfg.coeff_max));
        }
        entries.push_back(std::move(e));
    }
    LinearSem sem(b.build());

    SelectionConfig sel;
    const std::size_t mean_parents = cfg.mean_selection_parents();
    const std::size_t lo_par = std::max<std::size_t>(1, mean_parents > 1 ? mean_parents - 1 : 1);
    const std::size_t hi_par = std::min(n, mean_parents + 1);
    std::uniform_int_distribution<std::size_t> pcount(std::min(lo_par, hi_par), hi_par);
    for (std::size_t s = 0; s < cfg.selection_count(); ++s) {
        SelectionCondition c;
        c.name = "S" + std::to_string(s + 1);
        std::vector<std::size_t> pick(n);
        for (std::size_t i = 0; i < n; ++i) pick[i] = i;
        std::shuffle(pick.begin(), pick.end(), rng);
        pick.resize(pcount(rng));
        std::sort(pick.begin(), pick.end());
        for (auto i : pick) {
            c.targets.push_back(latents[i]);
            c.coeffs.push_back(detail::two_sided(rng, cfg.coeff_min, cfg.coeff_max));
        }
        c.noise = cfg.noise;
        c.admissible = AdmissibleSet::above(0.0);  // placeholder until the window is known
        sel.conditions.push_back(std::move(c));
    }

    // percentile windows of each response's pre-selection marginal
    const bool analytic = cfg.percentile_method == PercentileMethod::Analytic ||
                          (cfg.percentile_method == PercentileMethod::Auto &&
                           (cfg.noise.kind == NoiseKind::Gaussian || cfg.noise.kind == NoiseKind::Constant));
    if (!sel.empty()) {
        if (analytic) {
            const auto joint = joint_covariance_with_responses(sem, sel);
            const auto x = sem.size();
            for (std::size_t s = 0; s < sel.size(); ++s) {
                auto& c = sel.conditions[s];
                // joint covariance already includes the noise variance
                const double sd = std::sqrt(joint.values(static_cast<Eigen::Index>(x + s), static_cast<Eigen::Index>(x + s)));
                double mean = c.noise.kind == NoiseKind::Constant ? c.noise.param : 0.0;
                for (std::size_t t = 0; t < c.targets.size(); ++t) {
                    mean += c.coeffs[t] * sem.mu()(static_cast<Eigen::Index>(sem.graph().index_of(c.targets[t])));
                }
                boost::math::normal_distribution<double> dist(mean, sd);
                c.admissible = AdmissibleSet::open_interval(boost::math::quantile(dist, cfg.percentile_lo / 100.0),
                                                            boost::math::quantile(dist, cfg.percentile_hi / 100.0));
            }
        } else {
            const auto draws = draw_joint(sem, sel, cfg.empirical_draws, detail::seeded(seed, attempt, 1)());
            for (std::size_t s = 0; s < sel.size(); ++s) {
                const auto col = draws.values.col(static_cast<Eigen::Index>(sem.size() + s));
                std::vector<double> ys(col.data(), col.data() + col.size());
                std::sort(ys.begin(), ys.end());
                sel.conditions[s].admissible = AdmissibleSet::open_interval(
                    detail::quantile_sorted(ys, cfg.percentile_lo / 100.0), detail::quantile_sorted(ys, cfg.percentile_hi / 100.0));
            }
        }
    }

    MeasurementClustering clustering(std::move(entries));
    auto truth = truth_pag(augment(sem.graph(), sel), latents).pag;
    return {{std::move(sem), std::move(sel), std::move(clustering)}, std::move(truth), attempt};
}

// ---- baseline ---------------------------------------------------------------

/// Fisher-z partial-correlation CI oracle over the given covariance columns.
inline CiOracle partial_correlation_oracle(CovarianceMatrix cov, std::vector<std::size_t> columns, double alpha) {
    if (!cov.sample_count) throw InputError("partial-correlation oracle needs a sample covariance");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    return [cov = std::move(cov), columns = std::move(columns), alpha](const NodeSet& a, const NodeSet& b,
                                                                      const NodeSet& c) {
        if (a.size() != 1 || b.size() != 1) throw InputError("partial-correlation oracle handles single variables");
        std::vector<std::size_t> idx{columns.at(a[0]), columns.at(b[0])};
        for (auto k : c) idx.push_back(columns.at(k));
        const Eigen::MatrixXd sub = cov.block(idx, idx);
        const Eigen::MatrixXd prec = sub.completeOrthogonalDecomposition().pseudoInverse();
        double r = -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
        r = std::clamp(r, -1.0 + 1e-15, 1.0 - 1e-15);
        const double dof = static_cast<double>(*cov.sample_count) - static_cast<double>(c.size()) - 3.0;
        if (dof <= 0.0) throw InputError("too few samples for the partial-correlation test");
        const double z = std::sqrt(dof) * std::atanh(r);
        CiResult out;
        out.p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
        out.independent = *out.p_value >= alpha;
        return out;
    };
}

/// FCI on one randomly chosen measurement per latent; the PAG is labelled by latent names.
inline Pag representative_baseline(CovarianceMatrix cov, const MeasurementClustering& clustering, double alpha,
                                   std::uint64_t seed, const FciOptions& opts = {}) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> columns;
    for (const auto& e : clustering.entries()) {
        std::uniform_int_distribution<std::size_t> pick(0, e.measurements.size() - 1);
        columns.push_back(cov.index_of(e.measurements[pick(rng)]));
    }
    return fci(partial_correlation_oracle(std::move(cov), std::move(columns), alpha), clustering.latents(), opts);
}

inline Pag representative_baseline(const Dataset& data, const MeasurementClustering& clustering, double alpha,
                                   std::uint64_t seed, const FciOptions& opts = {}) {
    return representative_baseline(sample_covariance(data), clustering, alpha, seed, opts);
}

// ---- experiment -------------------------------------------------------------

struct MethodResult {
    std::string method;
    Pag pag;
    std::size_t edge_mark_diff = 0;
    std::size_t skeleton_shd = 0;
    std::size_t n_accepted_samples = 0;
    double wall_time_ms = 0.0;
};

struct SeedResult {
    std::uint64_t seed = 0;
    std::size_t attempts = 0;
    std::optional<GeneratedModel> generated;
    std::size_t proposals = 0;
    std::vector<MethodResult> methods;
    std::vector<std::string> notes;
    std::string error;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<SeedResult> seeds;

    [[nodiscard]] bool dry_run() const { return config.sample_size == 0; }
};

inline constexpr const char* kRankMethodLabel = "rank_fci";
inline constexpr const char* kBaselineLabel = "representative_fci";

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point t0, bool record) {
    if (!record) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    SeedResult out;
    out.seed = seed;
    try {
        for (std::size_t attempt = 0; attempt < cfg.max_retries; ++attempt) {
            out.attempts = attempt + 1;
            const auto t0 = std::chrono::steady_clock::now();
            auto gen = random_model(cfg, seed, attempt);
            if (cfg.sample_size == 0) {
                out.generated = std::move(gen);
                return out;
            }
            SampleOptions opts;
            opts.min_acceptance_rate = cfg.min_acceptance_rate;
            SampleStats stats;
            Dataset data;
            try {
                data = sample(gen.model.sem, gen.model.selection, cfg.sample_size, seeded(seed, attempt, 2)(), opts, &stats);
            } catch (const InfeasibleSelection& e) {
                out.notes.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
                continue;
            }
            const double sample_ms = elapsed_ms(t0, cfg.record_timing);
            out.proposals = stats.proposals;

            const auto t1 = std::chrono::steady_clock::now();
            const auto found = discover_latent_pag(sample_covariance(data), *gen.model.clustering, cfg.rank);
            for (const auto& n : found.notes) out.notes.push_back(n);
            out.methods.push_back({kRankMethodLabel, found.pag, edge_mark_diff(found.pag, gen.truth),
                                   skeleton_shd(found.pag, gen.truth), cfg.sample_size,
                                   cfg.record_timing ? sample_ms + elapsed_ms(t1, true) : 0.0});
            if (cfg.baseline) {
                const auto t2 = std::chrono::steady_clock::now();
                auto base = representative_baseline(data, *gen.model.clustering, cfg.rank.alpha, seeded(seed, attempt, 3)());
                out.methods.push_back({kBaselineLabel, base, edge_mark_diff(base, gen.truth), skeleton_shd(base, gen.truth),
                                       cfg.sample_size, cfg.record_timing ? sample_ms + elapsed_ms(t2, true) : 0.0});
            }
            out.generated = std::move(gen);
            return out;
        }
        out.error = "selection infeasible after " + std::to_string(cfg.max_retries) + " attempts";
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentReport rep{cfg, {}};
    auto seeds = cfg.seeds;
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    for (auto s : seeds) rep.seeds.push_back(detail::run_seed(cfg, s));
    return rep;
}

struct MetricSummary {
    std::size_t runs = 0;
    double mean_edge_mark_diff = 0.0;
    double sd_edge_mark_diff = 0.0;
    double mean_skeleton_shd = 0.0;
    double sd_skeleton_shd = 0.0;
};

/// Mean and sample standard deviation over the seeds that produced this method.
inline MetricSummary summarize(const ExperimentReport& rep, const std::string& method) {
    std::vector<double> emd, shd;
    for (const auto& s : rep.seeds) {
        for (const auto& m : s.methods) {
            if (m.method == method) {
                emd.push_back(static_cast<double>(m.edge_mark_diff));
                shd.push_back(static_cast<double>(m.skeleton_shd));
            }
        }
    }
    auto mean_sd = [](const std::vector<double>& v) -> std::pair<double, double> {
        if (v.empty()) return {0.0, 0.0};
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        if (v.size() < 2) return {m, 0.0};
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return {m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
    };
    MetricSummary out;
    out.runs = emd.size();
    std::tie(out.mean_edge_mark_diff, out.sd_edge_mark_diff) = mean_sd(emd);
    std::tie(out.mean_skeleton_shd, out.sd_skeleton_shd) = mean_sd(shd);
    return out;
}

inline Json report_to_json(const ExperimentReport& rep) {
    Json seeds = Json::array();
    for (const auto& s : rep.seeds) {
        Json j = {{"seed", s.seed}, {"attempts", s.attempts}};
        if (s.generated) {
            j["model"] = model_to_json(s.generated->model);
            j["truth"] = pag_to_json(s.generated->truth);
        }
        if (!rep.dry_run()) {
            j["proposals"] = s.proposals;
            Json methods = Json::array();
            for (const auto& m : s.methods) {
                methods.push_back({{"method", m.method},
                                   {"pag", pag_to_json(m.pag)},
                                   {"edge_mark_diff", m.edge_mark_diff},
                                   {"skeleton_shd", m.skeleton_shd},
                                   {"n_accepted_samples", m.n_accepted_samples},
                                   {"wall_time_ms", m.wall_time_ms}});
            }
            j["methods"] = methods;
        }
        if (!s.notes.empty()) j["notes"] = s.notes;
        if (!s.error.empty()) j["error"] = s.error;
        seeds.push_back(std::move(j));
    }
    Json summary = Json::object();
    if (!rep.dry_run()) {
        std::vector<std::string> methods{kRankMethodLabel};
        if (rep.config.baseline) methods.emplace_back(kBaselineLabel);
        for (const auto& m : methods) {
            const auto s = summarize(rep, m);
            summary[m] = {{"runs", s.runs},
                          {"edge_mark_diff", {{"mean", s.mean_edge_mark_diff}, {"sd", s.sd_edge_mark_diff}}},
                          {"skeleton_shd", {{"mean", s.mean_skeleton_shd}, {"sd", s.sd_skeleton_shd}}}};
        }
    }
    return {{"config", config_to_json(rep.config)}, {"dry_run", rep.dry_run()}, {"seeds", seeds}, {"summary", summary}};
}

/// One row per (seed, method); failed seeds get an "error" row.
inline std::string report_to_csv(const ExperimentReport& rep) {
    std::string out = "seed,method,edge_mark_diff,skeleton_shd,n_accepted_samples,wall_time_ms\n";
    for (const auto& s : rep.seeds) {
        for (const auto& m : s.methods) {
            out += std::to_string(s.seed) + "," + m.method + "," + std::to_string(m.edge_mark_diff) + "," +
                   std::to_string(m.skeleton_shd) + "," + std::to_string(m.n_accepted_samples) + "," +
                   format_double(m.wall_time_ms) + "\n";
        }
        if (!s.error.empty()) out += std::to_string(s.seed) + ",error,,,0,0\n";
    }
    return out;
}

/// Writes report.json and summary.csv into dir (created if needed).
inline void write_report(const ExperimentReport& rep, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create '" + dir + "': " + ec.message());
    write_text_file((std::filesystem::path(dir) / "report.json").string(), report_to_json(rep).dump(2) + "\n");
    write_text_file((std::filesystem::path(dir) / "summary.csv").string(), report_to_csv(rep));
}

}  // namespace rankcut
