#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rankcut/augment.hpp"
#include "rankcut/dag.hpp"
#include "rankcut/error.hpp"
#include "rankcut/fci.hpp"
#include "rankcut/rank_infer.hpp"
#include "rankcut/sampling.hpp"

namespace rankcut {

/// Ordered map latent -> its observed measurements. Every latent needs at least two
/// measurements and no measurement may belong to two latents.
class MeasurementClustering {
public:
    struct Entry {
        std::string latent;
        std::vector<std::string> measurements;
    };

    MeasurementClustering() = default;
    explicit MeasurementClustering(std::vector<Entry> entries) : entries_(std::move(entries)) { validate(); }

    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
    [[nodiscard]] const Entry& operator[](std::size_t i) const { return entries_.at(i); }

    [[nodiscard]] std::vector<std::string> latents() const {
        std::vector<std::string> out;
        for (const auto& e : entries_) out.push_back(e.latent);
        return out;
    }

    [[nodiscard]] std::size_t index_of(const std::string& latent) const {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].latent == latent) return i;
        }
        throw InputError("clustering has no latent '" + latent + "'");
    }

    /// All measurements of the latents in s, in clustering order.
    [[nodiscard]] std::vector<std::string> measurements_of(const NodeSet& s) const {
        std::vector<std::string> out;
        for (auto i : s) {
            const auto& m = entries_.at(i).measurements;
            out.insert(out.end(), m.begin(), m.end());
        }
        return out;
    }

    /// Checks that each measurement is an observed node whose only parent is its latent
    /// (selection responses may hang below it).
    void validate_against(const Dag& g) const {
        for (const auto& e : entries_) {
            const auto l = g.find(e.latent);
            if (!l) throw ModelError("latent '" + e.latent + "' is not in the graph");
            for (const auto& m : e.measurements) {
                const auto x = g.find(m);
                if (!x) throw ModelError("measurement '" + m + "' is not in the graph");
                if (g.node(*x).role != NodeRole::Observed) throw ModelError("measurement '" + m + "' is not observed");
                if (g.parents(*x) != std::vector<std::size_t>{*l}) {
                    throw ModelError("measurement '" + m + "' must have '" + e.latent + "' as its only parent");
                }
                for (auto c : g.children(*x)) {
                    if (g.node(c).role != NodeRole::SelectionResponse) {
                        throw ModelError("measurement '" + m + "' must not cause other model variables");
                    }
                }
            }
        }
    }

private:
    void validate() const {
        std::vector<std::string> seen;
        for (const auto& e : entries_) {
            if (e.latent.empty()) throw ModelError("latent name must be nonempty");
            for (const auto& f : entries_) {
                if (&f != &e && f.latent == e.latent) throw ModelError("latent '" + e.latent + "' listed twice");
            }
            if (e.measurements.size() < 2) {
                throw ModelError("latent '" + e.latent + "' needs at least two measurements, has " +
                                 std::to_string(e.measurements.size()));
            }
            for (const auto& m : e.measurements) {
                if (std::find(seen.begin(), seen.end(), m) != seen.end()) {
                    throw ModelError("measurement '" + m + "' belongs to more than one latent");
                }
                seen.push_back(m);
            }
        }
    }

    std::vector<Entry> entries_;
};

/// Splits each latent's measurements in c into its first ceil(m/2) and the rest, so both
/// sides get at least |c| variables.
inline std::pair<std::vector<std::string>, std::vector<std::string>> partition_measurements(
    const MeasurementClustering& clustering, const NodeSet& c) {
    std::pair<std::vector<std::string>, std::vector<std::string>> out;
    for (auto i : c) {
        if (i >= clustering.size()) throw InputError("latent index out of range");
        const auto& m = clustering[i].measurements;
        if (m.size() < 2) throw ModelError("latent '" + clustering[i].latent + "' needs at least two measurements");
        const std::size_t half = (m.size() + 1) / 2;
        out.first.insert(out.first.end(), m.begin(), m.begin() + static_cast<long>(half));
        out.second.insert(out.second.end(), m.begin() + static_cast<long>(half), m.end());
    }
    return out;
}

/// Rank of the block (X_a + X_c^(1), X_b + X_c^(2)) of the given covariance.
inline RankDecision latent_rank(const CovarianceMatrix& cov, const MeasurementClustering& clustering,
                                const NodeSet& a, const NodeSet& b, const NodeSet& c, const RankTestSpec& spec) {
    if (!disjoint(a, b) || !disjoint(a, c) || !disjoint(b, c)) {
        throw InputError("latent CI query needs pairwise disjoint sets");
    }
    auto [c1, c2] = partition_measurements(clustering, c);
    auto rows = clustering.measurements_of(a);
    auto cols = clustering.measurements_of(b);
    rows.insert(rows.end(), c1.begin(), c1.end());
    cols.insert(cols.end(), c2.begin(), c2.end());
    return estimate_rank(cov, cov.indices_of(rows), cov.indices_of(cols), spec);
}

/// A and B independent given C iff the rank equals |C|. A smaller rank violates genericity;
/// it is noted and read as independence.
inline CiResult rank_ci_decision(const RankDecision& d, std::size_t c_size) {
    CiResult out;
    out.independent = d.rank <= c_size;
    if (c_size < d.p_values.size()) out.p_value = d.p_values[c_size];
    if (d.rank < c_size) {
        out.note = "estimated rank " + std::to_string(d.rank) + " below |C| = " + std::to_string(c_size) +
                   " (genericity violation), treated as independence";
    }
    return out;
}

/// Latent CI oracle over clustering positions, backed by a (sample or exact) covariance.
inline CiOracle rank_ci_oracle(CovarianceMatrix cov, MeasurementClustering clustering, RankTestSpec spec) {
    spec.validate();
    return [cov = std::move(cov), clustering = std::move(clustering), spec](const NodeSet& a, const NodeSet& b,
                                                                           const NodeSet& c) {
        return rank_ci_decision(latent_rank(cov, clustering, a, b, c, spec), c.size());
    };
}

inline bool rank_ci_oracle(const Dataset& data, const MeasurementClustering& clustering, const NodeSet& a,
                           const NodeSet& b, const NodeSet& c, const RankTestSpec& spec) {
    return rank_ci_decision(latent_rank(sample_covariance(data), clustering, a, b, c, spec), c.size()).independent;
}

/// Ground-truth oracle: d-separation in the augmented graph given c plus every response node.
/// Positions refer to `vars`, which are node indices of aug.graph.
inline CiOracle dsep_ci_oracle(const AugmentedGraph& aug, std::vector<std::size_t> vars) {
    for (auto v : vars) {
        if (v >= aug.graph.size()) throw InputError("oracle variable index out of range");
        if (aug.is_response(v)) throw InputError("oracle variables cannot be selection responses");
    }
    return [aug, vars = std::move(vars)](const NodeSet& a, const NodeSet& b, const NodeSet& c) {
        auto map = [&](const NodeSet& s) {
            NodeSet out;
            for (auto i : s) out.insert(vars.at(i));
            return out;
        };
        CiResult r;
        r.independent = d_separated(aug.graph, map(a), map(b), set_union(map(c), aug.responses));
        return r;
    };
}

/// Rank-oracle FCI over the latents of a clustering.
inline FciOutput discover_latent_pag(const CovarianceMatrix& cov, const MeasurementClustering& clustering,
                                     const RankTestSpec& spec, const FciOptions& opts = {}) {
    return fci_detailed(rank_ci_oracle(cov, clustering, spec), clustering.latents(), opts);
}

/// Ground-truth PAG over the named base nodes, from d-separation in the augmented graph.
inline FciOutput truth_pag(const AugmentedGraph& aug, const std::vector<std::string>& names,
                           const FciOptions& opts = {}) {
    std::vector<std::size_t> vars;
    for (const auto& n : names) vars.push_back(aug.graph.index_of(n));
    return fci_detailed(dsep_ci_oracle(aug, vars), names, opts);
}

}  // namespace rankcut
