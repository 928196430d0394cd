#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rankcut/augment.hpp"
#include "rankcut/dag.hpp"
#include "rankcut/error.hpp"
#include "rankcut/flow.hpp"
#include "rankcut/node_set.hpp"
#include "rankcut/selection.hpp"

namespace rankcut {

struct RankQuery {
    NodeSet a;
    NodeSet b;
};

/// `cut_size` is |cut_c| + |cut_d| before subtracting the selection count; `rank` is after.
struct RankResult {
    std::size_t rank = 0;
    NodeSet cut_c;
    NodeSet cut_d;
    std::size_t cut_size = 0;
    std::size_t selection_count = 0;
};

/// (c, d) t-separates (a, b) iff an_{g\c}(a\c) and an_{g\d}(b\d) share no node.
inline bool t_separates(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& c, const NodeSet& d) {
    for (const auto* s : {&a, &b, &c, &d}) g.check_indices(*s);
    const auto top = detail::ancestors_avoiding(g, set_difference(a, c), c.mask(g.size()));
    const auto bottom = detail::ancestors_avoiding(g, set_difference(b, d), d.mask(g.size()));
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (top[v] && bottom[v]) return false;
    }
    return true;
}

namespace detail {

inline std::size_t top_in(std::size_t v) { return 2 + 4 * v; }
inline std::size_t top_out(std::size_t v) { return 3 + 4 * v; }
inline std::size_t bottom_in(std::size_t v) { return 4 + 4 * v; }
inline std::size_t bottom_out(std::size_t v) { return 5 + 4 * v; }

inline void check_query(const Dag& g, const NodeSet& a, const NodeSet& b) {
    g.check_indices(a);
    g.check_indices(b);
    if (a.empty() || b.empty()) throw InputError("rank queries need nonempty node sets");
}

}  // namespace detail

/// Two copies of g joined at every node: treks climb the top copy (edges reversed) from a,
/// cross over at their top node and descend the bottom copy to b. Each copy of a node is
/// split into a unit-capacity in/out pair; every other arc is effectively unbounded.
inline FlowNetwork build_flow_network(const Dag& g, const NodeSet& a, const NodeSet& b) {
    detail::check_query(g, a, b);
    const std::size_t n = g.size();
    const auto big = static_cast<std::int64_t>(4 * n + 4);
    FlowNetwork net(2 + 4 * n, 0, 1);
    for (std::size_t v = 0; v < n; ++v) {
        net.add_arc(detail::top_in(v), detail::top_out(v), 1);
        net.add_arc(detail::bottom_in(v), detail::bottom_out(v), 1);
        net.add_arc(detail::top_out(v), detail::bottom_in(v), big);
    }
    for (const auto& e : g.edges()) {
        net.add_arc(detail::top_out(e.child), detail::top_in(e.parent), big);
        net.add_arc(detail::bottom_out(e.parent), detail::bottom_in(e.child), big);
    }
    for (auto v : a) net.add_arc(net.source(), detail::top_in(v), big);
    for (auto v : b) net.add_arc(detail::bottom_out(v), net.sink(), big);
    return net;
}

/// min |C| + |D| over pairs (C, D) that t-separate (a, b), with a witnessing pair read off
/// the residual graph of a maximum flow.
inline RankResult min_tsep(const Dag& g, const NodeSet& a, const NodeSet& b) {
    const auto flow = max_flow(build_flow_network(g, a, b));
    RankResult out;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (flow.source_side[detail::top_in(v)] && !flow.source_side[detail::top_out(v)]) out.cut_c.insert(v);
        if (flow.source_side[detail::bottom_in(v)] && !flow.source_side[detail::bottom_out(v)]) out.cut_d.insert(v);
    }
    out.cut_size = static_cast<std::size_t>(flow.value);
    out.rank = out.cut_size;
    return out;
}

namespace detail {

inline std::uint64_t ancestors_bits(const std::vector<std::uint64_t>& parent_bits, std::uint64_t start,
                                    std::uint64_t removed) {
    std::uint64_t seen = start & ~removed;
    std::uint64_t frontier = seen;
    while (frontier) {
        std::uint64_t next = 0;
        for (std::uint64_t f = frontier; f; f &= f - 1) next |= parent_bits[static_cast<std::size_t>(__builtin_ctzll(f))];
        next &= ~removed & ~seen;
        seen |= next;
        frontier = next;
    }
    return seen;
}

inline std::vector<std::size_t> bits_to_list(std::uint64_t m) {
    std::vector<std::size_t> out;
    for (; m; m &= m - 1) out.push_back(static_cast<std::size_t>(__builtin_ctzll(m)));
    return out;
}

/// Calls f(mask) for every size-k subset of {0..n-1}, in lexicographic order of the sorted index lists.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        std::uint64_t m = 0;
        for (auto i : idx) m |= std::uint64_t{1} << i;
        f(m);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace detail

/// Exhaustive search over (C, D) by increasing |C| + |D| up to max_size. Among minimal pairs
/// the lexicographically smallest (C, D) by sorted index lists is reported. If nothing within
/// the bound separates, the trivial bound min(|a|, |b|) is returned with witness (a, {}) or ({}, b).
inline RankResult min_tsep_bruteforce(const Dag& g, const NodeSet& a, const NodeSet& b, std::size_t max_size) {
    detail::check_query(g, a, b);
    const std::size_t n = g.size();
    if (n > 64) throw InputError("brute-force t-separation supports at most 64 nodes");
    std::vector<std::uint64_t> parent_bits(n, 0);
    for (const auto& e : g.edges()) parent_bits[e.child] |= std::uint64_t{1} << e.parent;
    std::uint64_t am = 0, bm = 0;
    for (auto v : a) am |= std::uint64_t{1} << v;
    for (auto v : b) bm |= std::uint64_t{1} << v;

    for (std::size_t s = 0; s <= max_size && s <= 2 * n; ++s) {
        bool found = false;
        std::pair<std::vector<std::size_t>, std::vector<std::size_t>> best;
        for (std::size_t i = 0; i <= s; ++i) {
            if (i > n || s - i > n) continue;
            detail::for_each_subset(n, i, [&](std::uint64_t cm) {
                detail::for_each_subset(n, s - i, [&](std::uint64_t dm) {
                    const auto top = detail::ancestors_bits(parent_bits, am & ~cm, cm);
                    const auto bottom = detail::ancestors_bits(parent_bits, bm & ~dm, dm);
                    if (top & bottom) return;
                    std::pair cand{detail::bits_to_list(cm), detail::bits_to_list(dm)};
                    if (!found || cand < best) best = std::move(cand);
                    found = true;
                });
            });
        }
        if (found) {
            RankResult out;
            out.cut_c = NodeSet(best.first);
            out.cut_d = NodeSet(best.second);
            out.cut_size = out.rank = s;
            return out;
        }
    }
    RankResult out;
    if (a.size() <= b.size()) {
        out.cut_c = a;
    } else {
        out.cut_d = b;
    }
    out.cut_size = out.rank = std::min(a.size(), b.size());
    return out;
}

/// Rank of the post-selection covariance block (a, b) predicted by the augmented graph:
/// min t-separation of (a + Y, b + Y) minus the number of selection responses.
inline RankResult graphical_rank(const AugmentedGraph& aug, const NodeSet& a, const NodeSet& b) {
    detail::check_query(aug.graph, a, b);
    for (const auto* s : {&a, &b}) {
        for (auto v : *s) {
            if (aug.is_response(v)) {
                throw InputError("rank query touches selection response '" + aug.graph.node(v).name + "'");
            }
        }
    }
    auto out = min_tsep(aug.graph, set_union(a, aug.responses), set_union(b, aug.responses));
    out.selection_count = aug.selection_count();
    out.rank = out.cut_size - out.selection_count;
    return out;
}

inline RankResult graphical_rank(const Dag& g, const SelectionConfig& config, const std::vector<std::string>& a,
                                 const std::vector<std::string>& b) {
    const auto aug = augment(g, config);
    return graphical_rank(aug, aug.graph.indices_of(a), aug.graph.indices_of(b));
}

}  // namespace rankcut
