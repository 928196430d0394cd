#pragma once

#include <algorithm>
#include <deque>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rankcut/error.hpp"
#include "rankcut/node_set.hpp"
#include "rankcut/pag.hpp"

namespace rankcut {

struct CiResult {
    bool independent = false;
    std::optional<double> p_value;
    std::string note;
};

/// CI oracle over variable positions: (a, b, c) -> is a independent of b given c.
using CiOracle = std::function<CiResult(const NodeSet&, const NodeSet&, const NodeSet&)>;

struct FciOptions {
    int max_cond_size = -1;  // -1: unbounded
    bool use_possible_dsep = true;
};

struct FciOutput {
    Pag pag;
    std::vector<std::optional<NodeSet>> sepsets;  // n * n, row-major
    std::size_t tests = 0;
    std::vector<std::string> notes;

    [[nodiscard]] const std::optional<NodeSet>& sepset(std::size_t i, std::size_t j) const {
        return sepsets[i * pag.size() + j];
    }
};

namespace detail {

/// Calls f on every size-k subset of items (lexicographic by position) until f returns true.
template <class F>
bool any_combination(const std::vector<std::size_t>& items, std::size_t k, F&& f) {
    const std::size_t n = items.size();
    if (k > n) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        NodeSet s;
        for (auto i : idx) s.insert(items[i]);
        if (f(s)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

class FciRunner {
public:
    FciRunner(const CiOracle& oracle, std::vector<std::string> vars, const FciOptions& opts)
        : oracle_(oracle), opts_(opts), n_(vars.size()) {
        out_.pag = Pag(std::move(vars));
        out_.sepsets.assign(n_ * n_, std::nullopt);
    }

    FciOutput run() {
        auto& g = out_.pag;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) g.add_edge(i, j, Mark::Circle, Mark::Circle);
        }
        skeleton();
        orient_unshielded_colliders();
        if (opts_.use_possible_dsep) {
            possible_dsep_phase();
            reset_to_circles();
            orient_unshielded_colliders();
        }
        for (bool changed = true; changed;) changed = apply_rules(false);
        for (bool changed = true; changed;) changed = apply_rules(true);
        g.validate();
        return std::move(out_);
    }

private:
    Pag& g() { return out_.pag; }
    [[nodiscard]] Mark m(std::size_t i, std::size_t j) const { return out_.pag.mark(i, j); }
    [[nodiscard]] bool adj(std::size_t i, std::size_t j) const { return out_.pag.adjacent(i, j); }

    [[nodiscard]] bool depth_allowed(std::size_t d) const {
        return opts_.max_cond_size < 0 || d <= static_cast<std::size_t>(opts_.max_cond_size);
    }

    std::string describe(std::size_t x, std::size_t y, const NodeSet& s) const {
        const auto& l = out_.pag.labels();
        std::string q = l[x] + " _||_ " + l[y] + " | {";
        for (std::size_t i = 0; i < s.size(); ++i) q += (i ? "," : "") + l[s[i]];
        return q + "}";
    }

    bool independent(std::size_t x, std::size_t y, const NodeSet& s) {
        CiResult r;
        try {
            r = oracle_(NodeSet{x}, NodeSet{y}, s);
        } catch (const std::exception& e) {
            throw OracleError("CI oracle failed on " + describe(x, y, s) + ": " + e.what());
        }
        ++out_.tests;
        if (!r.note.empty()) out_.notes.push_back(describe(x, y, s) + ": " + r.note);
        return r.independent;
    }

    void separate(std::size_t x, std::size_t y, const NodeSet& s) {
        g().remove_edge(x, y);
        out_.sepsets[x * n_ + y] = s;
        out_.sepsets[y * n_ + x] = s;
    }

    // Adjacency snapshots per depth keep the result independent of the visiting order.
    void skeleton() {
        for (std::size_t d = 0; depth_allowed(d); ++d) {
            std::vector<std::vector<std::size_t>> snap(n_);
            for (std::size_t x = 0; x < n_; ++x) snap[x] = out_.pag.neighbours(x);
            bool any = false;
            for (std::size_t x = 0; x < n_; ++x) {
                for (auto y : snap[x]) {
                    if (!adj(x, y)) continue;
                    std::vector<std::size_t> cand;
                    for (auto v : snap[x]) {
                        if (v != y) cand.push_back(v);
                    }
                    if (cand.size() < d) continue;
                    any = true;
                    any_combination(cand, d, [&](const NodeSet& s) {
                        if (!independent(x, y, s)) return false;
                        separate(x, y, s);
                        return true;
                    });
                }
            }
            if (!any) break;
        }
    }

    void orient_unshielded_colliders() {
        for (std::size_t z = 0; z < n_; ++z) {
            const auto nb = out_.pag.neighbours(z);
            for (std::size_t i = 0; i < nb.size(); ++i) {
                for (std::size_t j = i + 1; j < nb.size(); ++j) {
                    const auto x = nb[i], y = nb[j];
                    if (adj(x, y)) continue;
                    const auto& s = out_.sepsets[x * n_ + y];
                    if (s && !s->contains(z)) {
                        g().set(x, z, Mark::Arrow);
                        g().set(y, z, Mark::Arrow);
                    }
                }
            }
        }
    }

    /// Nodes reachable from x along paths on which every interior node is a collider or
    /// sits in a triangle with its path neighbours.
    std::vector<std::size_t> possible_dsep(std::size_t x) const {
        std::vector<bool> in(n_, false), seen(n_ * n_, false);
        std::deque<std::pair<std::size_t, std::size_t>> queue;
        for (auto v : out_.pag.neighbours(x)) {
            in[v] = true;
            seen[x * n_ + v] = true;
            queue.emplace_back(x, v);
        }
        while (!queue.empty()) {
            auto [u, v] = queue.front();
            queue.pop_front();
            for (auto w : out_.pag.neighbours(v)) {
                if (w == u || w == x) continue;
                const bool collider = m(u, v) == Mark::Arrow && m(w, v) == Mark::Arrow;
                if (!(collider || adj(u, w))) continue;
                if (seen[v * n_ + w]) continue;
                seen[v * n_ + w] = true;
                in[w] = true;
                queue.emplace_back(v, w);
            }
        }
        std::vector<std::size_t> out;
        for (std::size_t v = 0; v < n_; ++v) {
            if (in[v] && v != x) out.push_back(v);
        }
        return out;
    }

    void possible_dsep_phase() {
        std::vector<std::vector<std::size_t>> pds(n_);
        for (std::size_t x = 0; x < n_; ++x) pds[x] = possible_dsep(x);
        for (std::size_t x = 0; x < n_; ++x) {
            for (std::size_t y = 0; y < n_; ++y) {
                if (x == y || !adj(x, y)) continue;
                std::vector<std::size_t> cand;
                for (auto v : pds[x]) {
                    if (v != y) cand.push_back(v);
                }
                const auto nb = out_.pag.neighbours(x);
                for (std::size_t d = 1; d <= cand.size() && depth_allowed(d) && adj(x, y); ++d) {
                    any_combination(cand, d, [&](const NodeSet& s) {
                        // subsets of the current adjacency were already tested in the skeleton phase
                        bool inside = true;
                        for (auto v : s) inside = inside && std::find(nb.begin(), nb.end(), v) != nb.end();
                        if (inside) return false;
                        if (!independent(x, y, s)) return false;
                        separate(x, y, s);
                        return true;
                    });
                }
            }
        }
    }

    void reset_to_circles() {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                if (adj(i, j)) g().set(i, j, Mark::Circle);
            }
        }
    }

    [[nodiscard]] bool is_parent(std::size_t a, std::size_t b) const {
        return m(a, b) == Mark::Arrow && m(b, a) == Mark::Tail;
    }
    // edge a -- b could be oriented a -> b
    [[nodiscard]] bool potentially_directed(std::size_t a, std::size_t b) const {
        return adj(a, b) && m(a, b) != Mark::Tail && m(b, a) != Mark::Arrow;
    }
    [[nodiscard]] bool circle_circle(std::size_t a, std::size_t b) const {
        return m(a, b) == Mark::Circle && m(b, a) == Mark::Circle;
    }

    bool apply_rules(bool with_selection_rules) {
        bool changed = false;
        changed = rule1() || changed;
        changed = rule2() || changed;
        changed = rule3() || changed;
        changed = rule4() || changed;
        if (with_selection_rules) {
            changed = rule5() || changed;
            changed = rule6() || changed;
            changed = rule7() || changed;
            changed = rule8() || changed;
            changed = rule9() || changed;
            changed = rule10() || changed;
        }
        return changed;
    }

    // a *-> b o-* c, a and c not adjacent  =>  b -> c
    bool rule1() {
        bool changed = false;
        for (std::size_t b = 0; b < n_; ++b) {
            for (std::size_t a = 0; a < n_; ++a) {
                if (!adj(a, b) || m(a, b) != Mark::Arrow) continue;
                for (std::size_t c = 0; c < n_; ++c) {
                    if (c == a || !adj(b, c) || adj(a, c) || m(c, b) != Mark::Circle) continue;
                    g().set(c, b, Mark::Tail);
                    g().set(b, c, Mark::Arrow);
                    changed = true;
                }
            }
        }
        return changed;
    }

    // a -> b *-> c or a *-> b -> c, with a *-o c  =>  a *-> c
    bool rule2() {
        bool changed = false;
        for (std::size_t a = 0; a < n_; ++a) {
            for (std::size_t c = 0; c < n_; ++c) {
                if (!adj(a, c) || m(a, c) != Mark::Circle) continue;
                for (std::size_t b = 0; b < n_; ++b) {
                    if (b == a || b == c || !adj(a, b) || !adj(b, c)) continue;
                    const bool first = is_parent(a, b) && m(b, c) == Mark::Arrow;
                    const bool second = m(a, b) == Mark::Arrow && is_parent(b, c);
                    if (first || second) {
                        g().set(a, c, Mark::Arrow);
                        changed = true;
                        break;
                    }
                }
            }
        }
        return changed;
    }

    // a *-> b <-* c, a *-o t o-* c, a and c not adjacent, t *-o b  =>  t *-> b
    bool rule3() {
        bool changed = false;
        for (std::size_t b = 0; b < n_; ++b) {
            for (std::size_t t = 0; t < n_; ++t) {
                if (t == b || !adj(t, b) || m(t, b) != Mark::Circle) continue;
                bool fire = false;
                for (std::size_t a = 0; a < n_ && !fire; ++a) {
                    if (a == t || a == b || !adj(a, b) || m(a, b) != Mark::Arrow) continue;
                    if (!adj(a, t) || m(a, t) != Mark::Circle) continue;
                    for (std::size_t c = a + 1; c < n_ && !fire; ++c) {
                        if (c == t || c == b || adj(a, c)) continue;
                        if (!adj(c, b) || m(c, b) != Mark::Arrow) continue;
                        if (!adj(c, t) || m(c, t) != Mark::Circle) continue;
                        fire = true;
                    }
                }
                if (fire) {
                    g().set(t, b, Mark::Arrow);
                    changed = true;
                }
            }
        }
        return changed;
    }

    /// Start of a discriminating path <theta, ..., a, b, c> for b, or nullopt.
    std::optional<std::size_t> discriminating_start(std::size_t a, std::size_t b, std::size_t c) const {
        std::vector<bool> visited(n_, false);
        visited[a] = visited[b] = visited[c] = true;
        std::deque<std::size_t> queue{a};
        while (!queue.empty()) {
            const auto w = queue.front();
            queue.pop_front();
            for (std::size_t v = 0; v < n_; ++v) {
                if (visited[v] || !adj(v, w) || m(v, w) != Mark::Arrow) continue;
                if (!adj(v, c)) return v;
                if (is_parent(v, c) && m(w, v) == Mark::Arrow) {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
        return std::nullopt;
    }

    // discriminating path <theta, ..., a, b, c> with b o-* c
    bool rule4() {
        bool changed = false;
        for (std::size_t c = 0; c < n_; ++c) {
            for (std::size_t b = 0; b < n_; ++b) {
                if (b == c || !adj(b, c) || m(c, b) != Mark::Circle) continue;
                for (std::size_t a = 0; a < n_; ++a) {
                    if (a == b || a == c || !adj(a, b) || !is_parent(a, c) || m(b, a) != Mark::Arrow) continue;
                    const auto theta = discriminating_start(a, b, c);
                    if (!theta) continue;
                    const auto& s = out_.sepsets[*theta * n_ + c];
                    if (s && s->contains(b)) {
                        g().set(c, b, Mark::Tail);
                        g().set(b, c, Mark::Arrow);
                    } else {
                        g().set(a, b, Mark::Arrow);
                        g().set(b, a, Mark::Arrow);
                        g().set(b, c, Mark::Arrow);
                        g().set(c, b, Mark::Arrow);
                    }
                    changed = true;
                    break;
                }
            }
        }
        return changed;
    }

    /// Uncovered circle path a, first, ..., last, b closing an uncovered circle cycle with a o-o b.
    bool circle_cycle(std::size_t a, std::size_t b, std::vector<std::size_t>& path) const {
        const auto cur = path.back();
        const auto prev = path[path.size() - 2];
        for (std::size_t w = 0; w < n_; ++w) {
            if (w == a || w == b || !circle_circle(cur, w) || adj(prev, w)) continue;
            if (std::find(path.begin(), path.end(), w) != path.end()) continue;
            path.push_back(w);
            if (circle_circle(w, b) && !adj(cur, b) && !adj(w, a)) return true;
            if (circle_cycle(a, b, path)) return true;
            path.pop_back();
        }
        return false;
    }

    // a o-o b on an uncovered circle cycle  =>  every edge of the cycle becomes tail-tail
    bool rule5() {
        bool changed = false;
        for (std::size_t a = 0; a < n_; ++a) {
            for (std::size_t b = a + 1; b < n_; ++b) {
                if (!adj(a, b) || !circle_circle(a, b)) continue;
                for (std::size_t first = 0; first < n_; ++first) {
                    if (first == b || !circle_circle(a, first) || adj(first, b)) continue;
                    std::vector<std::size_t> path{a, first};
                    if (!circle_cycle(a, b, path)) continue;
                    path.push_back(b);
                    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                        g().set(path[i], path[i + 1], Mark::Tail);
                        g().set(path[i + 1], path[i], Mark::Tail);
                    }
                    g().set(a, b, Mark::Tail);
                    g().set(b, a, Mark::Tail);
                    changed = true;
                    break;
                }
            }
        }
        return changed;
    }

    // a --- b o-* c  =>  b --* c
    bool rule6() {
        bool changed = false;
        for (std::size_t b = 0; b < n_; ++b) {
            for (std::size_t a = 0; a < n_; ++a) {
                if (!adj(a, b) || m(a, b) != Mark::Tail || m(b, a) != Mark::Tail) continue;
                for (std::size_t c = 0; c < n_; ++c) {
                    if (c == a || !adj(b, c) || m(c, b) != Mark::Circle) continue;
                    g().set(c, b, Mark::Tail);
                    changed = true;
                }
            }
        }
        return changed;
    }

    // a -o b o-* c, a and c not adjacent  =>  b --* c
    bool rule7() {
        bool changed = false;
        for (std::size_t b = 0; b < n_; ++b) {
            for (std::size_t a = 0; a < n_; ++a) {
                if (!adj(a, b) || m(b, a) != Mark::Tail || m(a, b) != Mark::Circle) continue;
                for (std::size_t c = 0; c < n_; ++c) {
                    if (c == a || !adj(b, c) || adj(a, c) || m(c, b) != Mark::Circle) continue;
                    g().set(c, b, Mark::Tail);
                    changed = true;
                }
            }
        }
        return changed;
    }

    // a -> b -> c or a -o b -> c, with a o-> c  =>  a -> c
    bool rule8() {
        bool changed = false;
        for (std::size_t a = 0; a < n_; ++a) {
            for (std::size_t c = 0; c < n_; ++c) {
                if (!adj(a, c) || m(a, c) != Mark::Arrow || m(c, a) != Mark::Circle) continue;
                for (std::size_t b = 0; b < n_; ++b) {
                    if (b == a || b == c || !adj(a, b) || !is_parent(b, c)) continue;
                    const bool tail_at_a = m(b, a) == Mark::Tail;
                    if (tail_at_a && (m(a, b) == Mark::Arrow || m(a, b) == Mark::Circle)) {
                        g().set(c, a, Mark::Tail);
                        changed = true;
                        break;
                    }
                }
            }
        }
        return changed;
    }

    /// Is there an uncovered potentially directed path prev, cur, ..., target (cur already on `on`)?
    bool updp(std::size_t prev, std::size_t cur, std::size_t target, std::vector<bool>& on) const {
        for (std::size_t w = 0; w < n_; ++w) {
            if (on[w] || !potentially_directed(cur, w) || adj(prev, w)) continue;
            if (w == target) return true;
            on[w] = true;
            const bool found = updp(cur, w, target, on);
            on[w] = false;
            if (found) return true;
        }
        return false;
    }

    // a o-> c with an uncovered p.d. path <a, b, ..., c>, b and c not adjacent  =>  a -> c
    bool rule9() {
        bool changed = false;
        for (std::size_t a = 0; a < n_; ++a) {
            for (std::size_t c = 0; c < n_; ++c) {
                if (!adj(a, c) || m(a, c) != Mark::Arrow || m(c, a) != Mark::Circle) continue;
                for (std::size_t b = 0; b < n_; ++b) {
                    if (b == c || adj(b, c) || !potentially_directed(a, b)) continue;
                    std::vector<bool> on(n_, false);
                    on[a] = on[b] = true;
                    if (updp(a, b, c, on)) {
                        g().set(c, a, Mark::Tail);
                        changed = true;
                        break;
                    }
                }
            }
        }
        return changed;
    }

    /// Second nodes of uncovered p.d. paths from a to target that avoid `avoid`.
    std::vector<std::size_t> updp_heads(std::size_t a, std::size_t target, std::size_t avoid) const {
        std::vector<std::size_t> heads;
        for (std::size_t mu = 0; mu < n_; ++mu) {
            if (mu == avoid || !potentially_directed(a, mu)) continue;
            if (mu == target) {
                heads.push_back(mu);
                continue;
            }
            std::vector<bool> on(n_, false);
            on[a] = on[mu] = on[avoid] = true;
            if (updp(a, mu, target, on)) heads.push_back(mu);
        }
        return heads;
    }

    // a o-> c, b -> c <- t, uncovered p.d. paths a..b and a..t leaving a through
    // non-adjacent distinct nodes  =>  a -> c
    bool rule10() {
        bool changed = false;
        for (std::size_t a = 0; a < n_; ++a) {
            for (std::size_t c = 0; c < n_; ++c) {
                if (!adj(a, c) || m(a, c) != Mark::Arrow || m(c, a) != Mark::Circle) continue;
                std::vector<std::size_t> parents;
                for (std::size_t v = 0; v < n_; ++v) {
                    if (v != a && adj(v, c) && is_parent(v, c)) parents.push_back(v);
                }
                bool fire = false;
                for (std::size_t i = 0; i < parents.size() && !fire; ++i) {
                    const auto hb = updp_heads(a, parents[i], c);
                    if (hb.empty()) continue;
                    for (std::size_t j = i + 1; j < parents.size() && !fire; ++j) {
                        const auto ht = updp_heads(a, parents[j], c);
                        for (auto mu : hb) {
                            for (auto om : ht) {
                                if (mu != om && !adj(mu, om)) fire = true;
                            }
                        }
                    }
                }
                if (fire) {
                    g().set(c, a, Mark::Tail);
                    changed = true;
                }
            }
        }
        return changed;
    }

    const CiOracle& oracle_;
    FciOptions opts_;
    std::size_t n_;
    FciOutput out_;
};

}  // namespace detail

/// FCI with the possible-d-sep stage and the complete orientation rule set, including the
/// rules that produce tails under selection. Nodes are identified by position in `vars`.
inline FciOutput fci_detailed(const CiOracle& oracle, std::vector<std::string> vars, const FciOptions& opts = {}) {
    return detail::FciRunner(oracle, std::move(vars), opts).run();
}

inline Pag fci(const CiOracle& oracle, std::vector<std::string> vars, const FciOptions& opts = {}) {
    return fci_detailed(oracle, std::move(vars), opts).pag;
}

}  // namespace rankcut
