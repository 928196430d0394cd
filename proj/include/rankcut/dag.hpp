#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rankcut/error.hpp"
#include "rankcut/node_set.hpp"

namespace rankcut {

enum class NodeRole { Observed, Latent, SelectionResponse };

inline std::string_view role_name(NodeRole role) {
    switch (role) {
        case NodeRole::Observed: return "observed";
        case NodeRole::Latent: return "latent";
        case NodeRole::SelectionResponse: return "selection";
    }
    return "observed";
}

inline std::optional<NodeRole> parse_role(std::string_view s) {
    if (s == "observed") return NodeRole::Observed;
    if (s == "latent") return NodeRole::Latent;
    if (s == "selection") return NodeRole::SelectionResponse;
    return std::nullopt;
}

struct Node {
    std::string name;
    NodeRole role = NodeRole::Observed;

    friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
    std::size_t parent = 0;
    std::size_t child = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable weighted DAG over named nodes. Nodes are addressed by position;
/// names are the external identity.
class Dag {
public:
    Dag() = default;

    Dag(std::vector<Node> nodes, std::vector<Edge> edges)
        : nodes_(std::move(nodes)), edges_(std::move(edges)) {
        validate();
    }

    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const Node& node(std::size_t i) const { return nodes_.at(i); }
    [[nodiscard]] const std::vector<std::size_t>& parents(std::size_t i) const { return parents_.at(i); }
    [[nodiscard]] const std::vector<std::size_t>& children(std::size_t i) const { return children_.at(i); }
    /// Topological order computed at construction (stable: ties broken by index).
    [[nodiscard]] const std::vector<std::size_t>& topological_order() const { return topo_; }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] std::size_t index_of(std::string_view name) const {
        auto idx = find(name);
        if (!idx) throw InputError("unknown node '" + std::string(name) + "'");
        return *idx;
    }

    [[nodiscard]] NodeSet indices_of(const std::vector<std::string>& names) const {
        NodeSet s;
        for (const auto& n : names) s.insert(index_of(n));
        return s;
    }

    [[nodiscard]] std::vector<std::string> names_of(const NodeSet& s) const {
        std::vector<std::string> out;
        for (auto i : s) out.push_back(nodes_.at(i).name);
        return out;
    }

    [[nodiscard]] bool has_edge(std::size_t from, std::size_t to) const {
        for (auto c : children_.at(from)) {
            if (c == to) return true;
        }
        return false;
    }

    [[nodiscard]] std::optional<double> weight(std::size_t from, std::size_t to) const {
        for (const auto& e : edges_) {
            if (e.parent == from && e.child == to) return e.weight;
        }
        return std::nullopt;
    }

    [[nodiscard]] NodeSet nodes_with_role(NodeRole role) const {
        NodeSet s;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].role == role) s.insert(i);
        }
        return s;
    }

    void check_indices(const NodeSet& s) const {
        for (auto v : s) {
            if (v >= nodes_.size()) {
                throw InputError("node index " + std::to_string(v) + " out of range for graph with " +
                                 std::to_string(nodes_.size()) + " nodes");
            }
        }
    }

    friend bool operator==(const Dag& a, const Dag& b) { return a.nodes_ == b.nodes_ && a.edges_ == b.edges_; }

private:
    void validate() {
        const std::size_t n = nodes_.size();
        index_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (nodes_[i].name.empty()) throw InputError("node " + std::to_string(i) + " has an empty name");
            if (!index_.emplace(nodes_[i].name, i).second) {
                throw InputError("duplicate node name '" + nodes_[i].name + "'");
            }
        }
        parents_.assign(n, {});
        children_.assign(n, {});
        for (const auto& e : edges_) {
            if (e.parent >= n || e.child >= n) throw InputError("edge endpoint out of range");
            if (e.parent == e.child) throw InputError("self-loop on '" + nodes_[e.parent].name + "'");
            if (!std::isfinite(e.weight) || e.weight == 0.0) {
                throw InputError("edge " + nodes_[e.parent].name + " -> " + nodes_[e.child].name +
                                 " must have a finite nonzero weight");
            }
            if (nodes_[e.parent].role == NodeRole::SelectionResponse) {
                throw InputError("selection response node '" + nodes_[e.parent].name + "' cannot have children");
            }
            for (auto c : children_[e.parent]) {
                if (c == e.child) {
                    throw InputError("duplicate edge " + nodes_[e.parent].name + " -> " + nodes_[e.child].name);
                }
            }
            children_[e.parent].push_back(e.child);
            parents_[e.child].push_back(e.parent);
        }
        for (auto& p : parents_) std::sort(p.begin(), p.end());
        for (auto& c : children_) std::sort(c.begin(), c.end());

        // Kahn's algorithm; smallest ready index first keeps the order stable.
        std::vector<std::size_t> indegree(n);
        for (std::size_t i = 0; i < n; ++i) indegree[i] = parents_[i].size();
        std::vector<std::size_t> ready;
        for (std::size_t i = n; i-- > 0;) {
            if (indegree[i] == 0) ready.push_back(i);
        }
        topo_.clear();
        while (!ready.empty()) {
            auto v = ready.back();
            ready.pop_back();
            topo_.push_back(v);
            for (auto c : children_[v]) {
                if (--indegree[c] == 0) {
                    ready.push_back(c);
                    std::sort(ready.begin(), ready.end(), std::greater<>());
                }
            }
        }
        if (topo_.size() != n) {
            std::string culprit;
            for (std::size_t i = 0; i < n; ++i) {
                if (indegree[i] > 0) {
                    culprit = nodes_[i].name;
                    break;
                }
            }
            throw InputError("graph contains a directed cycle through '" + culprit + "'");
        }
    }

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> topo_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Incremental construction by name.
class DagBuilder {
public:
    DagBuilder& node(std::string name, NodeRole role = NodeRole::Observed) {
        nodes_.push_back({std::move(name), role});
        return *this;
    }

    DagBuilder& edge(std::string_view from, std::string_view to, double weight = 1.0) {
        edges_.push_back({lookup(from), lookup(to), weight});
        return *this;
    }

    [[nodiscard]] Dag build() const { return Dag(nodes_, edges_); }

private:
    std::size_t lookup(std::string_view name) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].name == name) return i;
        }
        throw InputError("unknown node '" + std::string(name) + "'");
    }

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
};

namespace detail {

/// Reflexive ancestors of `start`, walking parents but never entering `removed` nodes.
/// Start nodes inside `removed` are skipped.
inline std::vector<bool> ancestors_avoiding(const Dag& g, const NodeSet& start, const std::vector<bool>& removed) {
    std::vector<bool> seen(g.size(), false);
    std::vector<std::size_t> stack;
    for (auto s : start) {
        if (!removed[s] && !seen[s]) {
            seen[s] = true;
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto p : g.parents(v)) {
            if (!removed[p] && !seen[p]) {
                seen[p] = true;
                stack.push_back(p);
            }
        }
    }
    return seen;
}

}  // namespace detail

/// an(s): every node with a directed path into s, including s itself.
inline NodeSet ancestors(const Dag& g, const NodeSet& s) {
    g.check_indices(s);
    return NodeSet::from_mask(detail::ancestors_avoiding(g, s, std::vector<bool>(g.size(), false)));
}

/// de(s), reflexive.
inline NodeSet descendants(const Dag& g, const NodeSet& s) {
    g.check_indices(s);
    std::vector<bool> seen(g.size(), false);
    std::vector<std::size_t> stack(s.begin(), s.end());
    for (auto v : s) seen[v] = true;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto c : g.children(v)) {
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
        }
    }
    return NodeSet::from_mask(seen);
}

/// Graph with the nodes in `c` and their incident edges deleted. Surviving nodes keep
/// their relative order.
inline Dag remove_nodes(const Dag& g, const NodeSet& c) {
    g.check_indices(c);
    std::vector<std::size_t> remap(g.size(), g.size());
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!c.contains(i)) {
            remap[i] = nodes.size();
            nodes.push_back(g.node(i));
        }
    }
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) {
        if (remap[e.parent] < g.size() && remap[e.child] < g.size()) {
            edges.push_back({remap[e.parent], remap[e.child], e.weight});
        }
    }
    return Dag(std::move(nodes), std::move(edges));
}

/// d-separation of a and b given c (Bayes-ball reachability).
inline bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& c) {
    g.check_indices(a);
    g.check_indices(b);
    g.check_indices(c);
    if (!disjoint(a, b) || !disjoint(a, c) || !disjoint(b, c)) {
        throw InputError("d_separated requires pairwise disjoint sets, got " + to_string(a) + ", " + to_string(b) +
                         ", " + to_string(c));
    }
    if (a.empty() || b.empty()) return true;

    const std::size_t n = g.size();
    const auto in_c = c.mask(n);
    const auto anc_c = detail::ancestors_avoiding(g, c, std::vector<bool>(n, false));
    const auto in_b = b.mask(n);

    // state: node * 2 + (0 = arrived from a child / moving up, 1 = arrived from a parent / moving down)
    std::vector<bool> visited(2 * n, false);
    std::deque<std::pair<std::size_t, int>> queue;
    for (auto v : a) queue.emplace_back(v, 0);
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (visited[2 * v + dir]) continue;
        visited[2 * v + dir] = true;
        if (!in_c[v] && in_b[v]) return false;
        if (dir == 0) {
            if (in_c[v]) continue;
            for (auto p : g.parents(v)) queue.emplace_back(p, 0);
            for (auto ch : g.children(v)) queue.emplace_back(ch, 1);
        } else {
            if (!in_c[v]) {
                for (auto ch : g.children(v)) queue.emplace_back(ch, 1);
            }
            if (anc_c[v]) {
                for (auto p : g.parents(v)) queue.emplace_back(p, 0);
            }
        }
    }
    return true;
}

}  // namespace rankcut
