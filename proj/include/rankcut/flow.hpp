#pragma once

#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <deque>
#include <limits>
#include <vector>

#include "rankcut/error.hpp"

namespace rankcut {

/// Directed network with integral arc capacities. Arcs are stored with their residual
/// twins so the same structure serves as the residual graph during max_flow.
class FlowNetwork {
public:
    struct Arc {
        std::size_t to;
        std::int64_t capacity;
        std::size_t twin;  // index of the reverse arc in adj[to]
    };

    FlowNetwork() = default;
    FlowNetwork(std::size_t vertices, std::size_t source, std::size_t sink)
        : adj_(vertices), source_(source), sink_(sink) {
        if (source >= vertices || sink >= vertices || source == sink) {
            throw InputError("flow network needs distinct in-range source and sink");
        }
    }

    void add_arc(std::size_t from, std::size_t to, std::int64_t capacity) {
        if (from >= adj_.size() || to >= adj_.size()) throw InputError("flow arc endpoint out of range");
        if (from == to) throw InputError("flow arcs cannot be loops");
        if (capacity < 0) throw InputError("flow arc capacity must be nonnegative");
        adj_[from].push_back({to, capacity, adj_[to].size()});
        adj_[to].push_back({from, 0, adj_[from].size() - 1});
        ++arc_count_;
    }

    [[nodiscard]] std::size_t vertex_count() const { return adj_.size(); }
    [[nodiscard]] std::size_t arc_count() const { return arc_count_; }
    [[nodiscard]] std::size_t source() const { return source_; }
    [[nodiscard]] std::size_t sink() const { return sink_; }
    [[nodiscard]] const std::vector<std::vector<Arc>>& adjacency() const { return adj_; }
    std::vector<std::vector<Arc>>& adjacency() { return adj_; }

private:
    std::vector<std::vector<Arc>> adj_;
    std::size_t source_ = 0;
    std::size_t sink_ = 1;
    std::size_t arc_count_ = 0;
};

struct FlowResult {
    std::int64_t value = 0;
    /// Vertices reachable from the source in the final residual graph.
    std::vector<bool> source_side;
};

/// Edmonds-Karp: shortest augmenting paths found by BFS.
inline FlowResult max_flow(FlowNetwork net) {
    auto& adj = net.adjacency();
    const std::size_t n = net.vertex_count();
    const std::size_t s = net.source();
    const std::size_t t = net.sink();
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    FlowResult out;
    std::vector<std::size_t> prev_vertex(n), prev_arc(n);
    for (;;) {
        std::fill(prev_vertex.begin(), prev_vertex.end(), none);
        prev_vertex[s] = s;
        std::deque<std::size_t> queue{s};
        while (!queue.empty() && prev_vertex[t] == none) {
            const auto v = queue.front();
            queue.pop_front();
            for (std::size_t i = 0; i < adj[v].size(); ++i) {
                const auto& arc = adj[v][i];
                if (arc.capacity > 0 && prev_vertex[arc.to] == none) {
                    prev_vertex[arc.to] = v;
                    prev_arc[arc.to] = i;
                    queue.push_back(arc.to);
                }
            }
        }
        if (prev_vertex[t] == none) break;

        std::int64_t push = std::numeric_limits<std::int64_t>::max();
        for (auto v = t; v != s; v = prev_vertex[v]) push = std::min(push, adj[prev_vertex[v]][prev_arc[v]].capacity);
        for (auto v = t; v != s; v = prev_vertex[v]) {
            auto& arc = adj[prev_vertex[v]][prev_arc[v]];
            arc.capacity -= push;
            adj[v][arc.twin].capacity += push;
        }
        out.value += push;
    }
    out.source_side.assign(n, false);
    for (std::size_t v = 0; v < n; ++v) out.source_side[v] = prev_vertex[v] != none;
    return out;
}

}  // namespace rankcut
