#pragma once

#include <string>
#include <vector>

#include "rankcut/dag.hpp"
#include "rankcut/selection.hpp"

namespace rankcut {

/// A DAG extended with one response node per selection condition. Response nodes sit
/// after all base nodes; their edges come from the condition's target variables.
struct AugmentedGraph {
    Dag base;
    Dag graph;
    NodeSet responses;

    [[nodiscard]] std::size_t selection_count() const { return responses.size(); }
    [[nodiscard]] bool is_response(std::size_t v) const { return responses.contains(v); }
};

namespace detail {

inline void check_response_parents(const Dag& g, const NodeSet& responses) {
    for (auto y : responses) {
        if (g.parents(y).empty()) {
            throw ConfigError("selection response node '" + g.node(y).name + "' has no parents");
        }
    }
}

}  // namespace detail

/// Selection-augmented graph. Any response nodes already declared in `g` are kept (moved
/// after the base nodes, in their original relative order) and count towards k; each
/// condition in `config` then contributes one more response with edges from its targets,
/// weighted by the condition's coefficients.
inline AugmentedGraph augment(const Dag& g, const SelectionConfig& config) {
    const NodeSet declared = g.nodes_with_role(NodeRole::SelectionResponse);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!declared.contains(i)) order.push_back(i);
    }
    const std::size_t base_count = order.size();
    for (auto y : declared) order.push_back(y);

    std::vector<std::size_t> position(g.size());
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

    std::vector<Node> nodes;
    for (auto i : order) nodes.push_back(g.node(i));
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) edges.push_back({position[e.parent], position[e.child], e.weight});

    for (std::size_t i = 0; i < config.size(); ++i) {
        const auto& cond = config.conditions[i];
        cond.validate();
        const std::string name = config.response_name(i);
        if (g.find(name)) throw ConfigError("selection response name '" + name + "' clashes with a graph node");
        for (const auto& n : nodes) {
            if (n.name == name) throw ConfigError("duplicate selection response name '" + name + "'");
        }
        const std::size_t y = nodes.size();
        nodes.push_back({name, NodeRole::SelectionResponse});
        for (std::size_t t = 0; t < cond.targets.size(); ++t) {
            auto idx = g.find(cond.targets[t]);
            if (!idx) throw ConfigError("selection target '" + cond.targets[t] + "' is not a graph node");
            if (declared.contains(*idx)) {
                throw ConfigError("selection target '" + cond.targets[t] + "' is itself a selection response");
            }
            edges.push_back({position[*idx], y, cond.coeffs[t]});
        }
    }

    AugmentedGraph out;
    out.graph = Dag(std::move(nodes), std::move(edges));
    std::vector<std::size_t> ys;
    for (std::size_t i = base_count; i < out.graph.size(); ++i) ys.push_back(i);
    out.responses = NodeSet(std::move(ys));
    detail::check_response_parents(out.graph, out.responses);
    out.base = remove_nodes(out.graph, out.responses);
    return out;
}

}  // namespace rankcut
