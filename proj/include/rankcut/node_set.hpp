#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <iterator>
#include <string>
#include <vector>

namespace rankcut {

/// Sorted set of node indices. Graphs here have tens of nodes, so a flat vector
/// beats tree-based sets and keeps iteration order deterministic.
class NodeSet {
public:
    using value_type = std::size_t;
    using const_iterator = std::vector<std::size_t>::const_iterator;

    NodeSet() = default;
    NodeSet(std::initializer_list<std::size_t> items) : items_(items) { normalize(); }
    explicit NodeSet(std::vector<std::size_t> items) : items_(std::move(items)) { normalize(); }

    static NodeSet from_mask(const std::vector<bool>& mask) {
        NodeSet s;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask[i]) s.items_.push_back(i);
        }
        return s;
    }

    [[nodiscard]] bool contains(std::size_t v) const {
        return std::binary_search(items_.begin(), items_.end(), v);
    }
    [[nodiscard]] std::size_t size() const { return items_.size(); }
    [[nodiscard]] bool empty() const { return items_.empty(); }
    [[nodiscard]] const_iterator begin() const { return items_.begin(); }
    [[nodiscard]] const_iterator end() const { return items_.end(); }
    [[nodiscard]] std::size_t operator[](std::size_t i) const { return items_[i]; }
    [[nodiscard]] const std::vector<std::size_t>& items() const { return items_; }

    void insert(std::size_t v) {
        auto it = std::lower_bound(items_.begin(), items_.end(), v);
        if (it == items_.end() || *it != v) items_.insert(it, v);
    }

    void erase(std::size_t v) {
        auto it = std::lower_bound(items_.begin(), items_.end(), v);
        if (it != items_.end() && *it == v) items_.erase(it);
    }

    [[nodiscard]] std::vector<bool> mask(std::size_t n) const {
        std::vector<bool> m(n, false);
        for (auto v : items_) m[v] = true;
        return m;
    }

    friend bool operator==(const NodeSet&, const NodeSet&) = default;
    friend bool operator<(const NodeSet& a, const NodeSet& b) { return a.items_ < b.items_; }

private:
    void normalize() {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    }

    std::vector<std::size_t> items_;
};

inline NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    std::vector<std::size_t> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return NodeSet(std::move(out));
}

inline NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
    std::vector<std::size_t> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return NodeSet(std::move(out));
}

inline NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
    std::vector<std::size_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return NodeSet(std::move(out));
}

inline bool disjoint(const NodeSet& a, const NodeSet& b) { return set_intersection(a, b).empty(); }

inline bool is_subset(const NodeSet& a, const NodeSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline std::string to_string(const NodeSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "}";
}

}  // namespace rankcut
