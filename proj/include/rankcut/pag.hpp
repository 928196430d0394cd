#pragma once

#include <string>
#include <vector>

#include "rankcut/error.hpp"

namespace rankcut {

/// Endpoint mark. Numeric values are the serialized encoding.
enum class Mark : int { None = 0, Circle = 1, Arrow = 2, Tail = 3 };

/// Partial ancestral graph. mark(i, j) is the mark at j's end of the edge between i and j.
class Pag {
public:
    Pag() = default;

    explicit Pag(std::vector<std::string> labels)
        : labels_(std::move(labels)), marks_(labels_.size() * labels_.size(), Mark::None) {}

    Pag(std::vector<std::string> labels, const std::vector<std::vector<int>>& marks) : Pag(std::move(labels)) {
        if (marks.size() != size()) throw InputError("mark matrix has the wrong number of rows");
        for (std::size_t i = 0; i < size(); ++i) {
            if (marks[i].size() != size()) throw InputError("mark matrix row " + std::to_string(i) + " has the wrong length");
            for (std::size_t j = 0; j < size(); ++j) {
                const int m = marks[i][j];
                if (m < 0 || m > 3) throw InputError("mark values must be 0..3");
                set(i, j, static_cast<Mark>(m));
            }
        }
        validate();
    }

    [[nodiscard]] std::size_t size() const { return labels_.size(); }
    [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }

    [[nodiscard]] Mark mark(std::size_t i, std::size_t j) const { return marks_[i * size() + j]; }
    void set(std::size_t i, std::size_t j, Mark m) { marks_[i * size() + j] = m; }

    [[nodiscard]] bool adjacent(std::size_t i, std::size_t j) const { return mark(i, j) != Mark::None; }

    void add_edge(std::size_t i, std::size_t j, Mark at_i, Mark at_j) {
        set(j, i, at_i);
        set(i, j, at_j);
    }

    void remove_edge(std::size_t i, std::size_t j) {
        set(i, j, Mark::None);
        set(j, i, Mark::None);
    }

    [[nodiscard]] std::vector<std::size_t> neighbours(std::size_t i) const {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < size(); ++j) {
            if (adjacent(i, j)) out.push_back(j);
        }
        return out;
    }

    [[nodiscard]] std::size_t edge_count() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < size(); ++i) {
            for (std::size_t j = i + 1; j < size(); ++j) n += adjacent(i, j) ? 1 : 0;
        }
        return n;
    }

    [[nodiscard]] std::vector<std::vector<int>> mark_matrix() const {
        std::vector<std::vector<int>> out(size(), std::vector<int>(size(), 0));
        for (std::size_t i = 0; i < size(); ++i) {
            for (std::size_t j = 0; j < size(); ++j) out[i][j] = static_cast<int>(mark(i, j));
        }
        return out;
    }

    [[nodiscard]] std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < size(); ++i) {
            if (labels_[i] == label) return i;
        }
        throw InputError("PAG has no node '" + label + "'");
    }

    /// Throws InputError unless the diagonal is empty and adjacency is symmetric.
    void validate() const {
        for (std::size_t i = 0; i < size(); ++i) {
            if (mark(i, i) != Mark::None) throw InputError("PAG has a self-loop at '" + labels_[i] + "'");
            for (std::size_t j = 0; j < size(); ++j) {
                if ((mark(i, j) == Mark::None) != (mark(j, i) == Mark::None)) {
                    throw InputError("PAG marks between '" + labels_[i] + "' and '" + labels_[j] + "' are not symmetric");
                }
            }
        }
    }

    /// "A o-> B" style rendering of the edge between i and j.
    [[nodiscard]] std::string edge_string(std::size_t i, std::size_t j) const {
        auto left = [](Mark m) { return m == Mark::Circle ? "o" : m == Mark::Arrow ? "<" : "-"; };
        auto right = [](Mark m) { return m == Mark::Circle ? "o" : m == Mark::Arrow ? ">" : "-"; };
        return labels_[i] + " " + left(mark(j, i)) + "-" + right(mark(i, j)) + " " + labels_[j];
    }

    /// One edge per line, ordered by (i, j) with i < j.
    [[nodiscard]] std::string to_text() const {
        std::string out;
        for (std::size_t i = 0; i < size(); ++i) {
            for (std::size_t j = i + 1; j < size(); ++j) {
                if (adjacent(i, j)) out += edge_string(i, j) + "\n";
            }
        }
        return out;
    }

    friend bool operator==(const Pag&, const Pag&) = default;

private:
    std::vector<std::string> labels_;
    std::vector<Mark> marks_;
};

}  // namespace rankcut
