#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankcut/augment.hpp"
#include "rankcut/dag.hpp"
#include "rankcut/error.hpp"
#include "rankcut/latent.hpp"
#include "rankcut/pag.hpp"
#include "rankcut/rank_infer.hpp"
#include "rankcut/sampling.hpp"
#include "rankcut/selection.hpp"
#include "rankcut/sem.hpp"

namespace rankcut {

using Json = nlohmann::ordered_json;

/// A linear SEM with its selection mechanism and, optionally, a measurement clustering.
struct Model {
    LinearSem sem;
    SelectionConfig selection;
    std::optional<MeasurementClustering> clustering;
};

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("write to '" + path + "' failed");
}

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace detail {

/// Maps JSON pointers ("/nodes/3/name") to the 1-based line where that value starts.
/// Assumes the text already parsed as valid JSON.
class JsonLines {
public:
    explicit JsonLines(const std::string& text) : text_(text) {
        skip_ws();
        if (pos_ < text_.size()) value("");
    }

    [[nodiscard]] int line(const std::string& pointer) const {
        auto it = lines_.find(pointer);
        return it == lines_.end() ? 0 : it->second;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    std::string string_token() {
        std::string out;
        ++pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') out += text_[pos_++];
            out += text_[pos_++];
        }
        ++pos_;
        return out;
    }

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }

    void value(const std::string& ptr) {
        lines_[ptr] = line_;
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            skip_ws();
            if (text_[pos_] == '}') {
                ++pos_;
                return;
            }
            while (true) {
                skip_ws();
                const auto key = string_token();
                skip_ws();
                ++pos_;  // ':'
                skip_ws();
                value(ptr + "/" + escape(key));
                skip_ws();
                if (text_[pos_++] == '}') return;
            }
        }
        if (c == '[') {
            ++pos_;
            skip_ws();
            if (text_[pos_] == ']') {
                ++pos_;
                return;
            }
            for (std::size_t i = 0;; ++i) {
                skip_ws();
                value(ptr + "/" + std::to_string(i));
                skip_ws();
                if (text_[pos_++] == ']') return;
            }
        }
        if (c == '"') {
            string_token();
            return;
        }
        while (pos_ < text_.size() && !std::strchr(",]} \t\r\n", text_[pos_])) ++pos_;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

/// Parsed document plus the bookkeeping needed for "source:line: message" errors.
class JsonDoc {
public:
    JsonDoc(const std::string& text, std::string source) : source_(std::move(source)) {
        try {
            root_ = Json::parse(text);
        } catch (const Json::parse_error& e) {
            int line = 1;
            const auto end = std::min<std::size_t>(e.byte, text.size());
            for (std::size_t i = 0; i + 1 < end; ++i) line += text[i] == '\n' ? 1 : 0;
            throw InputError(source_ + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
        }
        lines_.emplace(text);
    }

    [[nodiscard]] const Json& root() const { return root_; }

    [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
        const int line = lines_->line(pointer);
        throw InputError(source_ + ":" + (line > 0 ? std::to_string(line) + ":" : std::string()) + " " + msg);
    }

    const Json& need(const Json& obj, const std::string& ptr, const char* key) const {
        if (!obj.is_object()) fail(ptr, "expected an object");
        auto it = obj.find(key);
        if (it == obj.end()) fail(ptr, std::string("missing field '") + key + "'");
        return *it;
    }

    std::string get_string(const Json& v, const std::string& ptr) const {
        if (!v.is_string()) fail(ptr, "expected a string");
        return v.get<std::string>();
    }

    double get_number(const Json& v, const std::string& ptr) const {
        if (!v.is_number()) fail(ptr, "expected a number");
        return v.get<double>();
    }

    /// Number, or null / "inf" / "-inf" for an unbounded end.
    double get_bound(const Json& v, const std::string& ptr, double if_null) const {
        if (v.is_null()) return if_null;
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
            fail(ptr, "expected a number, null, \"inf\" or \"-inf\"");
        }
        return get_number(v, ptr);
    }

    const Json& get_array(const Json& v, const std::string& ptr) const {
        if (!v.is_array()) fail(ptr, "expected an array");
        return v;
    }

    std::vector<std::string> get_strings(const Json& v, const std::string& ptr) const {
        std::vector<std::string> out;
        const auto& a = get_array(v, ptr);
        for (std::size_t i = 0; i < a.size(); ++i) out.push_back(get_string(a[i], ptr + "/" + std::to_string(i)));
        return out;
    }

    [[nodiscard]] const std::string& source() const { return source_; }

private:
    std::string source_;
    Json root_;
    std::optional<JsonLines> lines_;
};

inline Json bound_json(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline Dag parse_graph_part(const JsonDoc& doc) {
    const auto& root = doc.root();
    if (!root.is_object()) doc.fail("", "expected a JSON object at top level");
    const auto& nodes = doc.get_array(doc.need(root, "", "nodes"), "/nodes");
    std::vector<Node> out_nodes;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto p = "/nodes/" + std::to_string(i);
        const auto name = doc.get_string(doc.need(nodes[i], p, "name"), p + "/name");
        if (name.empty()) doc.fail(p + "/name", "node name must be nonempty");
        NodeRole role = NodeRole::Observed;
        if (auto it = nodes[i].find("role"); it != nodes[i].end()) {
            const auto r = parse_role(doc.get_string(*it, p + "/role"));
            if (!r) doc.fail(p + "/role", "role must be observed, latent or selection");
            role = *r;
        }
        if (!index.emplace(name, i).second) doc.fail(p + "/name", "duplicate node name '" + name + "'");
        out_nodes.push_back({name, role});
    }
    std::vector<Edge> edges;
    std::vector<std::string> edge_ptr;
    if (auto it = root.find("edges"); it != root.end()) {
        const auto& arr = doc.get_array(*it, "/edges");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto p = "/edges/" + std::to_string(i);
            auto endpoint = [&](const char* key) {
                const auto name = doc.get_string(doc.need(arr[i], p, key), p + "/" + key);
                auto f = index.find(name);
                if (f == index.end()) doc.fail(p + "/" + key, "unknown node '" + name + "'");
                return f->second;
            };
            Edge e{endpoint("from"), endpoint("to"), 1.0};
            if (auto w = arr[i].find("weight"); w != arr[i].end()) e.weight = doc.get_number(*w, p + "/weight");
            if (e.parent == e.child) doc.fail(p, "self-loop on '" + out_nodes[e.parent].name + "'");
            if (!std::isfinite(e.weight) || e.weight == 0.0) doc.fail(p + "/weight", "edge weight must be finite and nonzero");
            for (std::size_t j = 0; j < edges.size(); ++j) {
                if (edges[j].parent == e.parent && edges[j].child == e.child) {
                    doc.fail(p, "duplicate edge " + out_nodes[e.parent].name + " -> " + out_nodes[e.child].name);
                }
            }
            if (out_nodes[e.parent].role == NodeRole::SelectionResponse) {
                doc.fail(p, "selection node '" + out_nodes[e.parent].name + "' cannot have children");
            }
            edges.push_back(e);
            edge_ptr.push_back(p);
        }
    }
    // cycle check: peel sources, report the first edge left inside a cycle
    std::vector<std::size_t> indeg(out_nodes.size(), 0);
    for (const auto& e : edges) ++indeg[e.child];
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < indeg.size(); ++i) {
        if (indeg[i] == 0) ready.push_back(i);
    }
    std::vector<bool> done(out_nodes.size(), false);
    while (!ready.empty()) {
        const auto v = ready.back();
        ready.pop_back();
        done[v] = true;
        for (const auto& e : edges) {
            if (e.parent == v && --indeg[e.child] == 0) ready.push_back(e.child);
        }
    }
    for (std::size_t j = 0; j < edges.size(); ++j) {
        if (!done[edges[j].parent] && !done[edges[j].child]) {
            doc.fail(edge_ptr[j], "edge " + out_nodes[edges[j].parent].name + " -> " + out_nodes[edges[j].child].name +
                                      " lies on a directed cycle");
        }
    }
    return Dag(std::move(out_nodes), std::move(edges));
}

inline AdmissibleSet parse_admissible(const JsonDoc& doc, const Json& v, const std::string& ptr) {
    const auto& arr = doc.get_array(v, ptr);
    if (arr.empty()) doc.fail(ptr, "admissible set needs at least one entry");
    std::vector<AdmissibleSet::Interval> intervals;
    std::vector<double> points;
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto p = ptr + "/" + std::to_string(i);
        const auto& e = doc.get_array(arr[i], p);
        if (e.empty()) doc.fail(p, "empty admissible entry");
        const auto kind = doc.get_string(e[0], p + "/0");
        if (kind == "point") {
            if (e.size() != 2) doc.fail(p, "expected [\"point\", value]");
            points.push_back(doc.get_number(e[1], p + "/1"));
            continue;
        }
        if (e.size() != 3) doc.fail(p, "expected [\"" + kind + "\", lo, hi]");
        AdmissibleSet::Interval iv{doc.get_bound(e[1], p + "/1", -inf), doc.get_bound(e[2], p + "/2", inf)};
        if (kind == "interval") {
        } else if (kind == "closed") {
            iv.lo_closed = iv.hi_closed = true;
        } else if (kind == "closed_open") {
            iv.lo_closed = true;
        } else if (kind == "open_closed") {
            iv.hi_closed = true;
        } else {
            doc.fail(p + "/0", "admissible entry kind must be interval, closed, closed_open, open_closed or point");
        }
        if (!(iv.lo < iv.hi)) doc.fail(p, "admissible interval needs lo < hi");
        if (std::isinf(iv.lo)) iv.lo_closed = false;
        if (std::isinf(iv.hi)) iv.hi_closed = false;
        intervals.push_back(iv);
    }
    try {
        return AdmissibleSet(std::move(intervals), std::move(points));
    } catch (const InputError& e) {
        doc.fail(ptr, e.what());
    }
}

inline Eigen::VectorXd parse_node_vector(const JsonDoc& doc, const Json& v, const std::string& ptr, const Dag& g,
                                         double fill) {
    Eigen::VectorXd out = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g.size()), fill);
    if (v.is_array()) {
        if (v.size() != g.size()) doc.fail(ptr, "expected " + std::to_string(g.size()) + " values, one per node");
        for (std::size_t i = 0; i < v.size(); ++i) {
            out(static_cast<Eigen::Index>(i)) = doc.get_number(v[i], ptr + "/" + std::to_string(i));
        }
        return out;
    }
    if (!v.is_object()) doc.fail(ptr, "expected an array or an object keyed by node name");
    for (auto it = v.begin(); it != v.end(); ++it) {
        const auto idx = g.find(it.key());
        if (!idx) doc.fail(ptr, "unknown node '" + it.key() + "'");
        out(static_cast<Eigen::Index>(*idx)) = doc.get_number(it.value(), ptr + "/" + it.key());
    }
    return out;
}

inline MeasurementClustering parse_clustering_part(const JsonDoc& doc, const Json& v, const std::string& ptr) {
    const auto& arr = doc.get_array(v, ptr);
    std::vector<MeasurementClustering::Entry> entries;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto p = ptr + "/" + std::to_string(i);
        entries.push_back({doc.get_string(doc.need(arr[i], p, "latent"), p + "/latent"),
                           doc.get_strings(doc.need(arr[i], p, "measurements"), p + "/measurements")});
    }
    try {
        return MeasurementClustering(std::move(entries));
    } catch (const InputError& e) {
        doc.fail(ptr, e.what());
    }
}

}  // namespace detail

// ---- graphs and models ----------------------------------------------------

inline Json graph_to_json(const Dag& g) {
    Json nodes = Json::array();
    for (const auto& n : g.nodes()) nodes.push_back({{"name", n.name}, {"role", std::string(role_name(n.role))}});
    Json edges = Json::array();
    for (const auto& e : g.edges()) {
        edges.push_back({{"from", g.node(e.parent).name}, {"to", g.node(e.child).name}, {"weight", e.weight}});
    }
    return {{"nodes", nodes}, {"edges", edges}};
}

inline Dag parse_graph(const std::string& text, const std::string& source = "<graph>") {
    detail::JsonDoc doc(text, source);
    return detail::parse_graph_part(doc);
}

inline Json admissible_to_json(const AdmissibleSet& s) {
    Json out = Json::array();
    for (const auto& iv : s.intervals()) {
        const char* kind = iv.lo_closed ? (iv.hi_closed ? "closed" : "closed_open") : (iv.hi_closed ? "open_closed" : "interval");
        out.push_back({kind, detail::bound_json(iv.lo), detail::bound_json(iv.hi)});
    }
    for (double p : s.points()) out.push_back({"point", p});
    return out;
}

inline Json clustering_to_json(const MeasurementClustering& c) {
    Json out = Json::array();
    for (const auto& e : c.entries()) out.push_back({{"latent", e.latent}, {"measurements", e.measurements}});
    return out;
}

inline Json model_to_json(const Model& m) {
    Json out = graph_to_json(m.sem.graph());
    const auto labels = m.sem.labels();
    Json phi = Json::object(), mu = Json::object();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        phi[labels[i]] = m.sem.phi()(static_cast<Eigen::Index>(i));
        mu[labels[i]] = m.sem.mu()(static_cast<Eigen::Index>(i));
    }
    out["phi"] = phi;
    out["mu"] = mu;
    Json sels = Json::array();
    for (std::size_t i = 0; i < m.selection.size(); ++i) {
        const auto& c = m.selection.conditions[i];
        sels.push_back({{"name", m.selection.response_name(i)},
                        {"targets", c.targets},
                        {"coeffs", c.coeffs},
                        {"noise", {{"kind", std::string(noise_kind_name(c.noise.kind))}, {"param", c.noise.param}}},
                        {"admissible", admissible_to_json(c.admissible)}});
    }
    out["selections"] = sels;
    if (m.clustering) out["clustering"] = clustering_to_json(*m.clustering);
    return out;
}

/// Everything a graph or model file can hold. Graph files may declare selection nodes
/// directly; model files put them in "selections" instead.
struct GraphSpec {
    Dag graph;
    SelectionConfig selection;
    std::optional<MeasurementClustering> clustering;
    Eigen::VectorXd phi;
    std::optional<Eigen::VectorXd> mu;

    [[nodiscard]] AugmentedGraph augmented() const { return augment(graph, selection); }
};

/// Graph JSON plus optional "phi", "mu", "selections" and "clustering".
inline GraphSpec parse_graph_spec(const std::string& text, const std::string& source = "<graph>") {
    detail::JsonDoc doc(text, source);
    GraphSpec out;
    out.graph = detail::parse_graph_part(doc);
    const Dag& g = out.graph;
    const auto& root = doc.root();
    out.phi = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
    if (auto it = root.find("phi"); it != root.end()) out.phi = detail::parse_node_vector(doc, *it, "/phi", g, 1.0);
    if (auto it = root.find("mu"); it != root.end()) out.mu = detail::parse_node_vector(doc, *it, "/mu", g, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.node(i).role != NodeRole::SelectionResponse && !(out.phi(static_cast<Eigen::Index>(i)) > 0.0)) {
            doc.fail("/phi", "noise variance of '" + g.node(i).name + "' must be positive");
        }
    }
    if (auto it = root.find("selections"); it != root.end()) {
        const auto& arr = doc.get_array(*it, "/selections");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto p = "/selections/" + std::to_string(i);
            SelectionCondition c;
            if (auto n = arr[i].find("name"); n != arr[i].end()) c.name = doc.get_string(*n, p + "/name");
            c.targets = doc.get_strings(doc.need(arr[i], p, "targets"), p + "/targets");
            const auto& coeffs = doc.get_array(doc.need(arr[i], p, "coeffs"), p + "/coeffs");
            for (std::size_t j = 0; j < coeffs.size(); ++j) c.coeffs.push_back(doc.get_number(coeffs[j], p + "/coeffs/" + std::to_string(j)));
            for (const auto& t : c.targets) {
                const auto idx = g.find(t);
                if (!idx) doc.fail(p + "/targets", "unknown selection target '" + t + "'");
                if (g.node(*idx).role == NodeRole::SelectionResponse) doc.fail(p + "/targets", "selection target '" + t + "' is a selection node");
            }
            if (auto nz = arr[i].find("noise"); nz != arr[i].end()) {
                const auto kind = doc.get_string(doc.need(*nz, p + "/noise", "kind"), p + "/noise/kind");
                try {
                    c.noise.kind = parse_noise_kind(kind);
                } catch (const InputError& e) {
                    doc.fail(p + "/noise/kind", e.what());
                }
                if (auto pr = nz->find("param"); pr != nz->end()) c.noise.param = doc.get_number(*pr, p + "/noise/param");
            }
            c.admissible = detail::parse_admissible(doc, doc.need(arr[i], p, "admissible"), p + "/admissible");
            try {
                c.validate();
            } catch (const InputError& e) {
                doc.fail(p, e.what());
            }
            out.selection.conditions.push_back(std::move(c));
        }
    }
    if (auto it = root.find("clustering"); it != root.end()) {
        out.clustering = detail::parse_clustering_part(doc, *it, "/clustering");
        try {
            out.clustering->validate_against(g);
        } catch (const InputError& e) {
            doc.fail("/clustering", e.what());
        }
    }
    try {
        augment(g, out.selection);
    } catch (const InputError& e) {
        doc.fail("/selections", e.what());
    }
    return out;
}

/// A model file is a graph spec without declared selection nodes.
inline Model parse_model(const std::string& text, const std::string& source = "<model>") {
    auto spec = parse_graph_spec(text, source);
    for (const auto& n : spec.graph.nodes()) {
        if (n.role == NodeRole::SelectionResponse) {
            throw InputError(source + ": node '" + n.name + "' is a selection node; a model needs its selection in \"selections\"");
        }
    }
    return {LinearSem(std::move(spec.graph), spec.phi, spec.mu), std::move(spec.selection), std::move(spec.clustering)};
}

inline MeasurementClustering parse_clustering(const std::string& text, const std::string& source = "<clustering>") {
    detail::JsonDoc doc(text, source);
    const auto& root = doc.root();
    if (root.is_object()) return detail::parse_clustering_part(doc, doc.need(root, "", "clustering"), "/clustering");
    return detail::parse_clustering_part(doc, root, "");
}

// ---- PAGs -----------------------------------------------------------------

inline Json pag_to_json(const Pag& p) {
    Json edges = Json::array();
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            if (p.adjacent(i, j)) edges.push_back(p.edge_string(i, j));
        }
    }
    return {{"labels", p.labels()}, {"marks", p.mark_matrix()}, {"edges", edges}};
}

inline Pag parse_pag(const std::string& text, const std::string& source = "<pag>") {
    detail::JsonDoc doc(text, source);
    const auto& root = doc.root();
    auto labels = doc.get_strings(doc.need(root, "", "labels"), "/labels");
    const auto& marks = doc.get_array(doc.need(root, "", "marks"), "/marks");
    std::vector<std::vector<int>> m;
    for (std::size_t i = 0; i < marks.size(); ++i) {
        const auto p = "/marks/" + std::to_string(i);
        std::vector<int> row;
        for (std::size_t j = 0; j < doc.get_array(marks[i], p).size(); ++j) {
            const auto& v = marks[i][j];
            if (!v.is_number_integer()) doc.fail(p + "/" + std::to_string(j), "mark must be an integer 0..3");
            row.push_back(v.get<int>());
        }
        m.push_back(std::move(row));
    }
    try {
        return Pag(std::move(labels), m);
    } catch (const InputError& e) {
        doc.fail("/marks", e.what());
    }
}

// ---- rank decisions -------------------------------------------------------

inline Json rank_decision_to_json(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                  const RankDecision& d) {
    Json out = {{"a", a}, {"b", b}, {"method", std::string(rank_method_name(d.method))}, {"rank", d.rank}};
    out["statistic"] = d.rank < d.statistics.size() ? Json(d.statistics[d.rank]) : Json(nullptr);
    out["statistics"] = d.statistics;
    out["p_values"] = d.p_values;
    if (!d.canonical_correlations.empty()) out["canonical_correlations"] = d.canonical_correlations;
    if (!d.singular_values.empty()) out["singular_values"] = d.singular_values;
    if (!d.note.empty()) out["note"] = d.note;
    return out;
}

// ---- CSV ------------------------------------------------------------------

inline std::string dataset_to_csv(const Dataset& d) {
    std::string out;
    for (std::size_t j = 0; j < d.labels.size(); ++j) out += (j ? "," : "") + d.labels[j];
    out += '\n';
    for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.values.cols(); ++j) {
            if (j) out += ',';
            out += format_double(d.values(i, j));
        }
        out += '\n';
    }
    return out;
}

inline Dataset parse_csv(const std::string& text, const std::string& source = "<csv>") {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw InputError(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    Dataset out;
    std::vector<double> flat;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        if (out.labels.empty()) {
            for (std::size_t j = 0; j < cells.size(); ++j) {
                if (cells[j].empty()) fail("empty column name");
                if (std::find(cells.begin(), cells.begin() + static_cast<long>(j), cells[j]) != cells.begin() + static_cast<long>(j)) {
                    fail("duplicate column '" + cells[j] + "'");
                }
            }
            out.labels = cells;
            continue;
        }
        if (cells.size() != out.labels.size()) {
            fail("expected " + std::to_string(out.labels.size()) + " fields, found " + std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            double v = 0.0;
            const auto& c = cells[j];
            auto r = std::from_chars(c.data(), c.data() + c.size(), v);
            if (r.ec != std::errc() || r.ptr != c.data() + c.size() || !std::isfinite(v)) {
                fail("column '" + out.labels[j] + "': '" + c + "' is not a finite number");
            }
            flat.push_back(v);
        }
    }
    if (out.labels.empty()) throw InputError(source + ": missing header row");
    const auto cols = static_cast<Eigen::Index>(out.labels.size());
    const auto rows = static_cast<Eigen::Index>(flat.size() / out.labels.size());
    out.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), rows, cols);
    return out;
}

}  // namespace rankcut
