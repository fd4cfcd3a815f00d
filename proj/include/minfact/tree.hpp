#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <minfact/errors.hpp>

namespace minfact {

// Incident edge, as seen from one endpoint. Adjacency lists are kept sorted
// by label so that label walks can binary-search.
struct EdgeRef {
    double label;
    int to;
};

struct EdgeSpec {
    int u;
    int v;
    double label;
};

// Rooted ordered tree in Neveu's address style: nodes are created under an
// explicit parent and keep their child order. Carries optional edge labels
// (on the edge to the parent) and optional vertex labels.
class PlaneTree {
public:
    struct Node {
        int parent = -1;
        std::vector<int> children;
        double edge_label = 0.0;  // label of the edge to the parent; unused at the root
        std::optional<int> vlabel;
    };

    PlaneTree() { nodes_.emplace_back(); }

    int root() const { return 0; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const Node& node(int v) const { return nodes_[v]; }

    int add_child(int parent, double edge_label) {
        const int id = size();
        nodes_.emplace_back();
        nodes_[id].parent = parent;
        nodes_[id].edge_label = edge_label;
        nodes_[parent].children.push_back(id);
        return id;
    }

    void set_vlabel(int v, int label) { nodes_[v].vlabel = label; }

    // Resolve a Neveu address (child indices are 1-based); throws if absent.
    int at_address(const std::vector<int>& word) const {
        int v = 0;
        for (int c : word) {
            if (c < 1 || c > static_cast<int>(nodes_[v].children.size()))
                throw std::out_of_range("no node at this address");
            v = nodes_[v].children[c - 1];
        }
        return v;
    }

private:
    std::vector<Node> nodes_;
};

// Pointed non-plane tree with distinct real edge labels. Vertices are dense
// ids 0..n-1; adjacency lists are sorted by edge label.
class PointedELTree {
public:
    PointedELTree() = default;

    static PointedELTree from_edges(int n_vertices, int point, const std::vector<EdgeSpec>& edges) {
        if (n_vertices < 1) throw std::invalid_argument("tree needs at least one vertex");
        if (point < 0 || point >= n_vertices) throw std::invalid_argument("point out of range");
        if (static_cast<int>(edges.size()) != n_vertices - 1)
            throw std::invalid_argument("a tree on n vertices has n-1 edges");
        PointedELTree t;
        t.point_ = point;
        t.adj_.assign(n_vertices, {});
        for (const auto& e : edges) {
            if (e.u < 0 || e.u >= n_vertices || e.v < 0 || e.v >= n_vertices || e.u == e.v)
                throw std::invalid_argument("bad edge endpoints");
            t.adj_[e.u].push_back({e.label, e.v});
            t.adj_[e.v].push_back({e.label, e.u});
        }
        for (auto& a : t.adj_)
            std::sort(a.begin(), a.end(), [](const EdgeRef& x, const EdgeRef& y) { return x.label < y.label; });
        t.check_tree();
        return t;
    }

    int point() const { return point_; }
    int n_vertices() const { return static_cast<int>(adj_.size()); }
    int n_edges() const { return n_vertices() - 1; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    const std::vector<EdgeRef>& neighbors(int v) const { return adj_[v]; }

    std::vector<EdgeSpec> edges() const {
        std::vector<EdgeSpec> out;
        out.reserve(n_edges());
        for (int u = 0; u < n_vertices(); ++u) {
            for (const auto& e : adj_[u]) {
                if (u < e.to) out.push_back({u, e.to, e.label});
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const EdgeSpec& a, const EdgeSpec& b) { return a.label < b.label; });
        return out;
    }

    void scale_labels(double alpha) {
        if (alpha <= 0.0) throw std::domain_error("edge label scale factor must be positive");
        for (auto& a : adj_)
            for (auto& e : a) e.label *= alpha;
    }

private:
    void check_tree() const {
        // Connectivity; acyclicity follows from the edge count.
        std::vector<char> seen(n_vertices(), 0);
        std::vector<int> stack{point_};
        seen[point_] = 1;
        int found = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& e : adj_[u]) {
                if (!seen[e.to]) {
                    seen[e.to] = 1;
                    ++found;
                    stack.push_back(e.to);
                }
            }
        }
        if (found != n_vertices()) throw std::invalid_argument("edges do not form a connected tree");
        std::vector<double> labels;
        labels.reserve(n_edges());
        for (int u = 0; u < n_vertices(); ++u)
            for (const auto& e : adj_[u])
                if (u < e.to) labels.push_back(e.label);
        std::sort(labels.begin(), labels.end());
        if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
            throw std::invalid_argument("edge labels must be pairwise distinct");
    }

    int point_ = 0;
    std::vector<std::vector<EdgeRef>> adj_;
};

// A pointed edge-labelled tree plus a partial injective vertex labelling.
class EVTree {
public:
    EVTree() = default;
    explicit EVTree(PointedELTree tree) : tree_(std::move(tree)) {
        vlabel_.assign(tree_.n_vertices(), kNone);
    }

    const PointedELTree& tree() const { return tree_; }
    int point() const { return tree_.point(); }
    int n_vertices() const { return tree_.n_vertices(); }

    bool has_label(int v) const { return vlabel_[v] != kNone; }
    int label_of(int v) const {
        if (!has_label(v)) throw std::out_of_range("vertex carries no label");
        return vlabel_[v];
    }
    std::optional<int> vertex_of(int label) const {
        const auto it = by_label_.find(label);
        if (it == by_label_.end()) return std::nullopt;
        return it->second;
    }

    void set_label(int v, int label) {
        if (label == kNone) throw std::invalid_argument("reserved vertex label");
        if (by_label_.count(label)) throw std::invalid_argument("duplicate vertex label");
        if (has_label(v)) throw std::invalid_argument("vertex already labelled");
        vlabel_[v] = label;
        by_label_.emplace(label, v);
    }

    int n_labelled() const { return static_cast<int>(by_label_.size()); }
    const std::unordered_map<int, int>& labels() const { return by_label_; }

    void scale_labels(double alpha) { tree_.scale_labels(alpha); }

private:
    static constexpr int kNone = INT32_MIN;

    PointedELTree tree_;
    std::vector<int> vlabel_;
    std::unordered_map<int, int> by_label_;  // label -> vertex
};

// Restriction of an EVTree to the closed h-neighbourhood of the point,
// with vertex ids compacted.
struct Ball {
    EVTree t;
    int radius = 0;
};

// Forgets the planar order of a plane tree, pointing the result at the root.
// Edge and vertex labels are carried through unchanged.
inline EVTree shape(const PlaneTree& p) {
    std::vector<EdgeSpec> edges;
    edges.reserve(p.size() - 1);
    for (int v = 1; v < p.size(); ++v) edges.push_back({p.node(v).parent, v, p.node(v).edge_label});
    EVTree out(p.size() == 1 ? PointedELTree::from_edges(1, 0, {})
                             : PointedELTree::from_edges(p.size(), 0, edges));
    for (int v = 0; v < p.size(); ++v) {
        if (p.node(v).vlabel) out.set_label(v, *p.node(v).vlabel);
    }
    return out;
}

inline EVTree shape(const EVTree& t) { return t; }

inline Ball ball(const EVTree& t, int h) {
    if (h < 0) throw std::domain_error("ball radius must be nonnegative");
    const int n = t.n_vertices();
    std::vector<int> dist(n, -1);
    std::vector<int> order;
    order.reserve(n);
    std::queue<int> q;
    q.push(t.point());
    dist[t.point()] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        order.push_back(u);
        if (dist[u] == h) continue;
        for (const auto& e : t.tree().neighbors(u)) {
            if (dist[e.to] < 0) {
                dist[e.to] = dist[u] + 1;
                q.push(e.to);
            }
        }
    }
    std::vector<int> remap(n, -1);
    for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<int>(i);
    std::vector<EdgeSpec> edges;
    for (int u : order) {
        for (const auto& e : t.tree().neighbors(u)) {
            if (remap[e.to] >= 0 && u < e.to) edges.push_back({remap[u], remap[e.to], e.label});
        }
    }
    Ball b;
    b.radius = h;
    b.t = EVTree(PointedELTree::from_edges(static_cast<int>(order.size()), remap[t.point()], edges));
    for (int u : order) {
        if (t.has_label(u)) b.t.set_label(remap[u], t.label_of(u));
    }
    return b;
}

enum class LabelMode {
    Exact,       // edge labels must match as values
    Compatible,  // edge labels must match in relative order only
};

namespace detail {

inline std::string exact_label_token(double label) {
    // Bit pattern, so that exact-mode comparison is exact value comparison.
    std::uint64_t bits;
    std::memcpy(&bits, &label, sizeof(bits));
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[bits & 0xf];
        bits >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

// Canonical encoding of the subtree hanging at v (rooted at the point):
// vertex label token plus the sorted list of child encodings, each prefixed
// by its edge-label token. Equal encodings <=> label-respecting isomorphism.
inline std::string canonical_encoding(const EVTree& t, LabelMode mode) {
    std::unordered_map<std::int64_t, int> rank;
    if (mode == LabelMode::Compatible) {
        std::vector<double> labels;
        for (const auto& e : t.tree().edges()) labels.push_back(e.label);
        std::sort(labels.begin(), labels.end());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            std::int64_t bits;
            std::memcpy(&bits, &labels[i], sizeof(bits));
            rank[bits] = static_cast<int>(i);
        }
    }
    auto edge_token = [&](double label) {
        if (mode == LabelMode::Exact) return exact_label_token(label);
        std::int64_t bits;
        std::memcpy(&bits, &label, sizeof(bits));
        return std::to_string(rank.at(bits));
    };

    // Iterative post-order; enc[v] is filled once all children are done.
    const int n = t.n_vertices();
    std::vector<std::string> enc(n);
    std::vector<int> parent(n, -1);
    std::vector<std::pair<int, bool>> stack{{t.point(), false}};
    parent[t.point()] = t.point();
    while (!stack.empty()) {
        auto [v, done] = stack.back();
        stack.pop_back();
        if (!done) {
            stack.push_back({v, true});
            for (const auto& e : t.tree().neighbors(v)) {
                if (parent[e.to] < 0) {
                    parent[e.to] = v;
                    stack.push_back({e.to, false});
                }
            }
        } else {
            std::vector<std::string> parts;
            for (const auto& e : t.tree().neighbors(v)) {
                if (parent[e.to] == v && e.to != v)
                    parts.push_back("e" + edge_token(e.label) + enc[e.to]);
            }
            std::sort(parts.begin(), parts.end());
            std::string s = "[";
            s += t.has_label(v) ? std::to_string(t.label_of(v)) : std::string("_");
            s += "](";
            for (const auto& p : parts) s += p;
            s += ")";
            enc[v] = std::move(s);
        }
    }
    return enc[t.point()];
}

} // namespace detail

// True iff there is an isomorphism matching pointed vertices, matching vertex
// labels exactly, and matching edge labels exactly or order-isomorphically.
inline bool balls_agree(const Ball& b1, const Ball& b2, LabelMode mode) {
    if (b1.radius != b2.radius) throw std::invalid_argument("balls_agree needs equal radii");
    return detail::canonical_encoding(b1.t, mode) == detail::canonical_encoding(b2.t, mode);
}

template <typename TreeT>
inline TreeT scale_edge_labels(TreeT t, double alpha) {
    t.scale_labels(alpha);
    return t;
}

inline Ball scale_edge_labels(Ball b, double alpha) {
    b.t.scale_labels(alpha);
    return b;
}

} // namespace minfact
