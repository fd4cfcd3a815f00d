#pragma once

#include <algorithm>
#include <climits>
#include <stdexcept>
#include <string>
#include <vector>

#include <minfact/errors.hpp>
#include <minfact/tree.hpp>

namespace minfact {

// One relabelling walk: the visited vertices and the labels of the crossed
// edges, in walk order. Along a find walk the edge labels strictly increase;
// along an ofind walk they strictly decrease.
struct WalkTrace {
    int assigned_label = 0;
    std::vector<int> vertices;      // walk order; front() is the start vertex
    std::vector<double> edge_labels;  // one fewer entry than vertices
};

inline std::string to_string(const WalkTrace& w) {
    std::string s = "i=" + std::to_string(w.assigned_label) +
                    " K=" + std::to_string(w.edge_labels.size()) + " vertices=";
    for (std::size_t j = 0; j < w.vertices.size(); ++j) {
        if (j) s += ',';
        s += std::to_string(w.vertices[j]);
    }
    s += " labels=";
    for (std::size_t j = 0; j < w.edge_labels.size(); ++j) {
        if (j) s += ',';
        s += std::to_string(w.edge_labels[j]);
    }
    return s;
}

// The walkers are generic over two small interfaces so that the same code
// runs on finite trees and on the lazily grown infinite tree.
//
// Access:
//   int point();
//   const std::vector<EdgeRef>& incident(int v);   // sorted by label ascending;
//                                                  // may materialize children on demand
// Sink:
//   bool  has_label(int v);
//   int   label_of(int v);
//   void  assign(int v, int label);

namespace detail {

// Crosses edges with strictly increasing labels starting from `start` (the
// first step is unconstrained), until no strictly larger incident label
// exists. Returns the terminal vertex.
template <typename Access>
int walk_increasing(Access& acc, int start, long long& budget, WalkTrace* trace) {
    int cur = start;
    double last = 0.0;
    bool first = true;
    if (trace) trace->vertices.push_back(cur);
    for (;;) {
        const auto& inc = acc.incident(cur);
        const EdgeRef* step = nullptr;
        if (first) {
            if (!inc.empty()) step = &inc.front();
        } else {
            const auto it = std::upper_bound(
                inc.begin(), inc.end(), last,
                [](double x, const EdgeRef& e) { return x < e.label; });
            if (it != inc.end()) step = &*it;
        }
        if (!step) return cur;
        if (--budget < 0) throw resource_error("label walk exceeded its step budget");
        last = step->label;
        cur = step->to;
        first = false;
        if (trace) {
            trace->vertices.push_back(cur);
            trace->edge_labels.push_back(last);
        }
    }
}

// Mirror image: strictly decreasing labels, largest incident edge first.
template <typename Access>
int walk_decreasing(Access& acc, int start, long long& budget, WalkTrace* trace) {
    int cur = start;
    double last = 0.0;
    bool first = true;
    if (trace) trace->vertices.push_back(cur);
    for (;;) {
        const auto& inc = acc.incident(cur);
        const EdgeRef* step = nullptr;
        if (first) {
            if (!inc.empty()) step = &inc.back();
        } else {
            const auto it = std::lower_bound(
                inc.begin(), inc.end(), last,
                [](const EdgeRef& e, double x) { return e.label < x; });
            if (it != inc.begin()) step = &*(it - 1);
        }
        if (!step) return cur;
        if (--budget < 0) throw resource_error("label walk exceeded its step budget");
        last = step->label;
        cur = step->to;
        first = false;
        if (trace) {
            trace->vertices.push_back(cur);
            trace->edge_labels.push_back(last);
        }
    }
}

} // namespace detail

// Assigns labels start_label+1 .. last_label by successive increasing-label
// walks; the walk for label i+1 starts at the vertex carrying i, which is
// `start_vertex` for the first walk and the previous destination afterwards.
template <typename Access, typename Sink>
void run_find(Access& acc, Sink& sink, int start_vertex, int start_label, int last_label,
              long long step_budget, std::vector<WalkTrace>* traces = nullptr) {
    int cur = start_vertex;
    for (int label = start_label + 1; label <= last_label; ++label) {
        WalkTrace trace;
        trace.assigned_label = label;
        long long budget = step_budget;
        const int dest = detail::walk_increasing(acc, cur, budget, traces ? &trace : nullptr);
        if (sink.has_label(dest))
            throw std::invalid_argument("find walk reached an already labelled vertex");
        sink.assign(dest, label);
        if (traces) traces->push_back(std::move(trace));
        cur = dest;
    }
}

// Assigns labels start_label-1 .. last_label (nonpositive) by successive
// decreasing-label walks. The one legitimate early stop is a walk that wraps
// around to the point, which keeps its label 1; the run ends there.
template <typename Access, typename Sink>
void run_ofind(Access& acc, Sink& sink, int start_vertex, int start_label, int last_label,
               long long step_budget, std::vector<WalkTrace>* traces = nullptr) {
    int cur = start_vertex;
    for (int label = start_label - 1; label >= last_label; --label) {
        WalkTrace trace;
        trace.assigned_label = label;
        long long budget = step_budget;
        const int dest = detail::walk_decreasing(acc, cur, budget, traces ? &trace : nullptr);
        if (sink.has_label(dest)) {
            if (dest == acc.point() && sink.label_of(dest) == 1) return;
            throw std::invalid_argument("ofind walk reached an already labelled vertex");
        }
        sink.assign(dest, label);
        if (traces) traces->push_back(std::move(trace));
        cur = dest;
    }
}

namespace detail {

struct ELTreeAccess {
    const PointedELTree& t;
    int point() const { return t.point(); }
    const std::vector<EdgeRef>& incident(int v) const { return t.neighbors(v); }
};

struct EVTreeSink {
    EVTree& t;
    bool has_label(int v) const { return t.has_label(v); }
    int label_of(int v) const { return t.label_of(v); }
    void assign(int v, int label) { t.set_label(v, label); }
};

inline void seed_point_label(EVTree& t) {
    if (t.has_label(t.point())) {
        if (t.label_of(t.point()) != 1)
            throw std::invalid_argument("pointed vertex must be unlabelled or labelled 1");
    } else {
        t.set_label(t.point(), 1);
    }
}

} // namespace detail

struct RelabelResult {
    EVTree t;
    std::vector<WalkTrace> traces;  // in assignment order
};

// Find_k: labels the point 1, then assigns 2..k, each by walking from the
// previous label across the smallest incident edge and then repeatedly across
// the smallest incident edge larger than the one just crossed.
inline RelabelResult find_k(EVTree t, int k) {
    if (k < 1) throw std::invalid_argument("find_k needs k >= 1");
    if (k > t.n_vertices()) throw std::out_of_range("find_k needs at least k vertices");
    detail::seed_point_label(t);
    RelabelResult out{std::move(t), {}};
    detail::ELTreeAccess acc{out.t.tree()};
    detail::EVTreeSink sink{out.t};
    run_find(acc, sink, out.t.point(), 1, k, LLONG_MAX, &out.traces);
    return out;
}

inline RelabelResult find_k(const PointedELTree& t, int k) { return find_k(EVTree(t), k); }

// OFind_k: the dual procedure with the edge-label order reversed. Starting
// from the point it assigns the k+1 labels 0, -1, ..., -k.
inline RelabelResult ofind_k(EVTree t, int k) {
    if (k < 0) throw std::invalid_argument("ofind_k needs k >= 0");
    if (k > t.n_vertices() - 1) throw std::out_of_range("ofind_k needs more vertices");
    detail::seed_point_label(t);
    RelabelResult out{std::move(t), {}};
    detail::ELTreeAccess acc{out.t.tree()};
    detail::EVTreeSink sink{out.t};
    run_ofind(acc, sink, out.t.point(), 1, -k, LLONG_MAX, &out.traces);
    return out;
}

inline RelabelResult ofind_k(const PointedELTree& t, int k) { return ofind_k(EVTree(t), k); }

struct FullRelabelResult {
    EVTree t;
    std::vector<WalkTrace> ofind_traces;
    std::vector<WalkTrace> find_traces;
};

// Composition ofind_{floor((n-1)/2)} then find_{floor(n/2)}: every vertex ends
// up labelled, with labels exactly {-floor((n-1)/2), ..., floor(n/2)}.
inline FullRelabelResult full_relabel(const PointedELTree& t) {
    const int n = t.n_vertices();
    if (n < 2) throw std::invalid_argument("full_relabel needs at least two vertices");
    FullRelabelResult out{EVTree(t), {}, {}};
    detail::seed_point_label(out.t);
    detail::ELTreeAccess acc{out.t.tree()};
    detail::EVTreeSink sink{out.t};
    run_ofind(acc, sink, out.t.point(), 1, -((n - 1) / 2), LLONG_MAX, &out.ofind_traces);
    run_find(acc, sink, out.t.point(), 1, n / 2, LLONG_MAX, &out.find_traces);
    if (out.t.n_labelled() != n)
        throw std::logic_error("full relabelling failed to cover every vertex");
    return out;
}

} // namespace minfact
