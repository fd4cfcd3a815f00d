#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include <minfact/bijections.hpp>
#include <minfact/errors.hpp>
#include <minfact/factorization.hpp>
#include <minfact/labelling.hpp>
#include <minfact/rng.hpp>
#include <minfact/tree.hpp>

namespace minfact {

// --- Uniform finite samplers ----------------------------------------------

// Linear-time decode of a Prüfer sequence (entries in 1..n) into tree edges.
inline std::vector<std::pair<int, int>> prufer_decode(const std::vector<int>& code, int n) {
    if (static_cast<int>(code.size()) != n - 2) throw std::invalid_argument("code needs n-2 entries");
    std::vector<int> deg(n + 1, 1);
    for (int x : code) {
        if (x < 1 || x > n) throw std::invalid_argument("code entry out of range");
        ++deg[x];
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(n - 1);
    int ptr = 1;
    while (deg[ptr] != 1) ++ptr;
    int leaf = ptr;
    for (int x : code) {
        edges.emplace_back(leaf, x);
        if (--deg[x] == 1 && x < ptr) {
            leaf = x;
        } else {
            ++ptr;
            while (deg[ptr] != 1) ++ptr;
            leaf = ptr;
        }
    }
    edges.emplace_back(leaf, n);
    return edges;
}

// Uniform over the n^{n-2} Cayley trees, via a uniform Prüfer sequence.
inline CayleyTree sample_cayley(int n, RandomSource& rng) {
    if (n < 2) throw std::domain_error("sample_cayley needs n >= 2");
    std::vector<int> code(n - 2);
    for (auto& x : code) x = static_cast<int>(rng.next_below(n)) + 1;
    CayleyTree c;
    c.n = n;
    c.edges = prufer_decode(code, n);
    return c;
}

inline PointedELTree sample_el_tree(int n, RandomSource& rng) {
    return phi_inverse(sample_cayley(n, rng));
}

// Uniform over all minimal factorizations of (1,2,...,n).
inline Factorization sample_uniform_factorization(int n, RandomSource& rng) {
    return moszkowski_inverse(sample_el_tree(n, rng));
}

// --- Lazy Kesten tree ------------------------------------------------------

// The infinite tree grown on demand: the root is special; special nodes draw
// size-biased Poisson(1) offspring and pass the special mark to a uniformly
// chosen child, normal nodes draw Poisson(1); every edge carries an
// independent uniform [0,1] label. Nodes are expanded at most once, so a
// fixed (seed, stream) reproduces the identical tree regardless of how much
// of it a caller explores.
class LazyKestenTree {
public:
    explicit LazyKestenTree(RandomSource rng) : rng_(rng) {
        nodes_.emplace_back();
        nodes_[0].special = true;
    }
    LazyKestenTree(std::uint64_t seed, std::uint64_t stream) : LazyKestenTree(RandomSource(seed, stream)) {}

    int point() const { return 0; }
    int n_nodes() const { return static_cast<int>(nodes_.size()); }
    bool is_special(int v) const { return nodes_.at(v).special; }
    int parent(int v) const { return nodes_.at(v).parent; }
    bool expanded(int v) const { return nodes_.at(v).expanded; }

    // Materialized children of v, drawing them on first call.
    std::vector<int> children(int v) {
        expand(v);
        std::vector<int> out;
        out.reserve(nodes_[v].n_children);
        for (int c = nodes_[v].first_child; c < nodes_[v].first_child + nodes_[v].n_children; ++c)
            out.push_back(c);
        return out;
    }

    int offspring_count(int v) {
        expand(v);
        return nodes_[v].n_children;
    }

    int degree(int v) {
        expand(v);
        return static_cast<int>(nodes_[v].incident.size());
    }

    const std::vector<EdgeRef>& incident(int v) {
        expand(v);
        return nodes_[v].incident;
    }

private:
    struct Node {
        int parent = -1;
        double parent_label = 0.0;
        int first_child = -1;
        int n_children = 0;
        bool special = false;
        bool expanded = false;
        std::vector<EdgeRef> incident;  // sorted by label once expanded
    };

    void expand(int v) {
        Node& node = nodes_[v];
        if (node.expanded) return;
        // Draw order (fixed): offspring count, then one label per child,
        // then the special-child index when v is special.
        const int k = node.special ? rng_.next_size_biased_poisson1() : rng_.next_poisson1();
        std::vector<double> labels(k);
        for (auto& l : labels) l = rng_.next_double();
        int special_child = -1;
        if (node.special) special_child = static_cast<int>(rng_.next_below(static_cast<std::uint64_t>(k)));
        const int first = static_cast<int>(nodes_.size());
        node.expanded = true;
        node.first_child = first;
        node.n_children = k;
        node.incident.reserve(k + (node.parent >= 0 ? 1 : 0));
        if (node.parent >= 0) node.incident.push_back({node.parent_label, node.parent});
        for (int c = 0; c < k; ++c) node.incident.push_back({labels[c], first + c});
        std::sort(nodes_[v].incident.begin(), nodes_[v].incident.end(),
                  [](const EdgeRef& a, const EdgeRef& b) { return a.label < b.label; });
        for (std::size_t i = 1; i < nodes_[v].incident.size(); ++i) {
            if (nodes_[v].incident[i].label == nodes_[v].incident[i - 1].label)
                throw std::logic_error("uniform edge labels collided");
        }
        const bool parent_special = nodes_[v].special;
        for (int c = 0; c < k; ++c) {
            Node child;
            child.parent = v;
            child.parent_label = labels[c];
            child.special = parent_special && c == special_child;
            nodes_.push_back(std::move(child));
        }
    }

    RandomSource rng_;
    std::vector<Node> nodes_;
};

inline std::vector<int> kesten_expand(LazyKestenTree& t, int v) { return t.children(v); }

// --- Limit labelling and trajectories --------------------------------------

// Piecewise-constant limit trajectory on [0,1]: value values[j] holds on
// [breaks[j], breaks[j+1]) with an implicit closing breakpoint at 2, so that
// the value at t=1 is start+1.
struct LimitTrajectory {
    int start = 0;
    std::vector<double> breaks;  // breaks[0] == 0, strictly increasing
    std::vector<int> values;     // same length; values[0] == start, back() == start+1

    int at(double t) const {
        if (t < 0.0 || t > 1.0) throw std::out_of_range("limit trajectory time outside [0,1]");
        const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
        return values[static_cast<std::size_t>(it - breaks.begin()) - 1];
    }
    int jumps() const { return static_cast<int>(breaks.size()) - 1; }
};

// One labelling run on a lazy Kesten tree: find walks assign 2..K+1 and
// ofind walks assign 0..-K, expanding the tree on demand. The run object
// keeps all state, so a budget overrun leaves the partial fragment intact
// in the caller's hands.
class KestenRun {
public:
    static constexpr long long kDefaultStepBudget = 1'000'000;
    static constexpr int kDefaultNodeBudget = 1'000'000;

    KestenRun(std::uint64_t seed, std::uint64_t stream, long long step_budget = kDefaultStepBudget,
              int node_budget = kDefaultNodeBudget)
        : tree_(seed, stream), budget_(step_budget), node_budget_(node_budget) {
        assign(0, 1);
        find_at_ = 0;
        ofind_at_ = 0;
    }

    // Extends the labelling until every label in -K..K+1 is assigned. Label
    // values on a walk can be astronomically large in rare draws (fringe
    // subtree sizes are heavy-tailed), so growth is capped by a node budget;
    // overruns raise a resource error and leave the partial fragment intact.
    void extend_to(int K) {
        if (K < 1) throw std::invalid_argument("extend_to needs K >= 1");
        Access acc{tree_};
        while (find_hi_ < K + 1) {
            check_node_budget_();
            WalkTrace trace;
            trace.assigned_label = find_hi_ + 1;
            long long budget = budget_;
            const int dest = detail::walk_increasing(acc, find_at_, budget, &trace);
            if (has_label(dest)) throw std::logic_error("find walk hit a labelled vertex");
            assign(dest, ++find_hi_);
            record_(std::move(trace));
            find_at_ = dest;
        }
        while (ofind_lo_ > -K) {
            check_node_budget_();
            WalkTrace trace;
            trace.assigned_label = ofind_lo_ - 1;
            long long budget = budget_;
            const int dest = detail::walk_decreasing(acc, ofind_at_, budget, &trace);
            if (has_label(dest)) throw std::logic_error("ofind walk hit a labelled vertex");
            assign(dest, --ofind_lo_);
            record_(std::move(trace));
            ofind_at_ = dest;
        }
        K_ = std::max(K_, K);
    }

    int K() const { return K_; }
    LazyKestenTree& tree() { return tree_; }
    const LazyKestenTree& tree() const { return tree_; }

    bool has_label(int v) const {
        return v < static_cast<int>(vlabel_.size()) && vlabel_[v] != kNone;
    }
    int label_of(int v) const {
        if (!has_label(v)) throw ordering_error("vertex not labelled yet");
        return vlabel_[v];
    }
    std::optional<int> vertex_of(int label) const {
        const auto it = by_label_.find(label);
        if (it == by_label_.end()) return std::nullopt;
        return it->second;
    }
    const std::unordered_map<int, int>& labels() const { return by_label_; }

    // Walk that assigned `label` (a find label >= 2 or an ofind label <= 0).
    const WalkTrace& walk_for(int label) const {
        const auto it = walk_index_.find(label);
        if (it == walk_index_.end()) throw ordering_error("walk not run yet; raise K");
        return traces_[it->second];
    }
    const std::vector<WalkTrace>& traces() const { return traces_; }

    bool trajectory_ready(int i) const {
        const auto it = walk_index_.find(i >= 1 ? i + 1 : i);
        if (it == walk_index_.end()) return false;
        for (int v : traces_[it->second].vertices) {
            if (!has_label(v)) return false;
        }
        return true;
    }

    // Trajectory of i: the labels of the vertices visited by the walk that
    // joined i to i+1, with the crossed edge labels as breakpoints. For
    // nonpositive i the ofind walk ran from i+1 down to i, so it is reversed.
    LimitTrajectory trajectory(int i) const {
        const WalkTrace& w = walk_for(i >= 1 ? i + 1 : i);
        LimitTrajectory t;
        t.start = i;
        t.breaks.push_back(0.0);
        if (i >= 1) {
            for (int v : w.vertices) t.values.push_back(label_of(v));
            t.breaks.insert(t.breaks.end(), w.edge_labels.begin(), w.edge_labels.end());
        } else {
            for (auto it = w.vertices.rbegin(); it != w.vertices.rend(); ++it)
                t.values.push_back(label_of(*it));
            t.breaks.insert(t.breaks.end(), w.edge_labels.rbegin(), w.edge_labels.rend());
        }
        return t;
    }

    // Doubles K until the trajectory of i is fully labelled.
    void ensure_trajectory(int i) {
        int K = std::max({K_, std::abs(i), 1});
        while (!trajectory_ready(i)) {
            extend_to(K);
            if (trajectory_ready(i)) break;
            K *= 2;
        }
    }

    // Indices of all trajectories entering the band [-A, A], grown
    // geometrically in K until stable across one doubling.
    std::vector<int> entering_indices(int A) {
        if (A < 1) throw std::domain_error("band half-width must be >= 1");
        int K = std::max({K_, A, 2});
        extend_to(K);
        std::vector<int> prev = scan_entering_(K, A);
        for (;;) {
            K *= 2;
            extend_to(K);
            std::vector<int> cur = scan_entering_(K, A);
            if (cur == prev) return cur;
            prev = std::move(cur);
        }
    }

private:
    static constexpr int kNone = INT32_MIN;

    struct Access {
        LazyKestenTree& t;
        int point() const { return t.point(); }
        const std::vector<EdgeRef>& incident(int v) { return t.incident(v); }
    };

    void check_node_budget_() const {
        if (tree_.n_nodes() > node_budget_)
            throw resource_error("limit run exceeded its node budget");
    }

    void assign(int v, int label) {
        if (v >= static_cast<int>(vlabel_.size())) vlabel_.resize(v + 1, kNone);
        if (vlabel_[v] != kNone) throw std::logic_error("vertex labelled twice");
        vlabel_[v] = label;
        by_label_.emplace(label, v);
    }

    void record_(WalkTrace trace) {
        walk_index_.emplace(trace.assigned_label, static_cast<int>(traces_.size()));
        traces_.push_back(std::move(trace));
    }

    std::vector<int> scan_entering_(int K, int A) const {
        std::vector<int> in;
        for (int i = -K; i <= K; ++i) {
            bool enters = false;
            for (int v : walk_for(i >= 1 ? i + 1 : i).vertices) {
                if (has_label(v) && std::abs(vlabel_[v]) <= A) {
                    enters = true;
                    break;
                }
            }
            if (enters) in.push_back(i);
        }
        return in;
    }

    LazyKestenTree tree_;
    long long budget_;
    int node_budget_;
    int K_ = 0;
    int find_hi_ = 1;   // highest find label assigned so far
    int ofind_lo_ = 1;  // lowest ofind label assigned (1 until the first walk)
    int find_at_ = 0;   // vertex carrying find_hi_
    int ofind_at_ = 0;  // vertex carrying ofind_lo_
    std::vector<int> vlabel_;
    std::unordered_map<int, int> by_label_;
    std::unordered_map<int, int> walk_index_;
    std::vector<WalkTrace> traces_;
};

// Fresh labelling run with every label in -K..K+1 assigned: the labelled
// fragment, the walk traces and the lazily grown tree travel together in the
// returned run object.
inline KestenRun limit_labels(std::uint64_t seed, std::uint64_t stream, int K,
                              long long step_budget = KestenRun::kDefaultStepBudget) {
    KestenRun run(seed, stream, step_budget);
    run.extend_to(K);
    return run;
}

// --- Fast per-sample local statistics ---------------------------------------
//
// The Monte Carlo drivers need, per uniform factorization of large size n,
// only a handful of local quantities. This path samples the tree directly
// with reusable flat buffers and interleaves find/ofind walks with an early
// stop, instead of materializing the factorization.

struct LocalStats {
    int t1 = 0;               // transpositions containing 1 (= degree of the point)
    int m1 = 0;               // trajectory jumps of 1 (= distance from label 1 to label 2)
    int t2 = 0;               // transpositions containing 2
    bool stays_positive = false;  // recentered trajectory of 1 never drops below 1
};

class LocalStatsSampler {
public:
    explicit LocalStatsSampler(int n) : n_(n) {
        if (n < 4) throw std::domain_error("local stats sampler needs n >= 4");
        code_.resize(n - 2);
        deg_.resize(n + 1);
        parent_.assign(n + 1, 0);
        order_.reserve(n);
        off_.resize(n + 2);
        cursor_.resize(n + 1);
        adj_label_.resize(2 * (n - 1));
        adj_to_.resize(2 * (n - 1));
        vlabel_.resize(n + 1);
    }

    LocalStats sample(RandomSource& rng) {
        build_tree_(rng);
        LocalStats s;
        s.t1 = off_[2] - off_[1];

        // Find walk for label 2 from the point; path_ collects the inner
        // vertices of the tree path from label 1 to label 2.
        path_.clear();
        const int v2 = walk_(1, true, &path_);
        s.m1 = static_cast<int>(path_.size()) + 1;
        s.t2 = off_[v2 + 1] - off_[v2];

        // The trajectory of 1 stays >= 1 iff every inner vertex of that path
        // receives a positive label, i.e. is reached by find rather than
        // ofind. Alternate walks from both procedures and stop as soon as
        // the inner path vertices are decided.
        std::fill(vlabel_.begin(), vlabel_.end(), 0);
        vlabel_[1] = 1;
        vlabel_[v2] = 2;
        int pending = 0;
        for (int v : path_) {
            vlabel_[v] = -n_;  // sentinel: undecided inner path vertex
            ++pending;
        }
        if (pending == 0) {
            s.stays_positive = true;
            return s;
        }
        int find_label = 2, find_at = v2;
        int ofind_label = 1, ofind_at = 1;
        const int find_last = n_ / 2;
        const int ofind_last = -((n_ - 1) / 2);
        bool positive = true;
        while (pending > 0) {
            if (find_label < find_last) {
                const int dest = walk_(find_at, true, nullptr);
                if (vlabel_[dest] == -n_) --pending;
                vlabel_[dest] = ++find_label;
                find_at = dest;
            }
            if (pending == 0) break;
            if (ofind_label > ofind_last) {
                const int dest = walk_(ofind_at, false, nullptr);
                if (vlabel_[dest] == -n_) {
                    positive = false;
                    break;
                }
                vlabel_[dest] = --ofind_label;
                ofind_at = dest;
            }
            if (find_label >= find_last && ofind_label <= ofind_last)
                throw std::logic_error("relabelling exhausted without covering the path");
        }
        s.stays_positive = positive;
        return s;
    }

private:
    // Uniform Cayley tree rooted at vertex 1, stored as label-sorted CSR
    // adjacency of the corresponding pointed edge-labelled tree (the edge
    // below vertex v carries label v-1).
    void build_tree_(RandomSource& rng) {
        const int n = n_;
        for (auto& x : code_) x = static_cast<int>(rng.next_below(n)) + 1;
        std::fill(deg_.begin(), deg_.end(), 1);
        for (int x : code_) ++deg_[x];
        // Prüfer decode; edges accumulated as child lists via parent_ after rooting.
        edges_u_.clear();
        edges_v_.clear();
        int ptr = 1;
        while (deg_[ptr] != 1) ++ptr;
        int leaf = ptr;
        for (int x : code_) {
            edges_u_.push_back(leaf);
            edges_v_.push_back(x);
            if (--deg_[x] == 1 && x < ptr) {
                leaf = x;
            } else {
                ++ptr;
                while (deg_[ptr] != 1) ++ptr;
                leaf = ptr;
            }
        }
        edges_u_.push_back(leaf);
        edges_v_.push_back(n);

        // Unlabelled adjacency in CSR form, then a BFS from vertex 1.
        std::fill(deg_.begin(), deg_.end(), 0);
        for (std::size_t i = 0; i < edges_u_.size(); ++i) {
            ++deg_[edges_u_[i]];
            ++deg_[edges_v_[i]];
        }
        off_[0] = off_[1] = 0;
        for (int v = 1; v <= n; ++v) off_[v + 1] = off_[v] + deg_[v];
        std::copy(off_.begin() + 1, off_.begin() + n + 1, cursor_.begin() + 1);
        for (std::size_t i = 0; i < edges_u_.size(); ++i) {
            adj_to_[cursor_[edges_u_[i]]++] = edges_v_[i];
            adj_to_[cursor_[edges_v_[i]]++] = edges_u_[i];
        }
        order_.clear();
        order_.push_back(1);
        std::fill(parent_.begin(), parent_.end(), 0);
        parent_[1] = 1;
        for (std::size_t head = 0; head < order_.size(); ++head) {
            const int u = order_[head];
            for (int k = off_[u]; k < off_[u + 1]; ++k) {
                const int w = adj_to_[k];
                if (!parent_[w]) {
                    parent_[w] = u;
                    order_.push_back(w);
                }
            }
        }

        // Edge below v gets label v-1; filling in increasing v keeps every
        // adjacency slice sorted by label.
        std::copy(off_.begin() + 1, off_.begin() + n + 1, cursor_.begin() + 1);
        for (int v = 2; v <= n; ++v) {
            const double label = v - 1;
            const int p = parent_[v];
            adj_label_[cursor_[v]] = label;
            adj_to_[cursor_[v]++] = p;
            adj_label_[cursor_[p]] = label;
            adj_to_[cursor_[p]++] = v;
        }
    }

    // Monotone label walk on the CSR adjacency. Collects inner path vertices
    // when `path` is given (excluding start and destination).
    int walk_(int start, bool increasing, std::vector<int>* path) {
        int cur = start;
        double last = 0.0;
        bool first = true;
        for (;;) {
            const int lo = off_[cur], hi = off_[cur + 1];
            int step = -1;
            if (increasing) {
                if (first) {
                    if (lo < hi) step = lo;
                } else {
                    int a = lo, b = hi;
                    while (a < b) {
                        const int mid = (a + b) / 2;
                        if (adj_label_[mid] > last) b = mid; else a = mid + 1;
                    }
                    if (a < hi) step = a;
                }
            } else {
                if (first) {
                    if (lo < hi) step = hi - 1;
                } else {
                    int a = lo, b = hi;
                    while (a < b) {
                        const int mid = (a + b) / 2;
                        if (adj_label_[mid] < last) a = mid + 1; else b = mid;
                    }
                    if (a > lo) step = a - 1;
                }
            }
            if (step < 0) break;
            if (path && !first) path->push_back(cur);
            last = adj_label_[step];
            cur = adj_to_[step];
            first = false;
        }
        return cur;
    }

    int n_;
    std::vector<int> code_, deg_, parent_, order_, cursor_;
    std::vector<int> off_;
    std::vector<int> edges_u_, edges_v_;
    std::vector<double> adj_label_;
    std::vector<int> adj_to_;
    std::vector<int> vlabel_;
    std::vector<int> path_;
};

// Local statistics of one Kesten-tree sample: the root degree, the distance
// from label 1 to label 2 and the degree of the vertex labelled 2, read off
// a single find walk with lazy expansion.
struct KestenLocalStats {
    int root_degree = 0;
    int dist12 = 0;
    int deg_u2 = 0;
};

inline KestenLocalStats sample_kesten_local_stats(RandomSource rng) {
    LazyKestenTree t(rng);
    struct Access {
        LazyKestenTree& t;
        int point() const { return t.point(); }
        const std::vector<EdgeRef>& incident(int v) { return t.incident(v); }
    } acc{t};
    KestenLocalStats s;
    s.root_degree = t.degree(0);
    WalkTrace trace;
    long long budget = KestenRun::kDefaultStepBudget;
    const int v2 = detail::walk_increasing(acc, 0, budget, &trace);
    s.dist12 = static_cast<int>(trace.edge_labels.size());
    s.deg_u2 = t.degree(v2);
    return s;
}

} // namespace minfact
