#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <minfact/factorization.hpp>
#include <minfact/labelling.hpp>
#include <minfact/tree.hpp>

namespace minfact {

// Labelled tree on vertex set {1..n}, no edge labels.
struct CayleyTree {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    void validate() const {
        if (n < 2) throw std::invalid_argument("cayley tree needs n >= 2");
        if (static_cast<int>(edges.size()) != n - 1)
            throw std::invalid_argument("cayley tree needs n-1 edges");
        for (auto [u, v] : edges) {
            if (u < 1 || u > n || v < 1 || v > n || u == v)
                throw std::invalid_argument("cayley tree labels must lie in 1..n");
        }
    }

    friend bool operator==(const CayleyTree&, const CayleyTree&) = default;
};

namespace detail {

inline int exact_int_label(double label) {
    const double r = std::round(label);
    if (r != label) throw std::invalid_argument("edge label is not an integer");
    return static_cast<int>(r);
}

// Parent array of the tree rooted at its point.
inline std::vector<int> bfs_parents(const PointedELTree& t) {
    std::vector<int> parent(t.n_vertices(), -1);
    std::vector<int> stack{t.point()};
    parent[t.point()] = t.point();
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& e : t.neighbors(u)) {
            if (parent[e.to] < 0) {
                parent[e.to] = u;
                stack.push_back(e.to);
            }
        }
    }
    parent[t.point()] = -1;
    return parent;
}

} // namespace detail

// Reads a factorization off a fully labelled tree: the transposition at
// position i is the pair of vertex labels at the ends of the edge labelled i.
// The product is an n-cycle, but not necessarily (1,2,...,n).
inline Factorization denes_to_factorization(const EVTree& t) {
    const int n = t.n_vertices();
    if (t.n_labelled() != n) throw std::invalid_argument("denes readout needs all vertices labelled");
    std::vector<Transposition> taus;
    taus.reserve(n - 1);
    auto edges = t.tree().edges();  // sorted by label
    for (int i = 0; i < n - 1; ++i) {
        if (detail::exact_int_label(edges[i].label) != i + 1)
            throw std::invalid_argument("edge labels must be exactly 1..n-1");
        taus.emplace_back(t.label_of(edges[i].u), t.label_of(edges[i].v));
    }
    return Factorization(n, std::move(taus), false);
}

// The fully labelled tree of a plain factorization: vertex labels 1..n, edge i
// joining the two labels of the i-th transposition, pointed at vertex 1.
inline EVTree factorization_tree(const Factorization& f) {
    if (f.tilde) throw std::invalid_argument("factorization_tree expects a plain factorization");
    f.validate();
    std::vector<EdgeSpec> edges;
    edges.reserve(f.taus.size());
    for (std::size_t i = 0; i < f.taus.size(); ++i)
        edges.push_back({f.taus[i].a - 1, f.taus[i].b - 1, static_cast<double>(i + 1)});
    EVTree out(PointedELTree::from_edges(f.n, 0, edges));
    for (int v = 0; v < f.n; ++v) out.set_label(v, v + 1);
    return out;
}

// Same tree with the vertex labels forgotten, keeping the point at the old
// vertex 1. Requires a minimal factorization (otherwise the edge multiset
// need not form a tree).
inline PointedELTree moszkowski_forward(const Factorization& f) {
    if (f.tilde) throw std::invalid_argument("moszkowski_forward expects a plain factorization");
    if (!is_minimal(f)) throw std::invalid_argument("factorization is not minimal");
    std::vector<EdgeSpec> edges;
    edges.reserve(f.taus.size());
    for (std::size_t i = 0; i < f.taus.size(); ++i)
        edges.push_back({f.taus[i].a - 1, f.taus[i].b - 1, static_cast<double>(i + 1)});
    return PointedELTree::from_edges(f.n, 0, edges);
}

// Inverse direction: recover the vertex labels with find_n, then apply the
// Dénes readout. The result is always a minimal factorization of (1,2,...,n).
inline Factorization moszkowski_inverse(const PointedELTree& t) {
    const int n = t.n_vertices();
    if (n < 2) throw std::invalid_argument("needs at least two vertices");
    Factorization f = denes_to_factorization(find_k(t, n).t);
    if (!is_minimal(f)) throw std::logic_error("relabelled tree did not yield a minimal factorization");
    return f;
}

// Pointed edge-labelled trees (labels 1..n-1) correspond to Cayley trees:
// the point becomes vertex 1 and every other vertex takes the label of its
// point-side edge, plus one.
inline CayleyTree phi(const PointedELTree& t) {
    const int n = t.n_vertices();
    const auto parent = detail::bfs_parents(t);
    std::vector<int> vlabel(n, 1);
    for (int v = 0; v < n; ++v) {
        if (v == t.point()) continue;
        for (const auto& e : t.neighbors(v)) {
            if (e.to == parent[v]) {
                vlabel[v] = detail::exact_int_label(e.label) + 1;
                break;
            }
        }
    }
    CayleyTree c;
    c.n = n;
    for (int v = 0; v < n; ++v) {
        if (v != t.point())
            c.edges.emplace_back(std::min(vlabel[v], vlabel[parent[v]]),
                                 std::max(vlabel[v], vlabel[parent[v]]));
    }
    std::sort(c.edges.begin(), c.edges.end());
    c.validate();
    return c;
}

inline PointedELTree phi_inverse(const CayleyTree& c) {
    c.validate();
    std::vector<std::vector<int>> adj(c.n + 1);
    for (auto [u, v] : c.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> parent(c.n + 1, 0);
    std::vector<int> stack{1};
    parent[1] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int w : adj[u]) {
            if (!parent[w]) {
                parent[w] = u;
                stack.push_back(w);
            }
        }
    }
    std::vector<EdgeSpec> edges;
    edges.reserve(c.n - 1);
    for (int v = 2; v <= c.n; ++v) {
        if (!parent[v]) throw std::invalid_argument("cayley tree is not connected");
        edges.push_back({v - 1, parent[v] - 1, static_cast<double>(v - 1)});
    }
    return PointedELTree::from_edges(c.n, 0, edges);
}

// --- Circular embedding and the duality bijection -------------------------
//
// The tree of a minimal factorization is drawn in the closed disk with vertex
// j at circle position j (positions run clockwise). Chords then do not cross
// and each face of the complement contains exactly one boundary arc (j,j+1).

struct Face {
    int arc = 0;                   // the unique arc (j, j+1) on this face, 1-based, n+1 == 1
    std::vector<int> edge_labels;  // boundary chord labels, clockwise from the arc (strictly decreasing)
};

struct CircularEmbedding {
    int n = 0;
    std::vector<Face> faces;                        // faces[j-1] is the face at arc j
    std::vector<std::pair<int, int>> chord_faces;   // chord_faces[l-1]: arcs of the two faces
                                                    // separated by the chord labelled l
};

// Faces by corner traversal of the rotation system. The rotation order around
// each vertex is arithmetic (sorted by circular gap to the far endpoint), so
// no floating-point geometry is involved. Crossing chords are detected as a
// wrong face count.
inline CircularEmbedding compute_faces(const Factorization& f) {
    if (f.tilde) throw std::invalid_argument("compute_faces expects a plain factorization");
    f.validate();
    const int n = f.n;
    const int m = n - 1;  // chords
    // Darts: chord i (0-based) has darts 2i (a->b) and 2i+1 (b->a);
    // arc j (1-based, joining j and j%n+1) has darts B+2(j-1) and its reverse.
    const int B = 2 * m;
    const int n_darts = B + 2 * n;
    std::vector<int> dart_from(n_darts), dart_to(n_darts);
    for (int i = 0; i < m; ++i) {
        dart_from[2 * i] = f.taus[i].a;
        dart_to[2 * i] = f.taus[i].b;
        dart_from[2 * i + 1] = f.taus[i].b;
        dart_to[2 * i + 1] = f.taus[i].a;
    }
    for (int j = 1; j <= n; ++j) {
        const int d = B + 2 * (j - 1);
        dart_from[d] = j;
        dart_to[d] = j % n + 1;
        dart_from[d + 1] = j % n + 1;
        dart_to[d + 1] = j;
    }

    // Clockwise rotation at vertex v: the outgoing arc dart towards v+1,
    // chords by increasing gap, then the arc dart back towards v-1.
    std::vector<std::vector<int>> rotation(n + 1);
    for (int v = 1; v <= n; ++v) rotation[v].push_back(B + 2 * (v - 1));
    std::vector<std::vector<std::pair<int, int>>> chords_at(n + 1);  // (gap, dart)
    for (int i = 0; i < m; ++i) {
        for (int d : {2 * i, 2 * i + 1}) {
            const int v = dart_from[d];
            const int gap = ((dart_to[d] - v) % n + n) % n;
            chords_at[v].push_back({gap, d});
        }
    }
    for (int v = 1; v <= n; ++v) {
        auto& cs = chords_at[v];
        std::sort(cs.begin(), cs.end());
        for (std::size_t i = 1; i < cs.size(); ++i) {
            if (cs[i].first == cs[i - 1].first)
                throw std::invalid_argument("parallel chords between the same endpoints");
        }
        for (auto [gap, d] : cs) rotation[v].push_back(d);
        const int prev = (v + n - 2) % n + 1;  // arc prev joins prev -> v
        rotation[v].push_back(B + 2 * (prev - 1) + 1);
    }
    std::vector<int> pos(n_darts);
    for (int v = 1; v <= n; ++v) {
        for (std::size_t i = 0; i < rotation[v].size(); ++i) pos[rotation[v][i]] = static_cast<int>(i);
    }

    // Face orbits of d -> rotation[to(d)] entry after reverse(d).
    auto next_dart = [&](int d) {
        const int r = d ^ 1;
        const auto& rot = rotation[dart_to[d]];
        return rot[(pos[r] + 1) % rot.size()];
    };
    std::vector<int> face_of(n_darts, -1);
    std::vector<std::vector<int>> orbits;
    for (int d0 = 0; d0 < n_darts; ++d0) {
        if (face_of[d0] >= 0) continue;
        const int id = static_cast<int>(orbits.size());
        orbits.emplace_back();
        int d = d0;
        do {
            face_of[d] = id;
            orbits.back().push_back(d);
            d = next_dart(d);
        } while (d != d0);
    }
    if (static_cast<int>(orbits.size()) != n + 1)
        throw std::invalid_argument("chords cross: embedding does not have n faces");

    CircularEmbedding emb;
    emb.n = n;
    emb.faces.resize(n);
    emb.chord_faces.assign(m, {0, 0});
    int outer = -1;
    for (std::size_t o = 0; o < orbits.size(); ++o) {
        int arc_dart = -1;
        int arcs = 0;
        for (int d : orbits[o]) {
            if (d >= B) {
                ++arcs;
                arc_dart = d;
            }
        }
        if (arcs == static_cast<int>(orbits[o].size())) {
            if (outer >= 0) throw std::invalid_argument("invalid embedding: two all-arc faces");
            outer = static_cast<int>(o);
            continue;
        }
        if (arcs != 1) throw std::invalid_argument("invalid embedding: face without a unique arc");
        const int arc = (arc_dart - B) / 2 + 1;
        Face& face = emb.faces[arc - 1];
        if (face.arc != 0) throw std::invalid_argument("invalid embedding: duplicate arc face");
        face.arc = arc;
        // The traversal runs counterclockwise, so the clockwise boundary
        // reading from the arc is the orbit order reversed.
        auto it = std::find(orbits[o].begin(), orbits[o].end(), arc_dart);
        std::vector<int> chords_ccw;
        for (std::size_t s = 1; s < orbits[o].size(); ++s) {
            const int d = orbits[o][(static_cast<std::size_t>(it - orbits[o].begin()) + s) % orbits[o].size()];
            if (d < B) chords_ccw.push_back(d / 2 + 1);
        }
        face.edge_labels.assign(chords_ccw.rbegin(), chords_ccw.rend());
        for (std::size_t s = 1; s < face.edge_labels.size(); ++s) {
            if (face.edge_labels[s] >= face.edge_labels[s - 1])
                throw std::invalid_argument("face labels not decreasing clockwise from the arc");
        }
    }
    if (outer < 0) throw std::invalid_argument("invalid embedding: missing outer face");
    std::vector<int> orbit_arc(orbits.size(), 0);
    for (int j = 1; j <= n; ++j) {
        // Each inner face was stored under its arc; recover orbit -> arc.
        // (Scan once via the arc darts.)
        const int d = B + 2 * (j - 1);
        const int o1 = face_of[d];
        const int o2 = face_of[d ^ 1];
        if (o1 != outer) orbit_arc[o1] = j;
        if (o2 != outer) orbit_arc[o2] = j;
    }
    for (int i = 0; i < m; ++i) {
        const int oa = face_of[2 * i];
        const int ob = face_of[2 * i + 1];
        if (oa == outer || ob == outer || oa == ob)
            throw std::invalid_argument("invalid embedding: chord not separating two inner faces");
        emb.chord_faces[i] = {orbit_arc[oa], orbit_arc[ob]};
    }
    return emb;
}

// Dual tree on the arc vertices {1..n}: vertex j stands for the face at arc
// (j, j+1); adjacent faces are joined by an edge carrying the label of the
// separating chord. Pointed at dual vertex 1, vertex labels are the arc indices.
struct DualTree {
    EVTree t;                  // ids j-1 carry vertex label j
    bool symmetrized = false;
};

struct GYDual {
    CircularEmbedding embedding;
    DualTree dual;
    DualTree symmetrized;
    Factorization b;  // the factorization coded by the symmetrized dual
};

inline DualTree dual_from_edges(int n, const std::vector<EdgeSpec>& edges, bool symmetrized) {
    DualTree d;
    d.symmetrized = symmetrized;
    d.t = EVTree(PointedELTree::from_edges(n, 0, edges));
    for (int j = 1; j <= n; ++j) d.t.set_label(j - 1, j);
    return d;
}

// Full duality map: embedding, dual tree, symmetrized dual (edge labels i and
// n-i exchanged) and the factorization read off the symmetrized dual.
inline GYDual gy_dual(const Factorization& f) {
    GYDual out;
    out.embedding = compute_faces(f);
    const int n = f.n;
    std::vector<EdgeSpec> dual_edges, sym_edges;
    dual_edges.reserve(n - 1);
    sym_edges.reserve(n - 1);
    for (int i = 0; i < n - 1; ++i) {
        const auto [j, k] = out.embedding.chord_faces[i];
        dual_edges.push_back({j - 1, k - 1, static_cast<double>(i + 1)});
        sym_edges.push_back({j - 1, k - 1, static_cast<double>(n - (i + 1))});
    }
    out.dual = dual_from_edges(n, dual_edges, false);
    out.symmetrized = dual_from_edges(n, sym_edges, true);
    out.b = denes_to_factorization(out.symmetrized.t);
    if (!is_minimal(out.b))
        throw std::logic_error("symmetrized dual did not code a minimal factorization");
    return out;
}

} // namespace minfact
