#pragma once

#include <utility>
#include <vector>

#include <minfact/factorization.hpp>
#include <minfact/tree.hpp>

namespace fixtures {

using minfact::Factorization;
using minfact::Transposition;

// Reference factorization of (1,...,10) used across the golden tests.
inline Factorization plain10() {
    return Factorization(10,
                         {Transposition(8, 9), Transposition(5, 6), Transposition(1, 5),
                          Transposition(2, 3), Transposition(1, 8), Transposition(2, 5),
                          Transposition(7, 8), Transposition(4, 5), Transposition(1, 10)});
}

// Its recentered version, a factorization of (-4,...,0,1,...,5).
inline Factorization tilde10() {
    return Factorization(10,
                         {Transposition(-1, -2), Transposition(5, -4), Transposition(1, 5),
                          Transposition(2, 3), Transposition(1, -2), Transposition(2, 5),
                          Transposition(-3, -2), Transposition(4, 5), Transposition(1, 0)},
                         true);
}

// Edges of the fully labelled tree of plain10(): (edge label, vertex pair).
inline std::vector<std::pair<int, std::pair<int, int>>> tree10_edges() {
    return {{1, {8, 9}}, {2, {5, 6}}, {3, {1, 5}}, {4, {2, 3}}, {5, {1, 8}},
            {6, {2, 5}}, {7, {7, 8}}, {8, {4, 5}}, {9, {1, 10}}};
}

// Recentered vertex labels of the same tree, keyed by the plain label.
inline int tilde_label(int plain) { return plain <= 5 ? plain : plain - 10; }

// The 10-vertex walk-through tree: vertex ids 0..9, point at 0.
//
//        3
//        |.5
//   5    2     8(id7)
//    \.2 |.7  /.8
//     \  |   /        ids: 0 point; 1=(.4 child); 2=(.7 child); 3=(.5 leaf);
//      \ |  /               4=(.9 leaf); 5=(.2 leaf); 6=(.6 child); 7=(.8 leaf);
//  4--.9-1  6(id6)          8=(.1 leaf); 9=(.95 leaf)
//        |.4 \.6
//        0----+--.95--9
inline minfact::PointedELTree walk_tree() {
    const std::vector<minfact::EdgeSpec> edges = {
        {0, 1, 0.4}, {2, 3, 0.5}, {2, 1, 0.7}, {1, 5, 0.2}, {4, 1, 0.9},
        {0, 9, 0.95}, {0, 6, 0.6}, {6, 8, 0.1}, {6, 7, 0.8},
    };
    return minfact::PointedELTree::from_edges(10, 0, edges);
}

// Expected label placements on walk_tree().
inline std::vector<std::pair<int, int>> walk_tree_find4_labels() {
    return {{0, 1}, {2, 2}, {3, 3}, {4, 4}};
}
inline std::vector<std::pair<int, int>> walk_tree_ofind4_labels() {
    return {{9, 0}, {8, -1}, {6, -2}, {7, -3}, {5, -4}};
}

// The same tree with the vertex labels of its first five vertices, as used by
// the ball goldens (labels 1..5 on ids 0,2,3,4,1).
inline minfact::EVTree ball_tree() {
    minfact::EVTree t(walk_tree());
    t.set_label(0, 1);
    t.set_label(2, 2);
    t.set_label(3, 3);
    t.set_label(4, 4);
    t.set_label(1, 5);
    return t;
}

// Dual-tree edges of plain10(): ((arc u, arc v), edge label).
inline std::vector<std::pair<std::pair<int, int>, int>> dual10_edges() {
    return {{{9, 8}, 1}, {{9, 10}, 9}, {{9, 6}, 5}, {{1, 6}, 3}, {{1, 3}, 6},
            {{2, 3}, 4}, {{3, 4}, 8}, {{5, 6}, 2}, {{6, 7}, 7}};
}

// The factorization coded by the symmetrized dual of plain10().
inline Factorization b_of_plain10() {
    return Factorization(10,
                         {Transposition(9, 10), Transposition(3, 4), Transposition(6, 7),
                          Transposition(1, 3), Transposition(6, 9), Transposition(2, 3),
                          Transposition(1, 6), Transposition(5, 6), Transposition(8, 9)});
}

} // namespace fixtures
