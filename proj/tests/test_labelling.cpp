#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include <minfact/bijections.hpp>
#include <minfact/labelling.hpp>
#include <minfact/rng.hpp>
#include <minfact/statistics.hpp>
#include <minfact/tree.hpp>

#include "fixtures.hpp"

using namespace minfact;

TEST_CASE("find_4 places labels as expected") {
    const auto r = find_k(fixtures::walk_tree(), 4);
    for (auto [v, label] : fixtures::walk_tree_find4_labels()) CHECK(r.t.label_of(v) == label);
    CHECK(r.t.n_labelled() == 4);

    REQUIRE(r.traces.size() == 3);
    CHECK(r.traces[0].assigned_label == 2);
    CHECK(r.traces[0].vertices == std::vector<int>{0, 1, 2});
    CHECK(r.traces[0].edge_labels == std::vector<double>{0.4, 0.7});
    CHECK(r.traces[1].vertices == std::vector<int>{2, 3});
    CHECK(r.traces[1].edge_labels == std::vector<double>{0.5});
    CHECK(r.traces[2].vertices == std::vector<int>{3, 2, 1, 4});
    CHECK(r.traces[2].edge_labels == std::vector<double>{0.5, 0.7, 0.9});
}

TEST_CASE("ofind_4 places labels as expected") {
    const auto r = ofind_k(fixtures::walk_tree(), 4);
    for (auto [v, label] : fixtures::walk_tree_ofind4_labels()) CHECK(r.t.label_of(v) == label);
    CHECK(r.t.label_of(0) == 1);

    REQUIRE(r.traces.size() == 5);
    CHECK(r.traces[0].assigned_label == 0);
    CHECK(r.traces[0].vertices == std::vector<int>{0, 9});
    CHECK(r.traces[0].edge_labels == std::vector<double>{0.95});
    CHECK(r.traces[1].vertices == std::vector<int>{9, 0, 6, 8});
    CHECK(r.traces[1].edge_labels == std::vector<double>{0.95, 0.6, 0.1});
    CHECK(r.traces[2].vertices == std::vector<int>{8, 6});
    CHECK(r.traces[3].vertices == std::vector<int>{6, 7});
    CHECK(r.traces[4].vertices == std::vector<int>{7, 6, 0, 1, 5});
    CHECK(r.traces[4].edge_labels == std::vector<double>{0.8, 0.6, 0.4, 0.2});
}

TEST_CASE("walk traces are strictly monotone") {
    const auto f = find_k(fixtures::walk_tree(), 10);
    for (const auto& w : f.traces)
        for (std::size_t i = 1; i < w.edge_labels.size(); ++i)
            CHECK(w.edge_labels[i] > w.edge_labels[i - 1]);
    const auto o = ofind_k(fixtures::walk_tree(), 4);
    for (const auto& w : o.traces)
        for (std::size_t i = 1; i < w.edge_labels.size(); ++i)
            CHECK(w.edge_labels[i] < w.edge_labels[i - 1]);
}

TEST_CASE("degenerate sizes") {
    PointedELTree single = PointedELTree::from_edges(1, 0, {});
    const auto r = find_k(single, 1);
    CHECK(r.t.label_of(0) == 1);
    CHECK_THROWS_AS(find_k(single, 2), std::out_of_range);
    CHECK_THROWS_AS(find_k(single, 0), std::invalid_argument);

    PointedELTree pair = PointedELTree::from_edges(2, 0, {{0, 1, 0.5}});
    const auto o = ofind_k(pair, 1);
    CHECK(o.t.label_of(1) == 0);  // one walk; the second wraps to the point and stops
    const auto fr = full_relabel(pair);
    CHECK(fr.t.label_of(0) == 1);
    CHECK(fr.t.label_of(1) == 0);
}

TEST_CASE("find_n reproduces the factorization tree") {
    const auto f = fixtures::plain10();
    const auto el = moszkowski_forward(f);
    const auto r = find_k(el, 10);
    for (auto [label, uv] : fixtures::tree10_edges()) {
        // Edge `label` joins the vertices carrying the labels uv in Tree(F);
        // vertex ids in moszkowski_forward are old labels minus one.
        (void)label;
        CHECK(r.t.label_of(uv.first - 1) == uv.first);
        CHECK(r.t.label_of(uv.second - 1) == uv.second);
    }
    for (int v = 0; v < 10; ++v) CHECK(r.t.label_of(v) == v + 1);
}

TEST_CASE("ofind_{n-1} shifts every label except the point") {
    const auto el = moszkowski_forward(fixtures::plain10());
    const auto r = ofind_k(el, 9);
    CHECK(r.t.label_of(0) == 1);
    for (int v = 1; v < 10; ++v) CHECK(r.t.label_of(v) == (v + 1) - 10);
}

TEST_CASE("full relabelling gives the recentered tree") {
    const auto el = moszkowski_forward(fixtures::plain10());
    const auto r = full_relabel(el);
    for (int v = 0; v < 10; ++v) CHECK(r.t.label_of(v) == fixtures::tilde_label(v + 1));
}

TEST_CASE("relabelling identities hold exhaustively at n=5") {
    for_each_factorization(5, [&](const Factorization& f) {
        const auto el = moszkowski_forward(f);
        const int n = f.n;

        const auto fn = find_k(el, n);
        for (int v = 0; v < n; ++v) CHECK(fn.t.label_of(v) == v + 1);

        const auto on = ofind_k(el, n - 1);
        CHECK(on.t.label_of(0) == 1);
        for (int v = 1; v < n; ++v) CHECK(on.t.label_of(v) == v + 1 - n);

        const auto fr = full_relabel(el);
        std::set<int> labels;
        for (int v = 0; v < n; ++v) {
            CHECK(fr.t.label_of(v) == (2 * (v + 1) <= n ? v + 1 : v + 1 - n));
            labels.insert(fr.t.label_of(v));
        }
        CHECK(static_cast<int>(labels.size()) == n);

        // Find/ofind label sets partition the vertices (point on the find side).
        const auto ff = find_k(el, n / 2);
        const auto oo = ofind_k(el, (n - 1) / 2);
        std::set<int> find_side, ofind_side;
        for (int v = 0; v < n; ++v) {
            if (ff.t.has_label(v)) find_side.insert(v);
            if (oo.t.has_label(v) && oo.t.label_of(v) <= 0) ofind_side.insert(v);
        }
        CHECK(static_cast<int>(find_side.size() + ofind_side.size()) == n);
        for (int v : find_side) CHECK(ofind_side.count(v) == 0);
    });
}

TEST_CASE("label multiset of full_relabel at n=4") {
    for_each_factorization(4, [&](const Factorization& f) {
        const auto r = full_relabel(moszkowski_forward(f));
        std::multiset<int> labels;
        for (int v = 0; v < 4; ++v) labels.insert(r.t.label_of(v));
        CHECK(labels == std::multiset<int>{-1, 0, 1, 2});
    });
}

TEST_CASE("find only uses the relative label order") {
    RandomSource rng(4242);
    const auto base = fixtures::walk_tree();
    auto edges = base.edges();
    // Order-preserving random relabelling.
    double last = -3.0;
    for (auto& e : edges) {
        last += 0.01 + 2.0 * rng.next_double();
        e.label = last;
    }
    const auto remapped = PointedELTree::from_edges(base.n_vertices(), base.point(), edges);
    const auto a = find_k(base, 10), b = find_k(remapped, 10);
    for (int v = 0; v < 10; ++v) CHECK(a.t.label_of(v) == b.t.label_of(v));
    const auto oa = ofind_k(base, 4), ob = ofind_k(remapped, 4);
    for (int v = 0; v < 10; ++v) CHECK(oa.t.has_label(v) == ob.t.has_label(v));
}

TEST_CASE("find commutes with shape") {
    // Build a plane version of the walk tree, run find on its shape and
    // compare against shaping after a plane run. Vertex identities are kept
    // by the shape() id order (creation order).
    PlaneTree p;
    const int v1 = p.add_child(0, 0.4);
    const int v2 = p.add_child(v1, 0.7);
    p.add_child(v2, 0.5);
    p.add_child(v1, 0.9);
    p.add_child(v1, 0.2);
    const int v6 = p.add_child(0, 0.6);
    p.add_child(v6, 0.8);
    p.add_child(v6, 0.1);
    p.add_child(0, 0.95);

    struct PlaneAccess {
        const PlaneTree& p;
        std::vector<std::vector<EdgeRef>> inc;
        explicit PlaneAccess(const PlaneTree& t) : p(t) {
            inc.resize(t.size());
            for (int v = 1; v < t.size(); ++v) {
                inc[v].push_back({t.node(v).edge_label, t.node(v).parent});
                inc[t.node(v).parent].push_back({t.node(v).edge_label, v});
            }
            for (auto& a : inc)
                std::sort(a.begin(), a.end(),
                          [](const EdgeRef& x, const EdgeRef& y) { return x.label < y.label; });
        }
        int point() const { return p.root(); }
        const std::vector<EdgeRef>& incident(int v) const { return inc[v]; }
    };
    struct MapSink {
        std::vector<int> labels;
        std::vector<char> set;
        bool has_label(int v) const { return set[v]; }
        int label_of(int v) const { return labels[v]; }
        void assign(int v, int label) {
            labels[v] = label;
            set[v] = 1;
        }
    };
    PlaneAccess acc(p);
    MapSink sink;
    sink.labels.assign(p.size(), 0);
    sink.set.assign(p.size(), 0);
    sink.assign(0, 1);
    run_find(acc, sink, 0, 1, 4, 1 << 20);

    const auto via_shape = find_k(shape(p).tree(), 4);
    for (int v = 0; v < p.size(); ++v) {
        CHECK(sink.has_label(v) == via_shape.t.has_label(v));
        if (sink.has_label(v)) CHECK(sink.label_of(v) == via_shape.t.label_of(v));
    }
}

TEST_CASE("trace dump format") {
    const auto r = find_k(fixtures::walk_tree(), 2);
    CHECK(to_string(r.traces[0]) == "i=2 K=2 vertices=0,1,2 labels=0.400000,0.700000");
}
