#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include <minfact/rng.hpp>
#include <minfact/tree.hpp>

#include "fixtures.hpp"

using namespace minfact;

TEST_CASE("plane tree shape forgets order, keeps labels") {
    PlaneTree p;
    const int a = p.add_child(p.root(), 1.0);
    p.add_child(p.root(), 2.0);
    const int c = p.add_child(a, 3.0);
    p.set_vlabel(p.root(), 7);
    p.set_vlabel(c, 9);
    CHECK(p.at_address({1, 1}) == c);
    CHECK_THROWS_AS(p.at_address({3}), std::out_of_range);

    const EVTree s = shape(p);
    CHECK(s.point() == 0);
    CHECK(s.n_vertices() == 4);
    CHECK(s.label_of(0) == 7);
    CHECK(s.vertex_of(9).has_value());

    // A different child order at the root gives the same shape.
    PlaneTree q;
    q.add_child(q.root(), 2.0);
    const int qa = q.add_child(q.root(), 1.0);
    const int qc = q.add_child(qa, 3.0);
    q.set_vlabel(q.root(), 7);
    q.set_vlabel(qc, 9);
    CHECK(balls_agree(ball(shape(q), 2), ball(s, 2), LabelMode::Exact));

    PlaneTree single;
    single.set_vlabel(single.root(), 1);
    CHECK(shape(single).n_vertices() == 1);
}

TEST_CASE("balls keep exactly the h-neighbourhood") {
    const EVTree t = fixtures::ball_tree();

    const Ball b1 = ball(t, 1);
    CHECK(b1.t.n_vertices() == 4);
    std::vector<double> labels1;
    for (const auto& e : b1.t.tree().edges()) labels1.push_back(e.label);
    CHECK(labels1 == std::vector<double>{0.4, 0.6, 0.95});
    CHECK(b1.t.vertex_of(1).has_value());
    CHECK(b1.t.vertex_of(5).has_value());
    CHECK_FALSE(b1.t.vertex_of(2).has_value());

    const Ball b2 = ball(t, 2);
    CHECK(b2.t.n_vertices() == 9);  // only the vertex at distance 3 drops out
    CHECK_FALSE(b2.t.vertex_of(3).has_value());
    for (int l : {1, 2, 4, 5}) CHECK(b2.t.vertex_of(l).has_value());

    const Ball b9 = ball(t, 9);
    CHECK(b9.t.n_vertices() == t.n_vertices());

    const Ball b0 = ball(t, 0);
    CHECK(b0.t.n_vertices() == 1);
    CHECK_THROWS_AS(ball(t, -1), std::domain_error);
}

TEST_CASE("ball restriction is monotone") {
    const EVTree t = fixtures::ball_tree();
    for (int h = 0; h <= 3; ++h) {
        for (int hp = h; hp <= 4; ++hp) {
            CHECK(balls_agree(ball(ball(t, hp).t, h), ball(t, h), LabelMode::Exact));
        }
    }
}

TEST_CASE("balls_agree exact and compatible modes") {
    const EVTree t = fixtures::ball_tree();
    CHECK(balls_agree(ball(t, 2), ball(t, 2), LabelMode::Exact));
    CHECK(balls_agree(ball(t, 2), ball(t, 2), LabelMode::Compatible));

    // Same tree with integer labels in the same relative order: compatible
    // but not exact. (Order of 3,4,6,2,8,9,5,1,7 matches .4,.5,.7,.2,.9,.95,.6,.1,.8.)
    const std::vector<EdgeSpec> int_edges = {
        {0, 1, 3}, {2, 3, 4}, {2, 1, 6}, {1, 5, 2}, {4, 1, 8},
        {0, 9, 9}, {0, 6, 5}, {6, 8, 1}, {6, 7, 7},
    };
    EVTree ti(PointedELTree::from_edges(10, 0, int_edges));
    ti.set_label(0, 1);
    ti.set_label(2, 2);
    ti.set_label(3, 3);
    ti.set_label(4, 4);
    ti.set_label(1, 5);
    for (int h = 1; h <= 3; ++h) {
        CHECK(balls_agree(ball(ti, h), ball(fixtures::ball_tree(), h), LabelMode::Compatible));
        CHECK_FALSE(balls_agree(ball(ti, h), ball(fixtures::ball_tree(), h), LabelMode::Exact));
    }

    // Distinct shapes disagree in both modes.
    EVTree path(PointedELTree::from_edges(3, 0, {{0, 1, 0.25}, {1, 2, 0.75}}));
    EVTree star(PointedELTree::from_edges(3, 0, {{0, 1, 0.25}, {0, 2, 0.75}}));
    CHECK_FALSE(balls_agree(ball(path, 2), ball(star, 2), LabelMode::Compatible));
    CHECK_THROWS_AS(balls_agree(ball(path, 1), ball(star, 2), LabelMode::Compatible),
                    std::invalid_argument);

    // Vertex labels must match exactly even in compatible mode.
    EVTree lab1 = path, lab2 = star;
    CHECK_FALSE(balls_agree(ball(lab1, 1), ball(lab2, 1), LabelMode::Compatible));
}

TEST_CASE("compatible-mode agreement is an equivalence on random relabellings") {
    RandomSource rng(99);
    const EVTree base = fixtures::ball_tree();
    auto remonotone = [&](const EVTree& t) {
        // Order-preserving random shift of every edge label.
        auto edges = t.tree().edges();
        std::vector<EdgeSpec> out = edges;
        double last = 0.0;
        for (auto& e : out) {
            last += 0.05 + rng.next_double();
            e.label = last;  // edges() is label-sorted, so order is preserved
        }
        EVTree r(PointedELTree::from_edges(t.n_vertices(), t.point(), out));
        for (int v = 0; v < t.n_vertices(); ++v)
            if (t.has_label(v)) r.set_label(v, t.label_of(v));
        return r;
    };
    const EVTree a = remonotone(base), b = remonotone(base);
    for (int h : {1, 2, 3}) {
        CHECK(balls_agree(ball(a, h), ball(base, h), LabelMode::Compatible));
        CHECK(balls_agree(ball(a, h), ball(b, h), LabelMode::Compatible));
        CHECK(balls_agree(ball(b, h), ball(base, h), LabelMode::Compatible));
    }
}

TEST_CASE("edge label scaling") {
    const EVTree t = fixtures::ball_tree();
    const EVTree same = scale_edge_labels(t, 1.0);
    CHECK(balls_agree(ball(same, 3), ball(t, 3), LabelMode::Exact));

    const std::vector<EdgeSpec> int_edges = {{0, 1, 1}, {1, 2, 2}};
    EVTree i3(PointedELTree::from_edges(3, 0, int_edges));
    const EVTree scaled = scale_edge_labels(i3, 0.5);
    std::vector<double> labels;
    for (const auto& e : scaled.tree().edges()) labels.push_back(e.label);
    CHECK(labels == std::vector<double>{0.5, 1.0});

    // Scaling by powers of two is exact and composes multiplicatively.
    const EVTree twice = scale_edge_labels(scale_edge_labels(t, 2.0), 4.0);
    const EVTree once = scale_edge_labels(t, 8.0);
    CHECK(balls_agree(ball(twice, 3), ball(once, 3), LabelMode::Exact));

    // Any positive scale leaves every compatible-mode verdict unchanged.
    const EVTree odd = scale_edge_labels(t, 0.3);
    for (int h = 0; h <= 3; ++h)
        CHECK(balls_agree(ball(odd, h), ball(t, h), LabelMode::Compatible));

    CHECK_THROWS_AS(scale_edge_labels(t, 0.0), std::domain_error);
    CHECK_THROWS_AS(scale_edge_labels(t, -2.0), std::domain_error);
}

TEST_CASE("tree construction rejects bad input") {
    CHECK_THROWS_AS(PointedELTree::from_edges(3, 0, {{0, 1, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(PointedELTree::from_edges(3, 0, {{0, 1, 0.5}, {0, 1, 0.7}}), std::invalid_argument);
    CHECK_THROWS_AS(PointedELTree::from_edges(3, 0, {{0, 1, 0.5}, {2, 1, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(PointedELTree::from_edges(3, 5, {{0, 1, 0.5}, {1, 2, 0.6}}), std::invalid_argument);
    CHECK_THROWS_AS(PointedELTree::from_edges(4, 0, {{0, 1, 0.5}, {1, 0, 0.6}, {2, 3, 0.7}}),
                    std::invalid_argument);

    EVTree t(PointedELTree::from_edges(2, 0, {{0, 1, 0.5}}));
    t.set_label(0, 3);
    CHECK_THROWS_AS(t.set_label(1, 3), std::invalid_argument);
    CHECK_THROWS_AS(t.set_label(0, 4), std::invalid_argument);
}

TEST_CASE("shape is idempotent on non-plane trees") {
    const EVTree t = fixtures::ball_tree();
    const EVTree s = shape(t);
    CHECK(balls_agree(ball(s, 4), ball(t, 4), LabelMode::Exact));
    CHECK(s.n_vertices() == t.n_vertices());
    CHECK(s.labels() == t.labels());
}
