#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <minfact/bijections.hpp>
#include <minfact/factorization.hpp>
#include <minfact/random_gen.hpp>
#include <minfact/statistics.hpp>
#include <minfact/tree.hpp>

namespace minfact {

// Shortest round-trip decimal form of a double; used for all CSV output so
// that repeated runs are byte-identical.
inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// --- Factorization JSON: {"n": 10, "tilde": false, "taus": [[8,9],...]} ----

inline nlohmann::json to_json(const Factorization& f) {
    nlohmann::json taus = nlohmann::json::array();
    for (const auto& t : f.taus) taus.push_back({t.a, t.b});
    return {{"n", f.n}, {"tilde", f.tilde}, {"taus", std::move(taus)}};
}

inline Factorization factorization_from_json(const nlohmann::json& j) {
    Factorization f;
    f.n = j.at("n").get<int>();
    f.tilde = j.value("tilde", false);
    for (const auto& t : j.at("taus")) {
        if (!t.is_array() || t.size() != 2) throw std::invalid_argument("tau must be a pair");
        f.taus.emplace_back(t[0].get<int>(), t[1].get<int>());
    }
    f.validate();
    return f;
}

// --- Tree JSON: {"point": id, "edges": [{"u","v","label"}], "vlabels": {...}} ---

inline nlohmann::json to_json(const EVTree& t) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : t.tree().edges())
        edges.push_back({{"u", e.u}, {"v", e.v}, {"label", e.label}});
    nlohmann::json vlabels = nlohmann::json::object();
    for (int v = 0; v < t.n_vertices(); ++v) {
        if (t.has_label(v)) vlabels[std::to_string(v)] = t.label_of(v);
    }
    return {{"point", t.point()}, {"edges", std::move(edges)}, {"vlabels", std::move(vlabels)}};
}

inline EVTree evtree_from_json(const nlohmann::json& j) {
    std::vector<EdgeSpec> edges;
    int max_id = j.at("point").get<int>();
    for (const auto& e : j.at("edges")) {
        EdgeSpec s{e.at("u").get<int>(), e.at("v").get<int>(), e.at("label").get<double>()};
        max_id = std::max({max_id, s.u, s.v});
        edges.push_back(s);
    }
    EVTree t(PointedELTree::from_edges(max_id + 1, j.at("point").get<int>(), edges));
    if (j.contains("vlabels")) {
        for (const auto& [key, val] : j.at("vlabels").items()) t.set_label(std::stoi(key), val.get<int>());
    }
    return t;
}

// --- Face report: [{"arc": j, "edges": [labels]}] --------------------------

inline nlohmann::json to_json(const CircularEmbedding& emb) {
    nlohmann::json faces = nlohmann::json::array();
    for (const auto& f : emb.faces) faces.push_back({{"arc", f.arc}, {"edges", f.edge_labels}});
    return faces;
}

// --- Trajectory CSV: breakpoints only, columns (i, k, value) ----------------

inline void write_trajectory_csv(std::ostream& out, const std::vector<StepTrajectory>& trajectories) {
    out << "i,k,value\n";
    for (const auto& t : trajectories) {
        out << t.start << ",0," << t.values[0] << "\n";
        for (std::size_t j = 0; j < t.jump_times.size(); ++j)
            out << t.start << "," << t.jump_times[j] << "," << t.values[j + 1] << "\n";
    }
}

// --- Limit-run JSON ----------------------------------------------------------

inline nlohmann::json limit_run_to_json(const KestenRun& run, int K) {
    nlohmann::json vlabels = nlohmann::json::object();
    for (const auto& [label, vertex] : run.labels()) vlabels[std::to_string(vertex)] = label;
    nlohmann::json trajectories = nlohmann::json::array();
    for (int i = -K; i <= K; ++i) {
        const LimitTrajectory t = run.trajectory(i);
        trajectories.push_back({{"i", i}, {"breaks", t.breaks}, {"values", t.values}});
    }
    return {{"K", K}, {"vlabels", std::move(vlabels)}, {"trajectories", std::move(trajectories)}};
}

// --- DOT export ---------------------------------------------------------------

inline std::string to_dot(const EVTree& t, const std::string& name = "tree") {
    std::string s = "graph " + name + " {\n  node [shape=circle];\n";
    for (int v = 0; v < t.n_vertices(); ++v) {
        s += "  " + std::to_string(v) + " [label=\"";
        if (t.has_label(v)) s += std::to_string(t.label_of(v));
        s += "\"";
        if (v == t.point()) s += ", peripheries=3";
        if (t.has_label(v)) s += ", shape=box";
        s += "];\n";
    }
    for (const auto& e : t.tree().edges()) {
        s += "  " + std::to_string(e.u) + " -- " + std::to_string(e.v) +
             " [label=\"" + format_double(e.label) + "\"];\n";
    }
    s += "}\n";
    return s;
}

// Primal tree and its dual in one picture; dual vertices are prefixed "d".
inline std::string to_dot_overlay(const EVTree& primal, const DualTree& dual) {
    std::string s = "graph duality {\n  node [shape=circle];\n";
    for (int v = 0; v < primal.n_vertices(); ++v) {
        s += "  p" + std::to_string(v) + " [label=\"" +
             (primal.has_label(v) ? std::to_string(primal.label_of(v)) : std::string()) + "\"";
        if (v == primal.point()) s += ", peripheries=3";
        s += "];\n";
    }
    for (const auto& e : primal.tree().edges())
        s += "  p" + std::to_string(e.u) + " -- p" + std::to_string(e.v) +
             " [label=\"" + format_double(e.label) + "\"];\n";
    for (int v = 0; v < dual.t.n_vertices(); ++v)
        s += "  d" + std::to_string(v) + " [label=\"" + std::to_string(dual.t.label_of(v)) +
             "\", shape=box, style=dashed];\n";
    for (const auto& e : dual.t.tree().edges())
        s += "  d" + std::to_string(e.u) + " -- d" + std::to_string(e.v) +
             " [label=\"" + format_double(e.label) + "\", style=dashed];\n";
    s += "}\n";
    return s;
}

// --- Histogram CSV: (statistic, value..., probability, source, n_or_limit) ----

struct HistogramRow {
    std::string statistic;
    std::vector<int> value;
    double probability = 0.0;
    std::string source;
    std::string n_or_limit;
};

inline void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows) {
    out << "statistic,v1,v2,probability,source,n_or_limit\n";
    for (const auto& r : rows) {
        out << r.statistic << ",";
        out << (r.value.size() > 0 ? std::to_string(r.value[0]) : "") << ",";
        out << (r.value.size() > 1 ? std::to_string(r.value[1]) : "") << ",";
        out << format_double(r.probability) << "," << r.source << "," << r.n_or_limit << "\n";
    }
}

} // namespace minfact
