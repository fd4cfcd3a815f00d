#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <minfact/errors.hpp>
#include <minfact/json_io.hpp>
#include <minfact/statistics.hpp>

namespace minfact::cli {

constexpr std::uint64_t kDefaultSeed = 12345;

// Exit codes: 0 success/verified, 1 verification failure, 2 usage error,
// 3 resource error.
enum ExitCode { kOk = 0, kVerificationFailed = 1, kUsageError = 2, kResourceError = 3 };

struct RunConfig {
    std::string subcommand;
    int n = 0;
    int k = 2;
    int A = 1;
    std::uint64_t samples = 1;
    std::uint64_t seed = kDefaultSeed;
    int workers = 1;
    std::string format;
    std::string output;
    std::string input;
    std::string stat;
    std::string stat_pair;
    std::string source;
    int max_n = kEnumerationCap;
    long long step_budget = KestenRun::kDefaultStepBudget;
};

namespace detail {

// All file output is buffered and written in one pass, so identical runs
// produce byte-identical files.
inline void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + cfg.output);
    out << text;
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad JSON input: ") + e.what());
    }
    return j;
}

inline void check_format(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
    if (cfg.format.empty()) return;
    for (const char* a : allowed) {
        if (cfg.format == a) return;
    }
    throw std::invalid_argument("format '" + cfg.format + "' not supported by this subcommand");
}

inline Factorization input_factorization(const RunConfig& cfg) {
    if (!cfg.input.empty()) return factorization_from_json(load_json(cfg.input));
    if (cfg.n < 2) throw std::invalid_argument("need --input or --n");
    RandomSource rng(cfg.seed, 0);
    return sample_uniform_factorization(cfg.n, rng);
}

inline std::string factorization_csv_line(const Factorization& f) {
    std::string s;
    for (std::size_t i = 0; i < f.taus.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(f.taus[i].a) + "," + std::to_string(f.taus[i].b);
    }
    return s;
}

inline void check_cap(const RunConfig& cfg) {
    if (cfg.n > cfg.max_n)
        throw resource_error("n exceeds --max-n (" + std::to_string(cfg.max_n) + ")");
}

// --- subcommands ----------------------------------------------------------

inline int cmd_enumerate(const RunConfig& cfg) {
    check_format(cfg, {"json", "csv"});
    check_cap(cfg);
    std::ostringstream out;
    if (cfg.format == "csv") out << "taus\n";
    for_each_factorization(cfg.n, [&](const Factorization& f) {
        if (cfg.format == "csv") {
            out << factorization_csv_line(f) << "\n";
        } else {
            out << to_json(f).dump() << "\n";
        }
    });
    emit(cfg, out.str());
    return kOk;
}

inline int cmd_sample(const RunConfig& cfg) {
    check_format(cfg, {"json", "csv"});
    if (cfg.n < 2) throw std::invalid_argument("sample needs --n >= 2");
    std::ostringstream out;
    if (cfg.format == "csv") out << "taus\n";
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        RandomSource rng(cfg.seed, s);
        const Factorization f = sample_uniform_factorization(cfg.n, rng);
        if (cfg.format == "csv") {
            out << factorization_csv_line(f) << "\n";
        } else {
            out << to_json(f).dump() << "\n";
        }
    }
    emit(cfg, out.str());
    return kOk;
}

inline int cmd_trajectories(const RunConfig& cfg) {
    check_format(cfg, {"csv", "json"});
    Factorization f = input_factorization(cfg);
    if (!f.tilde) f = to_tilde(f);
    const auto trajectories = batch_trajectories(f);
    std::ostringstream out;
    if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : trajectories)
            arr.push_back({{"i", t.start}, {"jumps", t.jump_times}, {"values", t.values}});
        out << nlohmann::json{{"n", f.n}, {"trajectories", std::move(arr)}}.dump() << "\n";
    } else {
        write_trajectory_csv(out, trajectories);
    }
    emit(cfg, out.str());
    return kOk;
}

inline int cmd_dual(const RunConfig& cfg) {
    check_format(cfg, {"json", "dot"});
    const Factorization f = input_factorization(cfg);
    const GYDual d = gy_dual(f);
    std::ostringstream out;
    if (cfg.format == "dot") {
        out << to_dot_overlay(factorization_tree(f), d.dual);
    } else {
        auto edges_json = [](const DualTree& t) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& e : t.t.tree().edges())
                arr.push_back({{"u", t.t.label_of(e.u)},
                               {"v", t.t.label_of(e.v)},
                               {"label", static_cast<int>(e.label)}});
            return arr;
        };
        nlohmann::json j{{"n", f.n},
                         {"faces", to_json(d.embedding)},
                         {"dual_edges", edges_json(d.dual)},
                         {"symmetrized_edges", edges_json(d.symmetrized)},
                         {"b", to_json(d.b)}};
        out << j.dump() << "\n";
    }
    emit(cfg, out.str());
    return kOk;
}

inline int cmd_relabel(const RunConfig& cfg) {
    check_format(cfg, {"json", "dot", "csv"});
    if (cfg.input.empty() && cfg.n < 2) throw std::invalid_argument("need --input or --n");
    PointedELTree tree;
    if (!cfg.input.empty()) {
        const nlohmann::json j = load_json(cfg.input);
        if (j.contains("taus")) {
            tree = moszkowski_forward(factorization_from_json(j));
        } else {
            tree = evtree_from_json(j).tree();
        }
    } else {
        RandomSource rng(cfg.seed, 0);
        tree = sample_el_tree(cfg.n, rng);
    }
    const FullRelabelResult r = full_relabel(tree);
    std::ostringstream out;
    if (cfg.format == "dot") {
        out << to_dot(r.t);
    } else if (cfg.format == "csv") {
        for (const auto& w : r.ofind_traces) out << to_string(w) << "\n";
        for (const auto& w : r.find_traces) out << to_string(w) << "\n";
    } else {
        out << to_json(r.t).dump() << "\n";
    }
    emit(cfg, out.str());
    return kOk;
}

inline int cmd_verify_conjecture(const RunConfig& cfg) {
    check_format(cfg, {"json"});
    check_cap(cfg);
    const ConjectureReport r = verify_conjecture(cfg.n, cfg.workers);
    std::ostringstream out;
    if (cfg.format == "json") {
        nlohmann::json mism = nlohmann::json::array();
        for (const auto& [a, b, got, want] : r.mismatches)
            mism.push_back({{"a", a}, {"b", b}, {"got", got}, {"want", want}});
        out << nlohmann::json{{"n", r.n}, {"pass", r.ok}, {"factorizations", r.total}, {"mismatches", mism}}.dump()
            << "\n";
    } else if (r.ok) {
        out << "exact match, " << r.total << " factorizations\n";
    } else {
        out << "MISMATCH at n=" << r.n << ":\n";
        for (const auto& [a, b, got, want] : r.mismatches)
            out << "  coefficient x^" << a << " y^" << b << ": got " << got << "/" << r.total
                << ", want " << want << "/" << r.total << "\n";
    }
    emit(cfg, out.str());
    return r.ok ? kOk : kVerificationFailed;
}

inline int cmd_verify_symmetry(const RunConfig& cfg) {
    check_format(cfg, {"json"});
    check_cap(cfg);
    const int k = std::min(cfg.k, cfg.n);
    bool all = true;
    nlohmann::json results = nlohmann::json::array();
    std::ostringstream out;
    auto note = [&](const std::string& name, bool pass) {
        all = all && pass;
        results.push_back({{"name", name}, {"n", cfg.n}, {"pass", pass}});
        if (cfg.format != "json") out << (pass ? "pass" : "FAIL") << "  " << name << "\n";
    };
    note("tuple_symmetry_k" + std::to_string(k), verify_symmetry(cfg.n, k, cfg.workers));
    for (int j = 1; j <= cfg.n; ++j)
        note("horizontal_symmetry_j" + std::to_string(j), verify_horizontal_symmetry(cfg.n, j, cfg.workers));
    if (!cfg.stat_pair.empty()) {
        // e.g. --stat-pair t1-m3 or t2-t3: dump the exact joint distribution.
        auto parse = [&](const std::string& s) {
            const auto dash = s.find('-');
            if (dash == std::string::npos || dash < 2) throw std::invalid_argument("bad --stat-pair");
            auto part = [&](const std::string& p) -> std::pair<StatKind, int> {
                if (p.size() < 2 || (p[0] != 't' && p[0] != 'm')) throw std::invalid_argument("bad --stat-pair");
                return {p[0] == 't' ? StatKind::Touch : StatKind::Move, std::stoi(p.substr(1))};
            };
            const auto [k1, i1] = part(s.substr(0, dash));
            const auto [k2, i2] = part(s.substr(dash + 1));
            return StatPair{k1, i1, k2, i2};
        };
        const BivariatePGP pgp = exact_joint_pgp(cfg.n, parse(cfg.stat_pair), cfg.workers);
        out << "a,b,count,denominator\n";
        for (int a = 0; a <= cfg.n; ++a)
            for (int b = 0; b <= cfg.n; ++b)
                if (pgp.count(a, b)) out << a << "," << b << "," << pgp.count(a, b) << "," << pgp.denom << "\n";
    }
    if (cfg.format == "json")
        out << nlohmann::json{{"results", std::move(results)}, {"all_pass", all}}.dump() << "\n";
    emit(cfg, out.str());
    return all ? kOk : kVerificationFailed;
}

inline int cmd_limit_sample(const RunConfig& cfg) {
    check_format(cfg, {"json"});
    if (cfg.k < 1) throw std::invalid_argument("limit-sample needs --k >= 1");
    if (cfg.A < 1) throw std::invalid_argument("limit-sample needs --A >= 1");
    std::ostringstream out;
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        KestenRun run(cfg.seed, s, cfg.step_budget);
        run.extend_to(cfg.k);
        for (int i = -cfg.k; i <= cfg.k; ++i) run.ensure_trajectory(i);
        nlohmann::json j = limit_run_to_json(run, cfg.k);
        j["A"] = cfg.A;
        j["entering"] = run.entering_indices(cfg.A);
        out << j.dump() << "\n";
    }
    emit(cfg, out.str());
    return kOk;
}

inline int cmd_limit_stats(const RunConfig& cfg) {
    check_format(cfg, {"csv"});
    if (cfg.stat.empty()) throw std::invalid_argument("limit-stats needs --stat");
    const bool finite_default = cfg.stat == "stays-positive";
    std::string source = cfg.source.empty() ? (finite_default ? "finite" : "kesten") : cfg.source;
    if (source != "finite" && source != "kesten") throw std::invalid_argument("--source must be finite or kesten");
    if (cfg.stat == "stays-positive" && source != "finite")
        throw std::invalid_argument("stays-positive is a finite-n statistic");
    if (cfg.n != 0 && cfg.n < 4) throw std::invalid_argument("limit-stats needs --n >= 4");
    const int n = cfg.n >= 4 ? cfg.n : 50000;
    const std::string n_or_limit = source == "finite" ? std::to_string(n) : "limit";
    const MCSource src = source == "finite" ? MCSource::FiniteN : MCSource::Kesten;

    std::vector<HistogramRow> rows;
    double max_abs_z = 0.0;
    auto check = [&](MCStatistic stat, const std::vector<int>& cell, const std::string& name) {
        const MCEstimate e = mc_limit_check(stat, src, n, cell, cfg.samples, cfg.seed, cfg.workers);
        max_abs_z = std::max(max_abs_z, std::abs(e.z));
        rows.push_back({name, cell, e.estimate, source, n_or_limit});
    };
    if (cfg.stat == "stays-positive") {
        check(MCStatistic::StaysPositive, {}, "stays_positive");
    } else if (cfg.stat == "t1-marginal" || cfg.stat == "m1-marginal") {
        const auto stat = cfg.stat == "t1-marginal" ? MCStatistic::T1Marginal : MCStatistic::M1Marginal;
        for (int j = 1; j <= 6; ++j) check(stat, {j}, cfg.stat == "t1-marginal" ? "t1_marginal" : "m1_marginal");
    } else if (cfg.stat == "t1-m1-joint" || cfg.stat == "deg-dist-joint") {
        const auto stat = cfg.stat == "t1-m1-joint" ? MCStatistic::T1M1Joint : MCStatistic::DegDistJoint;
        for (int i = 1; i <= 4; ++i)
            for (int h = 1; h <= 4; ++h)
                check(stat, {i, h}, cfg.stat == "t1-m1-joint" ? "t1_m1_joint" : "deg_dist_joint");
    } else if (cfg.stat == "t1-t2-joint") {
        for (int i = 1; i <= 4; ++i)
            for (int j = 1; j <= 4; ++j) check(MCStatistic::T1T2Joint, {i, j}, "t1_t2_joint");
    } else {
        throw std::invalid_argument("unknown --stat: " + cfg.stat);
    }
    std::ostringstream out;
    write_histogram_csv(out, rows);
    emit(cfg, out.str());
    std::cerr << "max |z| = " << max_abs_z << " over " << rows.size() << " bins ("
              << (max_abs_z < 4.0 ? "pass" : "FAIL") << ")\n";
    return max_abs_z < 4.0 ? kOk : kVerificationFailed;
}

} // namespace detail

// Parses argv (without the program name) and dispatches. All randomness
// derives from --seed (or MINFACT_SEED); identical invocations produce
// byte-identical output regardless of --workers.
inline int run(std::vector<std::string> args) {
    CLI::App app{"minimal transposition factorizations of the n-cycle"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool with_rng) {
        sub->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--output", cfg.output, "output file (default stdout)");
        sub->add_option("--format", cfg.format, "output format");
        sub->add_option("--max-n", cfg.max_n, "refuse enumerations beyond this size");
        if (with_rng) {
            sub->add_option("--seed", cfg.seed, "random seed")->envname("MINFACT_SEED");
            sub->add_option("--samples", cfg.samples, "number of samples");
            sub->add_option("--step-budget", cfg.step_budget, "walker step budget per label");
        }
    };

    auto* enumerate = app.add_subcommand("enumerate", "list all minimal factorizations of (1..n)");
    enumerate->add_option("--n", cfg.n, "cycle size")->required();
    add_common(enumerate, false);

    auto* sample = app.add_subcommand("sample", "draw uniform minimal factorizations");
    sample->add_option("--n", cfg.n, "cycle size")->required();
    add_common(sample, true);

    auto* traj = app.add_subcommand("trajectories", "breakpoints of all recentered trajectories");
    traj->add_option("--n", cfg.n, "cycle size (sample when no --input)");
    traj->add_option("--input", cfg.input, "factorization JSON file");
    add_common(traj, true);

    auto* dual = app.add_subcommand("dual", "circular embedding faces, dual tree and its factorization");
    dual->add_option("--n", cfg.n, "cycle size (sample when no --input)");
    dual->add_option("--input", cfg.input, "factorization JSON file");
    add_common(dual, true);

    auto* relabel = app.add_subcommand("relabel", "full recentered relabelling of a pointed tree");
    relabel->add_option("--n", cfg.n, "cycle size (sample when no --input)");
    relabel->add_option("--input", cfg.input, "factorization or tree JSON file");
    add_common(relabel, true);

    auto* vc = app.add_subcommand("verify-conjecture", "exact joint-law identity for (#T_1, #M_1)");
    vc->add_option("--n", cfg.n, "cycle size")->required();
    add_common(vc, false);

    auto* vs = app.add_subcommand("verify-symmetry", "exact tuple and horizontal symmetries");
    vs->add_option("--n", cfg.n, "cycle size")->required();
    vs->add_option("--k", cfg.k, "tuple depth");
    vs->add_option("--stat-pair", cfg.stat_pair, "also dump an exact joint law, e.g. t1-m2");
    add_common(vs, false);

    auto* ls = app.add_subcommand("limit-sample", "labelled fragments of the limit tree");
    ls->add_option("--k", cfg.k, "label window half-width K");
    ls->add_option("--A", cfg.A, "band half-width for entering indices");
    add_common(ls, true);

    auto* lst = app.add_subcommand("limit-stats", "Monte Carlo checks against the limit laws");
    lst->add_option("--stat", cfg.stat,
                    "stays-positive | t1-marginal | m1-marginal | t1-m1-joint | deg-dist-joint | t1-t2-joint")
        ->required();
    lst->add_option("--n", cfg.n, "finite source size (default 50000)");
    lst->add_option("--source", cfg.source, "finite | kesten");
    add_common(lst, true);

    std::vector<const char*> argv;
    argv.push_back("minfact");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (enumerate->parsed()) return detail::cmd_enumerate(cfg);
        if (sample->parsed()) return detail::cmd_sample(cfg);
        if (traj->parsed()) return detail::cmd_trajectories(cfg);
        if (dual->parsed()) return detail::cmd_dual(cfg);
        if (relabel->parsed()) return detail::cmd_relabel(cfg);
        if (vc->parsed()) return detail::cmd_verify_conjecture(cfg);
        if (vs->parsed()) return detail::cmd_verify_symmetry(cfg);
        if (ls->parsed()) return detail::cmd_limit_sample(cfg);
        if (lst->parsed()) return detail::cmd_limit_stats(cfg);
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kResourceError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::out_of_range& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kVerificationFailed;
    }
    return kUsageError;
}

} // namespace minfact::cli
