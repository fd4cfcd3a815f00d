#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <minfact/cli.hpp>

#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace minfact;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "minfact_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args) { return cli::run(std::move(args)); }

} // namespace

TEST_CASE("enumerate emits minimal factorizations as json lines") {
    const auto out = temp_file("enum4.jsonl");
    REQUIRE(run_cli({"enumerate", "--n", "4", "--output", out.string()}) == 0);
    std::ifstream in(out);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        ++count;
        const Factorization f = factorization_from_json(nlohmann::json::parse(line));
        CHECK(is_minimal(f));
    }
    CHECK(count == 16);
}

TEST_CASE("usage and resource errors map to exit codes") {
    CHECK(run_cli({"enumerate"}) == 2);                      // missing --n
    CHECK(run_cli({"enumerate", "--n", "12"}) == 3);         // beyond --max-n
    CHECK(run_cli({"no-such-command"}) == 2);
    CHECK(run_cli({"limit-stats", "--stat", "bogus", "--samples", "10"}) == 2);
    CHECK(run_cli({"trajectories", "--input", "/nonexistent/file.json"}) == 2);
    CHECK(run_cli({"enumerate", "--n", "4", "--format", "dot"}) == 2);
}

TEST_CASE("verify subcommands succeed on small sizes") {
    CHECK(run_cli({"verify-conjecture", "--n", "5", "--output", temp_file("c5.txt").string()}) == 0);
    CHECK(slurp(temp_file("c5.txt")) == "exact match, 125 factorizations\n");
    CHECK(run_cli({"verify-symmetry", "--n", "4", "--k", "2", "--output",
                   temp_file("s4.txt").string()}) == 0);
    const std::string report = slurp(temp_file("s4.txt"));
    CHECK(report.find("FAIL") == std::string::npos);
    CHECK(run_cli({"verify-conjecture", "--n", "4", "--format", "json", "--output",
                   temp_file("c4.json").string()}) == 0);
    const auto j = nlohmann::json::parse(slurp(temp_file("c4.json")));
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("factorizations").get<int>() == 16);
}

TEST_CASE("sampled output is reproducible and worker independent") {
    const auto f1 = temp_file("sample_a.jsonl"), f2 = temp_file("sample_b.jsonl");
    REQUIRE(run_cli({"sample", "--n", "30", "--samples", "5", "--seed", "9", "--output", f1.string()}) == 0);
    REQUIRE(run_cli({"sample", "--n", "30", "--samples", "5", "--seed", "9", "--output", f2.string()}) == 0);
    CHECK(slurp(f1) == slurp(f2));

    const auto v1 = temp_file("sym_w1.json"), v4 = temp_file("sym_w4.json");
    REQUIRE(run_cli({"verify-symmetry", "--n", "5", "--k", "2", "--format", "json", "--workers", "1",
                     "--output", v1.string()}) == 0);
    REQUIRE(run_cli({"verify-symmetry", "--n", "5", "--k", "2", "--format", "json", "--workers", "4",
                     "--output", v4.string()}) == 0);
    CHECK(slurp(v1) == slurp(v4));
    CHECK(!slurp(v1).empty());
}

TEST_CASE("sampled factorizations round-trip through their json") {
    const auto out = temp_file("roundtrip.jsonl");
    REQUIRE(run_cli({"sample", "--n", "40", "--samples", "8", "--seed", "3", "--output", out.string()}) == 0);
    std::ifstream in(out);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        ++count;
        CHECK(is_minimal(factorization_from_json(nlohmann::json::parse(line))));
    }
    CHECK(count == 8);
}

TEST_CASE("trajectories subcommand emits breakpoints only") {
    const auto in_path = temp_file("f3.json");
    {
        std::ofstream out(in_path);
        out << to_json(Factorization(3, {Transposition(1, 2), Transposition(1, 3)})).dump();
    }
    const auto out_path = temp_file("traj3.csv");
    REQUIRE(run_cli({"trajectories", "--input", in_path.string(), "--output", out_path.string()}) == 0);
    CHECK(slurp(out_path) ==
          "i,k,value\n"
          "-1,0,-1\n-1,1,1\n-1,2,0\n"
          "0,0,0\n0,2,1\n"
          "1,0,1\n1,1,-1\n");
}

TEST_CASE("dual subcommand reports faces and the dual factorization") {
    const auto in_path = temp_file("f10.json");
    {
        std::ofstream out(in_path);
        out << to_json(fixtures::plain10()).dump();
    }
    const auto out_path = temp_file("dual10.json");
    REQUIRE(run_cli({"dual", "--input", in_path.string(), "--output", out_path.string()}) == 0);
    const auto j = nlohmann::json::parse(slurp(out_path));
    CHECK(j.at("faces").size() == 10);
    CHECK(factorization_from_json(j.at("b")) == fixtures::b_of_plain10());

    const auto dot_path = temp_file("dual10.dot");
    REQUIRE(run_cli({"dual", "--input", in_path.string(), "--format", "dot", "--output",
                     dot_path.string()}) == 0);
    CHECK(slurp(dot_path).find("graph duality") == 0);
}

TEST_CASE("relabel subcommand produces the recentered tree") {
    const auto in_path = temp_file("f10b.json");
    {
        std::ofstream out(in_path);
        out << to_json(fixtures::plain10()).dump();
    }
    const auto out_path = temp_file("tree10.json");
    REQUIRE(run_cli({"relabel", "--input", in_path.string(), "--output", out_path.string()}) == 0);
    const EVTree t = evtree_from_json(nlohmann::json::parse(slurp(out_path)));
    for (int v = 0; v < 10; ++v) CHECK(t.label_of(v) == fixtures::tilde_label(v + 1));
}

TEST_CASE("limit-sample emits labelled fragments with trajectories") {
    const auto out_path = temp_file("limit.jsonl");
    REQUIRE(run_cli({"limit-sample", "--k", "1", "--samples", "2", "--seed", "5", "--A", "1",
                     "--output", out_path.string()}) == 0);
    std::ifstream in(out_path);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        ++count;
        const auto j = nlohmann::json::parse(line);
        CHECK(j.at("K").get<int>() == 1);
        CHECK(j.at("trajectories").size() == 3);
        for (const auto& t : j.at("trajectories")) {
            const int i = t.at("i").get<int>();
            CHECK(t.at("values").front().get<int>() == i);
            CHECK(t.at("values").back().get<int>() == i + 1);
            CHECK(t.at("breaks").front().get<double>() == 0.0);
        }
        CHECK(!j.at("entering").empty());
    }
    CHECK(count == 2);
}

TEST_CASE("limit-stats reports per-bin estimates") {
    const auto out_path = temp_file("stats.csv");
    REQUIRE(run_cli({"limit-stats", "--stat", "t1-marginal", "--samples", "4000", "--seed", "11",
                     "--output", out_path.string()}) == 0);
    const std::string csv = slurp(out_path);
    CHECK(csv.find("statistic,v1,v2,probability,source,n_or_limit") == 0);
    CHECK(csv.find("t1_marginal,1,,0.3") != std::string::npos);
    CHECK(csv.find(",kesten,limit") != std::string::npos);

    const auto w1 = temp_file("stats_w1.csv"), w3 = temp_file("stats_w3.csv");
    REQUIRE(run_cli({"limit-stats", "--stat", "t1-marginal", "--samples", "2000", "--seed", "7",
                     "--workers", "1", "--output", w1.string()}) == 0);
    REQUIRE(run_cli({"limit-stats", "--stat", "t1-marginal", "--samples", "2000", "--seed", "7",
                     "--workers", "3", "--output", w3.string()}) == 0);
    CHECK(slurp(w1) == slurp(w3));
}

TEST_CASE("MINFACT_SEED provides the default seed") {
    const auto env_out = temp_file("env_seed.jsonl"), flag_out = temp_file("flag_seed.jsonl");
    setenv("MINFACT_SEED", "777", 1);
    REQUIRE(run_cli({"sample", "--n", "20", "--samples", "2", "--output", env_out.string()}) == 0);
    unsetenv("MINFACT_SEED");
    REQUIRE(run_cli({"sample", "--n", "20", "--samples", "2", "--seed", "777", "--output",
                     flag_out.string()}) == 0);
    CHECK(slurp(env_out) == slurp(flag_out));

    // An explicit flag wins over the environment.
    setenv("MINFACT_SEED", "1", 1);
    const auto both_out = temp_file("both_seed.jsonl");
    REQUIRE(run_cli({"sample", "--n", "20", "--samples", "2", "--seed", "777", "--output",
                     both_out.string()}) == 0);
    unsetenv("MINFACT_SEED");
    CHECK(slurp(both_out) == slurp(flag_out));
}

TEST_CASE("limit-stats rejects tiny finite sizes") {
    CHECK(run_cli({"limit-stats", "--stat", "stays-positive", "--n", "3", "--samples", "10"}) == 2);
}
