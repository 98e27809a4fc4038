// Exercises the CLI surface through the real binary: exit codes, output
// formats, reproducibility flags. Expects the binary path as argv[1].

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "gbs/bench_io.hpp"

namespace {

std::string g_cli;

int run(const std::string& args) {
    int rc = std::system((g_cli + " " + args).c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("exit codes: ok, config error, invalid state") {
    CHECK(run("sample --modes 1 --squeezing 0 --num-samples 2 --seed 1 --out cli_ok.jsonl") == 0);
    CHECK(run("probability --modes 1 --squeezing 0 --pattern 0 > cli_p.txt") == 0);
    CHECK(slurp("cli_p.txt") == "1\n");

    // config errors
    CHECK(run("sample --num-samples 2 --out /dev/null 2> /dev/null") == 2);  // no state given
    CHECK(run("2> /dev/null") == 2);                                         // missing subcommand
    CHECK(run("sample --modes 2 --squeezing 0.2 --format nope --out /dev/null 2> /dev/null") == 2);

    // invalid states
    std::ofstream bad("cli_bad_state.json");
    bad << R"({"m":1,"sigma_re":[0.25,0,0,0.25],"sigma_im":[0,0,0,0],)"
        << R"("mean_re":[0],"mean_im":[0]})";
    bad.close();
    CHECK(run("probability --state cli_bad_state.json --pattern 0 2> /dev/null") == 3);
    CHECK(run("validate --state cli_bad_state.json --strict > /dev/null") == 3);
    CHECK(run("sample --modes 1 --squeezing -0.4 --approx --num-samples 1"
              " --out /dev/null 2> /dev/null") == 3);
}

TEST_CASE("csv and jsonl outputs parse back") {
    REQUIRE(run("sample --modes 2 --squeezing 0.4 --num-samples 8 --seed 4 --n-max 6"
                " --out cli_rows.jsonl") == 0);
    REQUIRE(run("sample --modes 2 --squeezing 0.4 --num-samples 8 --seed 4 --n-max 6"
                " --format csv --out cli_rows.csv") == 0);
    std::ifstream j("cli_rows.jsonl"), c("cli_rows.csv");
    auto rows_j = gbs::bench::read_rows(j);
    auto rows_c = gbs::bench::read_rows(c);
    REQUIRE(rows_j.size() == 8);
    REQUIRE(rows_c.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(rows_j[i].pattern == rows_c[i].pattern);
        CHECK(rows_j[i].eta == rows_c[i].eta);
    }
}

TEST_CASE("GBS_SIM_THREADS is the fallback for --threads") {
    const std::string flags =
        " sample --modes 3 --squeezing 0.4 --num-samples 10 --seed 12 --n-max 6 --no-timing";
    REQUIRE(run("sample --modes 3 --squeezing 0.4 --num-samples 10 --seed 12 --n-max 6"
                " --no-timing --threads 2 --out cli_t2.jsonl") == 0);
    int rc = std::system(("env GBS_SIM_THREADS=2 " + g_cli + flags + " --out cli_env.jsonl").c_str());
    REQUIRE(WEXITSTATUS(rc) == 0);
    CHECK(slurp("cli_t2.jsonl") == slurp("cli_env.jsonl"));
}

TEST_CASE("benchmark subcommand fits generated rows") {
    REQUIRE(run("benchmark --modes 4 --squeezing 0.5 --num-samples 30 --seed 9 --n-max 5"
                " --out cli_bench.json --table cli_bench.dat") == 0);
    std::string json = slurp("cli_bench.json");
    CHECK(json.find("\"model\": \"exp\"") != std::string::npos);
    CHECK(slurp("cli_bench.dat").rfind("# N mean_seconds", 0) == 0);

    // too few buckets is a config error
    CHECK(run("benchmark --modes 1 --squeezing 0 --num-samples 3 --seed 1"
              " --out /dev/null 2> /dev/null") == 2);
}

int main(int argc, char** argv) {
    doctest::Context ctx;
    if (argc > 1) g_cli = argv[1];
    ctx.applyCommandLine(1, argv);
    return ctx.run();
}
