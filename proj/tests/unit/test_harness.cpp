#include "ucplab/error.hpp"
#include "ucplab/harness.hpp"
#include "ucplab/rng.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ucplab;

namespace {

ExperimentConfig cfg(const std::string& experiment, std::initializer_list<std::string> overrides) {
    ExperimentConfig c;
    c.experiment = experiment;
    for (const auto& o : overrides) apply_override(c, o);
    return c;
}

CsvTable parse(const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
}

std::string body(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + '\n';
    return out;
}

double num(const CsvTable& t, std::size_t row, const std::string& col) {
    return std::stod(t.rows.at(row).at(t.column(col)));
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("seed derivation") {
    static_assert(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == splitmix64(7 ^ splitmix64(3)));
}

TEST_CASE("config parsing and overrides") {
    std::istringstream in("# comment\nexperiment = sweep\nL = 1,3,5  # trailing\n\ndelta=0.2\noutput = out.csv\n");
    auto c = parse_config(in);
    CHECK(c.experiment == "sweep");
    CHECK(c.output == "out.csv");
    CHECK(c.params.at("L") == "1,3,5");
    apply_override(c, "delta=0.3");
    CHECK(c.params.at("delta") == "0.3");
    CHECK_THROWS_AS(apply_override(c, "novalue"), InvalidArgument);
    std::istringstream bad("L 1\n");
    CHECK_THROWS_AS(parse_config(bad), InvalidArgument);
}

TEST_CASE("sweep example: three rows, positive constants") {
    const auto t = parse(run_to_string(cfg("sweep", {"L=1,3,5", "delta=0.2", "E=10", "dim=1", "bc=dirichlet"})));
    REQUIRE(t.rows.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(num(t, r, "lambda_min") > 0.0);
        CHECK(t.rows[r][t.column("error")].empty());
    }
    CHECK(num(t, 0, "L") == 1.0);
    CHECK(num(t, 2, "L") == 5.0);
    CHECK(t.comments.at(0) == "# ucplab experiment=sweep schema=sweep/v1");
}

TEST_CASE("property: reproducible bodies, independent of workers") {
    auto c = cfg("sweep", {"L=1,3", "delta=0.1,0.2", "potential=random", "K=1", "seeds=0:2", "workers=1"});
    const std::string a = run_to_string(c);
    CHECK(a == run_to_string(c));
    apply_override(c, "workers=3");
    CHECK(body(a) == body(run_to_string(c)));
    apply_override(c, "seeds=0:3");
    CHECK(body(a) != body(run_to_string(c)));
}

TEST_CASE("named validation errors before any compute") {
    CHECK_THROWS_WITH(validate(cfg("observability", {"delta=0.6"})), "delta must be in (0, 1/2)");
    CHECK_THROWS_WITH(validate(cfg("sweep", {"delta=0.2,0.6"})), "delta must be in (0, 1/2)");
    CHECK_THROWS_WITH(validate(cfg("sweep", {"L=0.5"})), doctest::Contains("L must be >= 1"));
    CHECK_THROWS_WITH(validate(cfg("sweep", {"K=-1"})), doctest::Contains("K must be >= 0"));
    CHECK_THROWS_WITH(validate(cfg("sweep", {"E=ten"})), doctest::Contains("finite number"));
    CHECK_THROWS_WITH(validate(cfg("sweep", {"bogus=1"})), doctest::Contains("unknown parameter 'bogus'"));
    CHECK_THROWS_WITH(validate(cfg("sweep", {"bc=neumann"})), doctest::Contains("bc must be"));
    CHECK_THROWS_WITH(validate(cfg("sweep", {"dim=4"})), doctest::Contains("dim must be"));
    CHECK_THROWS_WITH(validate(cfg("sweep", {"jitter=0.4", "arrangement=jitter"})),
                      doctest::Contains("jitter amplitude"));
    CHECK_THROWS_WITH(validate(cfg("sweep", {"a=5", "E=1"})), doctest::Contains("a <= E"));
    CHECK_THROWS_WITH(validate(cfg("sweep", {"N=0"})), doctest::Contains("N must be > 0"));
    CHECK_THROWS_WITH(validate(cfg("adversarial", {"restarts=0"})), doctest::Contains("restarts"));
    CHECK_THROWS_WITH(validate(cfg("adversarial", {"target=all"})), doctest::Contains("centers"));
    CHECK_THROWS_WITH(validate(cfg("adversarial", {"decay=2"})), doctest::Contains("decay"));
    CHECK_THROWS_WITH(validate(cfg("shannon", {"bandwidth=0"})), doctest::Contains("bandwidth K must be > 0"));
    CHECK_THROWS_WITH(validate(cfg("shannon", {"jitter=0.5"})), doctest::Contains("[0, 1/2)"));
    CHECK_THROWS_WITH(validate(cfg("shannon", {"truncation=0"})), doctest::Contains("truncation J"));
    CHECK_THROWS_WITH(validate(cfg("carleman", {"mu=0"})), doctest::Contains("mu must be > 0"));
    CHECK_THROWS_WITH(validate(cfg("carleman", {"L=1.5"})), doctest::Contains("B(0,1)"));
    CHECK_THROWS_WITH(validate(cfg("carleman", {"radii=0.1"})), doctest::Contains("rho_in"));
    CHECK_THROWS_WITH(validate(cfg("extend", {"Y=0"})), doctest::Contains("Y must be > 0"));
    CHECK_THROWS_WITH(validate(cfg("quc-check", {})), doctest::Contains("theta and G"));
    CHECK_THROWS_WITH(validate(cfg("quc-check", {"theta=disc:0,0:1", "G=ball:0,0:3"})),
                      doctest::Contains("ball:<center>"));
    CHECK_THROWS_WITH(validate(cfg("spectrum", {"workers=0"})), doctest::Contains("workers"));
    CHECK_THROWS_WITH(validate(cfg("summary", {})), doctest::Contains("inputs"));
    CHECK_THROWS_WITH(validate(cfg("everything", {})), doctest::Contains("unknown experiment"));
}

TEST_CASE("per-row failures land in the error column") {
    // One cube side leaves the window empty; the sweep keeps going.
    const auto t = parse(run_to_string(cfg("sweep", {"L=1,5", "delta=0.2", "E=5"})));
    REQUIRE(t.rows.size() == 2);
    CHECK_FALSE(t.rows[0][t.column("error")].empty());
    CHECK(t.rows[1][t.column("error")].empty());
    CHECK(num(t, 1, "lambda_min") > 0.0);
}

TEST_CASE("summary: single row, monomial slope, mixed-L minimum") {
    const auto one = parse(run_to_string(cfg("sweep", {"L=3", "delta=0.2"})));
    const auto s1 = report_summary({one});
    REQUIRE(s1.rows.size() == 2);
    CHECK(std::stod(s1.rows[0][s1.column("lambda_min_min")]) == num(one, 0, "lambda_min"));
    CHECK(std::stod(s1.rows[0][s1.column("ratio_max")]) == num(one, 0, "ratio"));

    for (int n : {1, 2, 3}) {
        const auto mono = parse(run_to_string(cfg("sweep", {"fixture=monomial", "monomial_n=" + std::to_string(n)})));
        const auto s = report_summary({mono});
        CHECK(std::stod(s.rows[0][s.column("slope")]) == doctest::Approx(2 * n + 1).epsilon(1e-4));
    }

    const auto mixed = parse(run_to_string(cfg("sweep", {"L=1,3,5", "delta=0.2"})));
    const auto sm = report_summary({mixed});
    double lo = 1.0;
    for (std::size_t r = 0; r < mixed.rows.size(); ++r) lo = std::min(lo, num(mixed, r, "lambda_min"));
    CHECK(std::stod(sm.rows.back()[sm.column("lambda_min_min")]) == lo);
    CHECK(sm.rows.back()[sm.column("group")] == "ALL");

    CsvTable broken;
    broken.columns = {"L", "delta"};
    CHECK_THROWS_WITH(report_summary({broken}), doctest::Contains("E, K, ratio, lambda_min"));
}

TEST_CASE("other experiments produce their tables") {
    const auto levels = parse(run_to_string(cfg("spectrum", {"L=3.141592653589793", "E=10", "h=0.01"})));
    CHECK(levels.rows.size() == 3);

    const auto sh = run_to_string(cfg("shannon", {"bandwidth=2"}));
    CHECK(sh.find("verdict=holds") != std::string::npos);
    CHECK(parse(sh).columns == std::vector<std::string>{"x", "f", "S_K f", "error"});

    const auto q = parse(run_to_string(cfg("quc-check", {"x=0,0", "theta=ball:0.9,0:0.1", "G=ball:0,0:14.5"})));
    CHECK(q.comments.back().find("failed=2R <= 2 dist(x, Theta)") != std::string::npos);

    const auto adv = run_to_string(cfg("adversarial", {"L=3", "restarts=2", "iterations=5"}));
    CHECK(adv.find("best_value=") != std::string::npos);

    const auto car = parse(run_to_string(cfg("carleman", {"n=48", "alphas=4,8"})));
    CHECK(car.rows.size() == 6);

    const auto ex = parse(run_to_string(cfg("extend", {"E=30", "slices=zero"})));
    CHECK(ex.columns == std::vector<std::string>{"m", "i0", "y", "F"});
}

TEST_CASE("file output with sidecars") {
    const auto dir = std::filesystem::temp_directory_path() / "ucplab_harness_test";
    std::filesystem::create_directories(dir);
    auto c = cfg("adversarial", {"L=3", "restarts=1", "iterations=3", "target=both", "K=1"});
    c.output = (dir / "adv.csv").string();
    std::ostringstream sink;
    run(c, sink);
    CHECK(sink.str().empty());
    CHECK(std::filesystem::exists(dir / "adv.csv"));
    CHECK(std::filesystem::exists(dir / "adv.csv.arrangement.csv"));
    CHECK(std::filesystem::exists(dir / "adv.csv.potential.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("worker resolution") {
    CHECK(resolve_workers(cfg("spectrum", {"workers=3"})) == 3);
    ::setenv("UCPLAB_WORKERS", "2", 1);
    CHECK(resolve_workers(cfg("spectrum", {})) == 2);
    ::setenv("UCPLAB_WORKERS", "x", 1);
    CHECK_THROWS_AS(resolve_workers(cfg("spectrum", {})), InvalidArgument);
    ::unsetenv("UCPLAB_WORKERS");
    CHECK(resolve_workers(cfg("spectrum", {})) >= 1);
}

}  // TEST_SUITE
