#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "kurastab/bifurcation.hpp"
#include "kurastab/csv.hpp"
#include "kurastab/errors.hpp"

using namespace kurastab;
namespace fs = std::filesystem;

TEST_CASE("cauchy sweep has one pitchfork at K = 2") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    const auto d = sweep(g, 1.55, 2.95, 0.1);
    REQUIRE(d.events.size() == 1);
    CHECK(d.events[0].type == "pitchfork");
    CHECK(std::abs(d.events[0].K - 2.0) <= d.events[0].bracket + 1e-9);
    CHECK(d.events[0].bracket <= 0.1 / 32 + 1e-12);

    int hom = 0, pls = 0;
    for (const auto& row : d.rows) {
        if (row.branch == 0) {
            ++hom;
            CHECK(row.stability == (row.K < 2.0 ? "stable" : "unstable"));
        } else {
            ++pls;
            CHECK(row.K > 2.0);
            CHECK(std::abs(row.r - std::sqrt(1 - 2 / row.K)) < 1e-8);
            CHECK(row.stability == "stable");
        }
    }
    CHECK(hom == 15);
    CHECK(pls == 10);
}

TEST_CASE("multistart and continuation agree") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    SweepOptions opt;
    opt.mode = SweepMode::Multistart;
    const auto a = sweep(g, 2.2, 2.6, 0.2, opt);
    const auto b = sweep(g, 2.2, 2.6, 0.2);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(std::abs(a.rows[i].r - b.rows[i].r) < 1e-9);
}

TEST_CASE("sweep arguments") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    CHECK_THROWS_AS(sweep(g, 2.0, 1.0, 0.1), ValidationError);
    CHECK_THROWS_AS(sweep(g, 1.0, 2.0, 0.0), ValidationError);
}

TEST_CASE("diagram files") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    // the grid hits K = 2 exactly, where f_hom is marginal
    const auto d = sweep(g, 1.8, 2.4, 0.2);
    REQUIRE(d.events.size() == 1);
    CHECK(d.events[0].type == "pitchfork");
    const fs::path dir = fs::temp_directory_path() / "kurastab_diagram_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    emit_diagram(d, dir, "cauchy");
    const auto rows = io::parse_csv(io::read_file(dir / "cauchy_rows.csv"));
    REQUIRE(rows.size() == d.rows.size() + 1);
    CHECK(rows[0][0] == "K");
    CHECK(std::stod(rows[1][0]) == doctest::Approx(d.rows[0].K));
    const auto events = io::parse_csv(io::read_file(dir / "cauchy_events.csv"));
    CHECK(events.size() == d.events.size() + 1);
    const auto plot = io::read_file(dir / "cauchy_plot.gp");
    CHECK(plot.find("cauchy_rows.csv") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("csv round trip") {
    io::CsvTable t({"a", "b"});
    t.add_numbers({0.1, -2.5e-13});
    t.add_numbers({1.0 / 3.0, 12345678.9});
    const auto parsed = io::parse_csv(t.str());
    REQUIRE(parsed.size() == 3);
    CHECK(std::stod(parsed[1][1]) == -2.5e-13);
    CHECK(std::abs(std::stod(parsed[2][0]) - 1.0 / 3.0) < 1e-12);
    CHECK(io::fmt(0.1) == "0.1");
    const fs::path blocker = fs::temp_directory_path() / "kurastab_blocker";
    io::write_atomic(blocker, "x");
    CHECK_THROWS_AS(io::write_atomic(blocker / "x.csv", "x"), IoError);
    fs::remove(blocker);
}
