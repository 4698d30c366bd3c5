#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "gpoo/analysis.hpp"
#include "gpoo/oo_engine.hpp"
#include "gpoo/partition.hpp"

using namespace gpoo;

TEST_CASE("harmonic numbers") {
    CHECK(harmonic_number(1) == 1.0);
    CHECK(harmonic_number(4) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
    CHECK(harmonic_number(1'000'000) == doctest::Approx(14.3927267228657).epsilon(1e-13));
}

TEST_CASE("integer logarithm") {
    CHECK(floor_log2(1) == 0);
    CHECK(floor_log2(2) == 1);
    CHECK(floor_log2(3) == 1);
    CHECK(floor_log2(1024) == 10);
    CHECK(floor_log2(1025) == 10);
}

TEST_CASE("compensated summation") {
    CompensatedSum s;
    s.add(1e16);
    for (int i = 0; i < 10; ++i) s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == 10.0);
}

TEST_CASE("deviation inequality edge cases") {
    const auto se = KernelSpec::squared_exponential(0.1);
    const Point x = Point::Constant(3, 0.2);
    const Point y = x + Point::Unit(3, 0) * 0.1;
    const auto zero_u = deviation_mc(se, x, y, 0.0, 2000, 1);
    CHECK(zero_u.bound == 2.0);
    CHECK(zero_u.empirical == 1.0);
    const auto same = deviation_mc(se, x, x, 0.5, 2000, 1);
    CHECK(same.empirical == 0.0);
    CHECK(same.bound == 0.0);
    CHECK_THROWS((void)deviation_mc(se, x, y, 1.0, 10, 1));
}

TEST_CASE("deviation inequality against the exact tail") {
    const auto se = KernelSpec::squared_exponential(0.1);
    const Point x = Point::Constant(3, 0.2);
    const Point y = x + Point::Unit(3, 0) * 0.1;
    const std::size_t trials = 100'000;
    const auto r = deviation_mc(se, x, y, 1.0, trials, 7);
    CHECK(r.distance == doctest::Approx(0.887095643419994).epsilon(1e-12));
    CHECK(r.exact == doctest::Approx(0.259626582249627).epsilon(1e-10));
    CHECK(r.bound == doctest::Approx(1.0594751668819313).epsilon(1e-12));
    const double sigma = std::sqrt(r.exact * (1.0 - r.exact) / static_cast<double>(trials));
    CHECK(std::abs(r.empirical - r.exact) <= 4.0 * sigma);
    CHECK(r.empirical <= r.bound);
    CHECK(r.trials == trials);
}

TEST_CASE("cumulative regret series") {
    const auto one = regret_series([](std::size_t) { return 1.0; }, 37);
    CHECK(prop1_bound(one, 1.0) == 37.0);
    const auto single = regret_series([](std::size_t h) { return 3.0 / (h + 1.0); }, 1);
    CHECK(prop1_bound(single, 4.0) == 6.0);
    const MetricAssumption a{std::sqrt(20.0), 1.0, 3};
    const auto s = regret_series([&](std::size_t h) { return lemma3_bound(a, h); }, 1000);
    CHECK(prop1_bound(s, 1.0) == doctest::Approx(2608.486912578107).epsilon(1e-13));
    CHECK(s.terms.size() == 1000);
    for (std::size_t n = 1; n < s.terms.size(); ++n) CHECK(s.terms[n] <= s.terms[n - 1]);
    CHECK(s.harmonic == doctest::Approx(harmonic_number(1000)));
}

TEST_CASE("series envelope over horizons") {
    const MetricAssumption unit{1.0, 1.0, 2};
    const auto n1 = prop2_check(unit, 1);
    CHECK(n1.lhs == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(n1.rhs == doctest::Approx(n1.lhs * std::sqrt(2.0)));
    CHECK(prop2_check(unit, 10'000).holds());
    const MetricAssumption rough{1.0, 0.5, 3};
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t N : {1000u, 10'000u, 100'000u}) {
        const auto c = prop2_check(rough, N);
        CHECK(c.holds());
        CHECK(c.lhs / static_cast<double>(N) < prev);
        prev = c.lhs / static_cast<double>(N);
    }
    CHECK_THROWS((void)prop2_check({1.0, 1.0, 1}, 10));
}

TEST_CASE("hölder self-check") {
    const auto one = hoelder_harmonic_selfcheck(1, 2.0, 2.0);
    CHECK(one.proof_sequence.lhs == doctest::Approx(one.proof_sequence.rhs));
    CHECK(hoelder_harmonic_selfcheck(500, 2.0, 2.0, 3).pass());
    CHECK(hoelder_harmonic_selfcheck(5000, 3.0, 1.5, 4).pass());
    CHECK_THROWS((void)hoelder_harmonic_selfcheck(10, 2.0, 3.0));
}

TEST_CASE("regret guard") {
    Objective flat;
    flat.name = "flat";
    flat.domain = Box::unit(2);
    flat.fn = [](const Point&) { return 0.0; };
    flat.known_best = 0.0;
    GpooConfig cfg{KernelSpec::squared_exponential(0.2), {}, {}};
    cfg.options.budget = 50;
    CHECK(regret_guard_holds(run_gpoo(flat, cfg)));

    std::vector<RunResult> honest, forced;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Objective obj = on_model_objective(KernelSpec::squared_exponential(0.1), Box::unit(3), 21, s);
        GpooConfig g{KernelSpec::squared_exponential(0.1), {}, {}};
        g.options.budget = 300;
        honest.push_back(run_gpoo(obj, g));
        g.beta.mode = BetaMode::Fixed;
        g.beta.value = 0.0;
        forced.push_back(run_gpoo(obj, g));
    }
    CHECK(empirical_regret_guard(honest, 0.01).pass());
    const auto broken = empirical_regret_guard(forced, 0.01);
    CHECK(broken.fraction < 0.5);
    CHECK_FALSE(broken.pass());
    RunResult unknown;
    CHECK_THROWS((void)regret_guard_holds(unknown));
}

TEST_CASE("theory report") {
    const auto r = verify_theory("prop2", 0);
    REQUIRE(r.size() == 1);
    CHECK(r[0].pass);
    const nlohmann::json j = r[0];
    for (const char* key : {"check", "lhs", "rhs", "pass", "trials", "seed"}) CHECK(j.contains(key));
    CHECK(j["check"] == "prop2");
    CHECK_THROWS_AS((void)verify_theory("nope", 0), std::invalid_argument);
    CHECK(theory_check_names().size() == 8);
}
