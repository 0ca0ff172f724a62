#include <catch2/catch_amalgamated.hpp>

#include "commission/metrics.hpp"
#include "commission/rng.hpp"
#include "naive_metrics.hpp"

#include <cmath>

using namespace commission;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SignalTrace trace(std::vector<double> r, std::vector<double> y) { return SignalTrace(std::move(r), std::move(y), 1e-3); }

} // namespace

TEST_CASE("compute_d", "[metrics]")
{
    CHECK(compute_d(trace({0, 2, 2, 0}, {0, 0, 0, 0})).d == 2.0);
    const auto v = render_profile(validation_profile());
    CHECK(compute_d(SignalTrace(v, v, 50e-6)).d == 2.55);
    CHECK_THROWS_AS(compute_d(trace({1, 1, 1}, {0, 0, 0})), DegenerateExcitation);
}

TEST_CASE("IAE and ITAE hand values", "[metrics]")
{
    const auto t = trace({0, 2, 2, 0}, {0, 0, 2, 0});
    const auto base = compute_d(t);
    CHECK_THAT(iae(t, base), WithinAbs(0.25, 1e-12));
    CHECK_THAT(itae(t, base), WithinAbs(1.0 / 3.0, 1e-12));

    const auto perfect = trace({0, 2, 2, 0}, {0, 2, 2, 0});
    CHECK(iae(perfect, base) == 0.0);
    CHECK(itae(perfect, base) == 0.0);

    // Error only at i = 0 carries zero time weight.
    const auto first = trace({0, 2, 2, 0}, {7, 2, 2, 0});
    CHECK(itae(first, base) == 0.0);
    CHECK(iae(first, base) > 0.0);
}

TEST_CASE("IAE is linear in the error at fixed d", "[metrics]")
{
    const std::vector<double> r{0, 2, 2, 2, 0, 0};
    const std::vector<double> e{0.1, -0.3, 0.2, 0.05, -0.1, 0.0};
    const NormalizationBase base{2.0};
    std::vector<double> y1(r.size()), y3(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        y1[i] = r[i] - e[i];
        y3[i] = r[i] - 3.0 * e[i];
    }
    CHECK_THAT(iae(trace(r, y3), base), WithinRel(3.0 * iae(trace(r, y1), base), 1e-12));
}

TEST_CASE("overshoot hand values", "[metrics]")
{
    SECTION("positive step")
    {
        const auto t = trace({0, 0, 2, 2, 2, 2}, {0, 0, 1.5, 2.3, 2.1, 2.0});
        CHECK_THAT(overshoot(t, detect_segments(t.reference())), WithinAbs(0.15, 1e-12));
    }
    SECTION("negative step is sign-projected")
    {
        const auto t = trace({2, 2, 0, 0, 0}, {2, 2, 0.5, -0.2, 0.0});
        CHECK_THAT(overshoot(t, detect_segments(t.reference())), WithinAbs(0.1, 1e-12));
    }
    SECTION("monotone response")
    {
        const auto t = trace({0, 2, 2, 2, 2}, {0, 0.5, 1.0, 1.5, 1.9});
        CHECK(overshoot(t, detect_segments(t.reference())) == 0.0);
    }
    SECTION("no transition")
    {
        const auto t = trace({1, 1, 1}, {0, 3, 1});
        CHECK(overshoot(t, detect_segments(t.reference())) == 0.0);
    }
    SECTION("transition with no following segment contributes zero")
    {
        const auto t = trace({0, 2}, {0, 5});
        SegmentMap m;
        m.segments = {{0, 1, 0.0, SegmentKind::zero}};
        m.transitions = {{1, 2.0, 1}};
        CHECK(overshoot(t, m) == 0.0);
    }
}

TEST_CASE("oscillation hand values", "[metrics]")
{
    const NormalizationBase base{2.0};
    SECTION("constant offset is removed")
    {
        const auto t = trace({1, 1, 1}, {0.8, 0.8, 0.8});
        CHECK_THAT(segment_oscillation(t, {0, 2, 1.0, SegmentKind::active}, base), WithinAbs(0.0, 1e-15));
    }
    SECTION("alternating ripple")
    {
        const auto t = trace({1, 1, 1, 1}, {0.9, 1.1, 0.9, 1.1});
        CHECK_THAT(segment_oscillation(t, {0, 3, 1.0, SegmentKind::active}, base), WithinAbs(0.05, 1e-12));
    }
    SECTION("perfect tracking")
    {
        const auto t = trace({0, 2, 2, 0}, {0, 2, 2, 0});
        CHECK(oscillation(t, detect_segments(t.reference()), base) == 0.0);
    }
    SECTION("singleton segments contribute zero")
    {
        const auto t = trace({0, 2, 0, 2}, {0.3, 1.0, -0.4, 2.5});
        CHECK_THAT(oscillation(t, detect_segments(t.reference()), base), WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("evaluate_objectives composition", "[metrics]")
{
    const auto r = render_profile(tuning_profile());
    CHECK(evaluate_objectives(SignalTrace(r, r, 50e-6)) == ObjectiveVector{0, 0, 0, 0});

    // The active segment [1,2] has errors [2,0]; zero-mean RMS 1, over d = 2.
    const auto v = evaluate_objectives(trace({0, 2, 2, 0}, {0, 0, 2, 0}));
    CHECK_THAT(v.iae, WithinAbs(0.25, 1e-12));
    CHECK_THAT(v.itae, WithinAbs(1.0 / 3.0, 1e-12));
    CHECK(v.os == 0.0);
    CHECK_THAT(v.osc, WithinAbs(0.5, 1e-12));

    CHECK_THROWS_AS(evaluate_objectives(trace({3, 3}, {0, 1})), DegenerateExcitation);
}

TEST_CASE("metrics match the naive oracle on random traces", "[metrics][property]")
{
    Rng rng(2024);
    for (int iter = 0; iter < 500; ++iter) {
        const auto [r, y] = oracle::random_trace(rng);
        const SignalTrace t(r, y, 1e-3);
        const auto v = evaluate_objectives(t);
        const auto o = oracle::naive_objectives(r, y);
        for (std::size_t m = 0; m < kObjectiveCount; ++m) {
            INFO("iteration " << iter << " metric " << kObjectiveNames[m]);
            REQUIRE(oracle::rel_close(v[m], o[m], 1e-12));
            REQUIRE(v[m] >= 0.0);
            REQUIRE(std::isfinite(v[m]));
        }
        REQUIRE(v.itae <= static_cast<double>(t.size()) * v.iae + 1e-15);
    }
}

TEST_CASE("metrics are amplitude invariant", "[metrics][property]")
{
    Rng rng(99);
    for (int iter = 0; iter < 200; ++iter) {
        auto [r, y] = oracle::random_trace(rng);
        const auto v = evaluate_objectives(SignalTrace(r, y, 1e-3));
        const double c = std::ldexp(1.0, static_cast<int>(rng.uniform_int(-4, 4)));
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] *= c;
            y[i] *= c;
        }
        const auto w = evaluate_objectives(SignalTrace(r, y, 1e-3), 1e-6 * c);
        for (std::size_t m = 0; m < kObjectiveCount; ++m) {
            REQUIRE(oracle::rel_close(v[m], w[m], 1e-12));
        }
    }
}

TEST_CASE("overshoot ignores the response outside post-transition segments", "[metrics][property]")
{
    Rng rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        auto [r, y] = oracle::random_trace(rng);
        const auto map = detect_segments(r);
        const SignalTrace t(r, y, 1e-3);
        const double before = overshoot(t, map);
        // Only segment 0 is not preceded by a transition.
        for (std::size_t i = map.segments[0].start; i <= map.segments[0].end; ++i) {
            y[i] = rng.uniform(-50, 50);
        }
        CHECK(overshoot(SignalTrace(r, y, 1e-3), map) == before);
    }
}
