#include <catch2/catch_amalgamated.hpp>

#include "commission/pareto.hpp"
#include "pareto_oracles.hpp"

#include <algorithm>
#include <random>

using namespace commission;
using Catch::Matchers::WithinAbs;

namespace {

TrialRecord record(std::size_t idx, const ObjectivePoint& v)
{
    TrialRecord r;
    r.trial_index = idx;
    r.objectives = ObjectiveVector::from_array(v);
    return r;
}

ObjectivePoint random_vec(Rng& rng, int grid = 0)
{
    ObjectivePoint v;
    for (auto& x : v) {
        x = grid > 0 ? static_cast<double>(rng.uniform_int(0, grid)) : rng.uniform01();
    }
    return v;
}

const ReferencePoint kUnit{{1.0, 1.0, 1.0, 1.0}};

} // namespace

TEST_CASE("dominates examples", "[pareto]")
{
    CHECK(dominates(ObjectiveVector{1, 1, 1, 1}, ObjectiveVector{2, 2, 2, 2}));
    CHECK_FALSE(dominates(ObjectiveVector{1, 1, 1, 1}, ObjectiveVector{1, 1, 1, 1}));
    CHECK_FALSE(dominates(ObjectiveVector{1, 3, 1, 1}, ObjectiveVector{2, 2, 2, 2}));
    CHECK(dominates(ObjectiveVector{1, 2, 2, 2}, ObjectiveVector{2, 2, 2, 2}));
}

TEST_CASE("domination is a strict partial order", "[pareto][property]")
{
    Rng rng(1);
    for (int iter = 0; iter < 3000; ++iter) {
        const auto a = random_vec(rng, 3);
        const auto b = random_vec(rng, 3);
        const auto c = random_vec(rng, 3);
        REQUIRE_FALSE(dominates(a, a));
        REQUIRE_FALSE((dominates(a, b) && dominates(b, a)));
        if (dominates(a, b) && dominates(b, c)) {
            REQUIRE(dominates(a, c));
        }
        REQUIRE(dominates(a, b) == oracle::weakly_better_everywhere_and_strict_somewhere(a, b));
    }
}

TEST_CASE("ParetoFront insert semantics", "[pareto]")
{
    ParetoFront f;
    CHECK(f.insert(record(0, {2, 2, 2, 2})));
    CHECK_FALSE(f.insert(record(1, {3, 3, 3, 3})));
    CHECK(f.size() == 1);
    CHECK(f.insert(record(2, {1, 3, 1, 1})));
    CHECK(f.size() == 2);
    CHECK(f.insert(record(3, {1, 1, 1, 1})));
    CHECK(f.size() == 1);
    CHECK(f.contains_trial(3));
    CHECK_FALSE(f.insert(record(4, {1, 1, 1, 1})));
    CHECK(f.size() == 1);

    auto bad = record(5, {0, 0, 0, 0});
    bad.objectives.os = std::numeric_limits<double>::infinity();
    CHECK_FALSE(f.insert(bad));
}

TEST_CASE("incremental front equals the all-pairs filter", "[pareto][property]")
{
    Rng rng(3);
    for (int stream = 0; stream < 40; ++stream) {
        std::vector<ObjectivePoint> pts;
        ParetoFront f;
        for (std::size_t i = 0; i < 50; ++i) {
            pts.push_back(random_vec(rng, stream % 2 == 0 ? 4 : 0));
            f.insert(record(i, pts.back()));
        }
        const auto want = oracle::all_pairs_front({pts.begin(), pts.end()});
        std::vector<std::size_t> got;
        for (const auto& m : f.members()) {
            got.push_back(m.trial_index);
        }
        std::sort(got.begin(), got.end());
        REQUIRE(got == want);
    }
}

TEST_CASE("non_dominated_ranks", "[pareto]")
{
    const std::vector<ObjectivePoint> pts{{1, 1, 1, 1}, {2, 2, 2, 2}, {0, 3, 1, 1}, {3, 3, 3, 3}, {2, 2, 2, 2}};
    const auto ranks = non_dominated_ranks<ObjectivePoint>(pts);
    CHECK(ranks == std::vector<std::size_t>{0, 1, 0, 2, 1});
}

TEST_CASE("normalization bounds", "[pareto]")
{
    const std::vector<ObjectivePoint> pts{{1, 5, 2, 7}, {3, 5, 4, 9}};
    const auto b = NormalizationBounds::from_points(pts);
    CHECK(b.normalize(ObjectivePoint{1, 5, 2, 7}) == ObjectivePoint{0, 0, 0, 0});
    CHECK(b.normalize(ObjectivePoint{3, 5, 4, 9}) == ObjectivePoint{1, 0, 1, 1});
    std::size_t clamped = 0;
    const auto out = b.normalize(ObjectivePoint{4, 5, 0, 8}, &clamped);
    CHECK(out == ObjectivePoint{1, 0, 0, 0.5});
    CHECK(clamped == 2);
}

TEST_CASE("hypervolume hand values", "[pareto]")
{
    const std::vector<ObjectivePoint> one{{0.5, 0.5, 0.5, 0.5}};
    CHECK_THAT(hypervolume(one, kUnit), WithinAbs(0.0625, 1e-12));
    const std::vector<ObjectivePoint> two{{0.2, 0.6, 0.5, 0.5}, {0.6, 0.2, 0.5, 0.5}};
    CHECK_THAT(hypervolume(two, kUnit), WithinAbs(0.12, 1e-12));
    CHECK(hypervolume(std::vector<ObjectivePoint>{}, kUnit) == 0.0);

    const std::vector<ObjectivePoint> outside{{0.5, 0.5, 0.5, 0.5}, {0.5, 1.5, 0.5, 0.5}};
    try {
        hypervolume(outside, kUnit);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("point 1") != std::string::npos);
    }
}

TEST_CASE("hypervolume equals inclusion-exclusion on small sets", "[pareto][property]")
{
    Rng rng(17);
    for (int iter = 0; iter < 400; ++iter) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 8));
        std::vector<ObjectivePoint> pts;
        for (std::size_t i = 0; i < n; ++i) {
            // Include dominated points and duplicates, which the union absorbs.
            pts.push_back(random_vec(rng, iter % 3 == 0 ? 3 : 0));
            if (iter % 3 == 0) {
                for (auto& x : pts.back()) {
                    x /= 3.0;
                }
            }
        }
        const double want = oracle::inclusion_exclusion_volume({pts.begin(), pts.end()}, kUnit.coords);
        REQUIRE_THAT(hypervolume(pts, kUnit), WithinAbs(want, 1e-12));
    }
}

TEST_CASE("hypervolume is permutation invariant and monotone", "[pareto][property]")
{
    Rng rng(23);
    std::mt19937 shuffler(5);
    for (int iter = 0; iter < 50; ++iter) {
        auto pts = oracle::random_nondominated_front(rng, static_cast<std::size_t>(rng.uniform_int(2, 20)));
        std::vector<ObjectivePoint> v(pts.begin(), pts.end());
        const double base = hypervolume(v, kUnit);
        std::shuffle(v.begin(), v.end(), shuffler);
        REQUIRE_THAT(hypervolume(v, kUnit), WithinAbs(base, 1e-12));
        v.pop_back();
        REQUIRE(hypervolume(v, kUnit) <= base + 1e-12);
    }
}

TEST_CASE("hypervolume agrees with Monte Carlo", "[pareto][property]")
{
    Rng rng(31);
    for (int iter = 0; iter < 3; ++iter) {
        const auto pts = oracle::random_nondominated_front(rng, 10);
        const std::vector<ObjectivePoint> v(pts.begin(), pts.end());
        const auto mc = oracle::monte_carlo_volume(pts, kUnit.coords, 200000, rng);
        REQUIRE(std::abs(hypervolume(v, kUnit) - mc.value) <= 3.0 * mc.standard_error);
    }
}

TEST_CASE("hypervolume_trace", "[pareto]")
{
    SECTION("identical records give a constant trace")
    {
        std::vector<TrialRecord> recs;
        for (std::size_t i = 0; i < 6; ++i) {
            recs.push_back(record(i, {0.3, 0.4, 0.5, 0.6}));
        }
        const auto tr = hypervolume_trace(recs, NormalizationBounds::from_points(std::vector<ObjectivePoint>{{0, 0, 0, 0}, {1, 1, 1, 1}}));
        for (const double v : tr) {
            CHECK(v == tr.front());
        }
    }
    SECTION("trace is non-decreasing and matches per-prefix volume")
    {
        Rng rng(41);
        for (int study = 0; study < 10; ++study) {
            std::vector<TrialRecord> recs;
            for (std::size_t i = 0; i < 30; ++i) {
                auto v = random_vec(rng);
                for (auto& x : v) {
                    x = 10.0 * x * x; // skewed raw scale
                }
                recs.push_back(record(i, v));
            }
            const auto bounds = NormalizationBounds::from_records(recs);
            const auto tr = hypervolume_trace(recs, bounds);
            REQUIRE(tr.size() == recs.size());
            for (std::size_t t = 1; t < tr.size(); ++t) {
                REQUIRE(tr[t] >= tr[t - 1] - 1e-12);
            }
            // The last element against an independent oracle on the normalized front.
            std::vector<oracle::Vec4> norm;
            for (const auto& r : recs) {
                norm.push_back(bounds.normalize(r.objectives.as_array()));
            }
            std::vector<oracle::Vec4> front;
            for (const auto i : oracle::all_pairs_front(norm)) {
                front.push_back(norm[i]);
            }
            const ReferencePoint ref;
            if (front.size() <= 14) {
                REQUIRE_THAT(tr.back(), WithinAbs(oracle::inclusion_exclusion_volume(front, ref.coords), 1e-10));
            }
        }
    }
}
