#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <map>
#include <set>

#include "storymap/errors.hpp"
#include "storymap/monte_carlo.hpp"

using namespace storymap;

namespace {

UnitSeries make_series(std::uint64_t seed, std::size_t n, std::size_t dim = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    UnitSeries s;
    s.projections.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    s.orientations.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < s.projections.rows(); ++i) {
        for (Eigen::Index c = 0; c < s.projections.cols(); ++c) s.projections(i, c) = g(rng);
        s.orientations.row(i) = s.projections.row(i).normalized();
    }
    for (std::size_t i = 0; i < n; ++i) s.lengths.push_back(static_cast<double>(10 + rng() % 300));
    s.orientation_valid.assign(n, true);
    return s;
}

RandomizationReport fake_report(std::array<std::pair<double, double>, kAttributeCount> fractions) {
    RandomizationReport r;
    r.n_trials = 100;
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        r.attributes[a].fraction_le = fractions[a].first;
        r.attributes[a].fraction_ge = fractions[a].second;
    }
    return r;
}

}  // namespace

TEST_CASE("trial permutations are valid and reproducible") {
    std::set<std::vector<std::size_t>> seen;
    for (std::uint64_t t = 0; t < 200; ++t) {
        auto p = trial_permutation(42, t, 12);
        CHECK(p == trial_permutation(42, t, 12));
        auto sorted = p;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::size_t> iota(12);
        std::iota(iota.begin(), iota.end(), std::size_t{0});
        CHECK(sorted == iota);
        seen.insert(std::move(p));
    }
    CHECK(seen.size() > 190);
    CHECK(trial_seed(1, 0) != trial_seed(2, 0));
    CHECK(trial_seed(1, 0) != trial_seed(1, 1));
}

TEST_CASE("permutations of three units cover all orders roughly uniformly") {
    std::map<std::vector<std::size_t>, int> counts;
    for (std::uint64_t t = 0; t < 6000; ++t) ++counts[trial_permutation(7, t, 3)];
    CHECK(counts.size() == 6);
    for (const auto& [perm, c] : counts) {
        CHECK(c > 850);
        CHECK(c < 1150);
    }
}

TEST_CASE("the identity permutation reproduces the real profile") {
    const auto s = make_series(1, 15);
    std::vector<std::size_t> id(15);
    std::iota(id.begin(), id.end(), std::size_t{0});
    CHECK(style_profile(s, id) == style_profile(s));
}

TEST_CASE("a permuted series evaluated in the inverse order is the original") {
    const auto s = make_series(2, 10);
    const auto perm = trial_permutation(3, 0, 10);
    UnitSeries shuffled = s;
    for (std::size_t i = 0; i < 10; ++i) {
        const auto src = static_cast<Eigen::Index>(perm[i]);
        shuffled.projections.row(static_cast<Eigen::Index>(i)) = s.projections.row(src);
        shuffled.orientations.row(static_cast<Eigen::Index>(i)) = s.orientations.row(src);
        shuffled.lengths[i] = s.lengths[perm[i]];
    }
    CHECK(style_profile(shuffled) == style_profile(s, perm));
    std::vector<std::size_t> inverse(10);
    for (std::size_t i = 0; i < 10; ++i) inverse[perm[i]] = i;
    CHECK(style_profile(shuffled, inverse) == style_profile(s));
}

TEST_CASE("constant lengths tie every trial on the length attributes") {
    auto s = make_series(4, 9);
    std::fill(s.lengths.begin(), s.lengths.end(), 50.0);
    const auto r = randomize_test(s, 99, 5);
    for (std::size_t a : {5u, 6u, 7u, 8u, 9u}) {
        CHECK(r.attributes[a - 1].fraction_le == 1.0);
        CHECK(r.attributes[a - 1].fraction_ge == 1.0);
        CHECK(r.attributes[a - 1].direction == Direction::both);
    }
}

TEST_CASE("counts are consistent with fractions and ties") {
    const auto s = make_series(6, 20);
    const auto r = randomize_test(s, 250, 9, 80.0);
    CHECK(r.n_units == 20);
    CHECK(r.n_trials == 250);
    for (const auto& c : r.attributes) {
        CHECK(c.trials_at_least_real + c.trials_at_most_real >= 250);
        CHECK(c.fraction_le == static_cast<double>(c.trials_at_least_real) / 250.0);
        CHECK(c.fraction_ge == static_cast<double>(c.trials_at_most_real) / 250.0);
    }
}

TEST_CASE("results do not depend on the worker count") {
    const auto s = make_series(8, 30);
    const auto one = randomize_test(s, 301, 77, 80.0, 1);
    CHECK(randomize_test(s, 301, 77, 80.0, 4) == one);
    CHECK(randomize_test(s, 301, 77, 80.0, 8) == one);
    CHECK(randomize_test(s, 301, 77, 80.0, 64) == one);
    CHECK(randomize_test(s, 301, 78, 80.0, 1) != one);
}

TEST_CASE("strictly decreasing lengths push signed tempo to the low tail") {
    auto s = make_series(10, 20);
    for (std::size_t i = 0; i < 20; ++i) s.lengths[i] = 400.0 - 17.0 * static_cast<double>(i);
    const auto r = randomize_test(s, 999, 11);
    CHECK(r.attributes[5].fraction_le >= 0.99);
    CHECK(r.attributes[5].direction == Direction::at_most);
}

TEST_CASE("randomization input errors") {
    CHECK_THROWS_AS(randomize_test(make_series(1, 2), 10, 1), TooFewUnits);
    CHECK_THROWS_AS(randomize_test(make_series(1, 5), 0, 1), InputError);
    CHECK_THROWS_AS(randomize_repeated(make_series(1, 5), 10, 1, 0), InputError);
}

TEST_CASE("repeated runs") {
    const auto s = make_series(12, 12);
    const auto r = randomize_repeated(s, 99, 3, 5);
    REQUIRE(r.repeated.has_value());
    CHECK(r.repeated->runs == 5);
    auto single = randomize_test(s, 99, 3);
    single.repeated = r.repeated;
    CHECK(single == r);
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        const double le = r.repeated->le_share[a] * 5.0;
        CHECK(le == doctest::Approx(std::round(le)));
        CHECK(r.repeated->le_share[a] >= 0.0);
        CHECK(r.repeated->le_share[a] <= 1.0);
    }
}

TEST_CASE("summarize_table keeps exactly the tails at or above the threshold") {
    std::array<std::pair<double, double>, kAttributeCount> f{};
    f.fill({0.5, 0.5});
    f[0] = {0.92, 0.08};
    f[5] = {0.10, 0.80};
    f[6] = {0.799, 0.2};
    f[8] = {1.0, 1.0};
    const std::vector<NamedReport> reports{{"alpha", fake_report(f)}};
    const auto rows = summarize_table(reports, 80.0);

    // filtering oracle
    std::vector<SignificanceRow> expected;
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        if (f[a].first * 100.0 >= 80.0)
            expected.push_back({"alpha", a + 1, Direction::at_most, static_cast<int>(std::lround(f[a].first * 100))});
        if (f[a].second * 100.0 >= 80.0)
            expected.push_back({"alpha", a + 1, Direction::at_least, static_cast<int>(std::lround(f[a].second * 100))});
    }
    CHECK(rows == expected);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == SignificanceRow{"alpha", 1, Direction::at_most, 92});
    CHECK(rows[1] == SignificanceRow{"alpha", 6, Direction::at_least, 80});

    std::array<std::pair<double, double>, kAttributeCount> quiet{};
    quiet.fill({0.4, 0.6});
    CHECK(summarize_table({{"beta", fake_report(quiet)}}, 80.0).empty());
}

TEST_CASE("format_significance_table") {
    const std::vector<SignificanceRow> rows{{"casablanca", 1, Direction::at_most, 92},
                                            {"x", 6, Direction::at_least, 80}};
    const auto text = format_significance_table(rows);
    CHECK(text.find("casablanca") != std::string::npos);
    CHECK(text.find("92%") != std::string::npos);
    CHECK(text.find(">=") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(format_significance_table({}).find("script") == 0);
}

TEST_CASE("lengths 100, 90, ..., 10 put signed tempo below at least 99% of trials") {
    auto s = make_series(14, 10);
    for (std::size_t i = 0; i < 10; ++i) s.lengths[i] = 100.0 - 10.0 * static_cast<double>(i);
    const auto r = randomize_test(s, 999, 15, 80.0, 2);
    CHECK(r.attributes[5].fraction_le >= 0.99);
}

TEST_CASE("a randomly ordered real sequence sits mid-distribution on average") {
    double sum = 0.0;
    const int experiments = 200;
    for (int e = 0; e < experiments; ++e) sum += randomize_test(make_series(1000 + e, 8), 99, e).attributes[0].fraction_le;
    CHECK(sum / experiments == doctest::Approx(0.5).epsilon(0.1));
}
