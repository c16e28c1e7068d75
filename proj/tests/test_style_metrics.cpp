#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "storymap/errors.hpp"
#include "storymap/style_metrics.hpp"

using namespace storymap;

namespace {

const std::vector<double> kScene43{51, 23, 99, 39, 30, 17, 50, 44, 38, 30, 46};

UnitSeries random_series(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::normal_distribution<double> g;
    UnitSeries s;
    s.projections.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    s.orientations.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < s.projections.rows(); ++i) {
        for (Eigen::Index c = 0; c < s.projections.cols(); ++c) s.projections(i, c) = g(rng);
        s.orientations.row(i) = s.projections.row(i) / s.projections.row(i).norm();
    }
    for (std::size_t i = 0; i < n; ++i) s.lengths.push_back(static_cast<double>(5 + rng() % 200));
    s.orientation_valid.assign(n, true);
    return s;
}

}  // namespace

TEST_CASE("movement_attrs") {
    CHECK(movement_attrs(Eigen::MatrixXd::Constant(4, 3, 0.7)).mean == 0.0);
    CHECK(movement_attrs(Eigen::MatrixXd::Constant(4, 3, 0.7)).variance == 0.0);

    Eigen::MatrixXd line(3, 1);
    line << 0, 1, 3;
    const auto m = movement_attrs(line);
    CHECK(m.mean == 2.5);
    CHECK(m.variance == oracle::pvar({1.0, 4.0}));
    CHECK(m.variance == 2.25);
    CHECK_THROWS_AS(movement_attrs(Eigen::MatrixXd::Zero(1, 2)), TooFewUnits);
}

TEST_CASE("movement_attrs matches a direct two-pass oracle") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 30; ++round) {
        const auto s = random_series(rng, 3 + rng() % 20, 1 + rng() % 5);
        std::vector<double> steps;
        for (Eigen::Index t = 0; t + 1 < s.projections.rows(); ++t) {
            double d = 0.0;
            for (Eigen::Index c = 0; c < s.projections.cols(); ++c) {
                const double x = s.projections(t + 1, c) - s.projections(t, c);
                d += x * x;
            }
            steps.push_back(d);
        }
        const auto m = movement_attrs(s.projections);
        CHECK(m.mean == doctest::Approx(oracle::mean(steps)).epsilon(1e-12));
        CHECK(m.variance == doctest::Approx(oracle::pvar(steps)).epsilon(1e-10));
    }
}

TEST_CASE("orientation_attrs") {
    Eigen::MatrixXd same(3, 2);
    same << 1, 0, 1, 0, 1, 0;
    const std::vector<bool> all(3, true);
    CHECK(orientation_attrs(same, all).mean == 0.0);

    Eigen::MatrixXd turn(2, 2);
    turn << 1, 0, 0, 1;
    CHECK(orientation_attrs(turn, {true, true}).mean == 2.0);

    // an invalid middle unit is skipped: steps are (1,0)->(0,1)->(1,0)
    Eigen::MatrixXd skip(4, 2);
    skip << 1, 0, 0, 0, 0, 1, 1, 0;
    const auto o = orientation_attrs(skip, {true, false, true, true});
    CHECK(o.mean == 2.0);
    CHECK(o.variance == 0.0);
    CHECK_THROWS_AS(orientation_attrs(skip, {false, false, false, true}), TooFewUnits);
}

TEST_CASE("orientation_attrs matches a direct oracle") {
    std::mt19937_64 rng(32);
    const auto s = random_series(rng, 15, 4);
    std::vector<double> steps;
    for (Eigen::Index t = 0; t + 1 < 15; ++t) steps.push_back((s.orientations.row(t + 1) - s.orientations.row(t)).squaredNorm());
    const auto o = orientation_attrs(s.orientations, s.orientation_valid);
    CHECK(o.mean == doctest::Approx(oracle::mean(steps)).epsilon(1e-12));
    CHECK(o.variance == doctest::Approx(oracle::pvar(steps)).epsilon(1e-10));
}

TEST_CASE("tempo_attrs on the scene-43 beat lengths") {
    const auto t = tempo_attrs(kScene43);
    CHECK(t.abs_mean == 25.5);
    CHECK(t.signed_mean == -0.5);

    const std::vector<double> constant(6, 40.0);
    CHECK(tempo_attrs(constant).abs_mean == 0.0);
    CHECK(tempo_attrs(constant).signed_mean == 0.0);

    const std::vector<double> falling{90, 70, 65, 20, 3};
    const auto f = tempo_attrs(falling);
    CHECK(f.signed_mean < 0.0);
    CHECK(f.abs_mean == -f.signed_mean);
    CHECK_THROWS_AS(tempo_attrs(std::vector<double>{3.0}), TooFewUnits);
}

TEST_CASE("rhythm_attrs") {
    const std::vector<double> constant(5, 12.0);
    const auto c = rhythm_attrs(constant);
    CHECK(c.mean == 0.0);
    CHECK(c.variance == 0.0);
    CHECK(c.signed_mean == 0.0);

    const auto two = rhythm_attrs(std::vector<double>{10, 20});
    CHECK(two.mean == 100.0);
    CHECK(two.signed_mean == 100.0);
    CHECK(two.variance == 0.0);

    std::vector<double> r, sr;
    for (std::size_t t = 0; t + 1 < kScene43.size(); ++t) {
        const double d = kScene43[t + 1] - kScene43[t];
        r.push_back(d * d);
        sr.push_back(d > 0 ? d * d : (d < 0 ? -d * d : 0.0));
    }
    const auto s = rhythm_attrs(kScene43);
    CHECK(s.mean == oracle::mean(r));
    CHECK(s.variance == doctest::Approx(oracle::pvar(r)).epsilon(1e-14));
    CHECK(s.signed_mean == oracle::mean(sr));
}

TEST_CASE("style_profile assembles the nine attributes and flags short sequences") {
    UnitSeries s;
    s.projections.resize(2, 1);
    s.projections << 0, 2;
    s.orientations.resize(2, 1);
    s.orientations << -1, 1;
    s.lengths = {10, 20};
    s.orientation_valid = {true, true};
    const auto p = style_profile(s);
    CHECK(p.insufficient_for_variance);
    CHECK(p.values == std::array<double, 9>{4, 0, 4, 0, 10, 10, 100, 0, 100});
    CHECK(p.attribute(7) == 100.0);
    CHECK(StyleProfile::attribute_name(5) == "absolute tempo");
}

TEST_CASE("translation of projections on a dyadic grid preserves movement exactly") {
    std::mt19937_64 rng(34);
    for (int round = 0; round < 50; ++round) {
        auto s = random_series(rng, 4 + rng() % 20, 3);
        for (Eigen::Index i = 0; i < s.projections.rows(); ++i)
            for (Eigen::Index c = 0; c < 3; ++c) s.projections(i, c) = static_cast<double>(rng() % 257) / 64.0 - 2.0;
        auto moved = s;
        const Eigen::RowVector3d shift(3.25, -1.5, 0.125);
        moved.projections.rowwise() += shift;
        const auto p = style_profile(s), q = style_profile(moved);
        CHECK(q.attribute(1) == p.attribute(1));
        CHECK(q.attribute(2) == p.attribute(2));
    }
}

TEST_CASE("attribute invariants on random sequences") {
    std::mt19937_64 rng(33);
    for (int round = 0; round < 100; ++round) {
        const auto n = 3 + rng() % 30;
        const auto s = random_series(rng, n, 1 + rng() % 4);
        const auto p = style_profile(s);
        CHECK(p.attribute(2) >= 0.0);
        CHECK(p.attribute(4) >= 0.0);
        CHECK(p.attribute(8) >= 0.0);
        CHECK(p.attribute(5) >= std::abs(p.attribute(6)));
        CHECK(p.attribute(7) >= std::abs(p.attribute(9)));

        // reversal
        std::vector<std::size_t> rev(n);
        std::iota(rev.rbegin(), rev.rend(), std::size_t{0});
        const auto r = style_profile(s, rev);
        for (std::size_t a : {1, 2, 3, 4, 5, 7, 8}) CHECK(r.attribute(a) == p.attribute(a));
        CHECK(r.attribute(6) == -p.attribute(6));
        CHECK(r.attribute(9) == -p.attribute(9));

        // non-integer lengths still reverse exactly
        auto frac = s;
        for (auto& l : frac.lengths) l = l / 7.0 + 0.1;
        const auto fp = style_profile(frac);
        const auto fr = style_profile(frac, rev);
        CHECK(fr.attribute(5) == fp.attribute(5));
        CHECK(fr.attribute(6) == -fp.attribute(6));
        CHECK(fr.attribute(9) == -fp.attribute(9));

        // length scaling by c
        auto scaled = s;
        const double c = 3.0;
        for (auto& l : scaled.lengths) l *= c;
        const auto q = style_profile(scaled);
        CHECK(q.attribute(5) == doctest::Approx(c * p.attribute(5)));
        CHECK(q.attribute(6) == doctest::Approx(c * p.attribute(6)));
        CHECK(q.attribute(7) == doctest::Approx(c * c * p.attribute(7)));
        CHECK(q.attribute(8) == doctest::Approx(c * c * c * c * p.attribute(8)));
        CHECK(q.attribute(9) == doctest::Approx(c * c * p.attribute(9)));
    }
}

TEST_CASE("translation of generic projections preserves movement to rounding") {
    std::mt19937_64 rng(35);
    for (int round = 0; round < 50; ++round) {
        auto s = random_series(rng, 4 + rng() % 20, 3);
        auto moved = s;
        moved.projections.rowwise() += Eigen::RowVector3d(0.37, -1.91, 2.2);
        const auto p = style_profile(s), q = style_profile(moved);
        CHECK(q.attribute(1) == doctest::Approx(p.attribute(1)).epsilon(1e-12));
        CHECK(q.attribute(2) == doctest::Approx(p.attribute(2)).epsilon(1e-10));
        for (std::size_t a = 3; a <= 9; ++a) CHECK(q.attribute(a) == p.attribute(a));
    }
}
