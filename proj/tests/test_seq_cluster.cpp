#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "storymap/errors.hpp"
#include "storymap/seq_cluster.hpp"

using namespace storymap;

namespace {

oracle::Matrix random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::normal_distribution<double> g;
    oracle::Matrix pts(n, std::vector<double>(dim));
    for (auto& p : pts)
        for (auto& v : p) v = g(rng);
    return pts;
}

void check_structure(const Dendrogram& d) {
    REQUIRE(d.merges.size() + 1 == d.leaf_count);
    for (std::size_t k = 0; k < d.merges.size(); ++k) {
        const auto& m = d.merges[k];
        CHECK(m.left_first <= m.left_last);
        CHECK(m.left_last < m.right_last);
        if (k > 0) CHECK(d.merges[k - 1].height <= m.height);
    }
    CHECK(d.merges.back().left_first == 1);
    CHECK(d.merges.back().right_last == d.leaf_count);
}

}  // namespace

TEST_CASE("three collinear points merge in forced order") {
    const auto d = cluster(std::vector<std::vector<double>>{{0.0}, {1.0}, {10.0}});
    REQUIRE(d.merges.size() == 2);
    CHECK(d.merges[0] == Merge{1, 1, 2, 1.0});
    CHECK(d.merges[1] == Merge{1, 2, 3, 10.0});
}

TEST_CASE("two points merge at their distance") {
    const auto d = cluster(std::vector<std::vector<double>>{{0.0, 0.0}, {3.0, 4.0}});
    REQUIRE(d.merges.size() == 1);
    CHECK(d.merges[0] == Merge{1, 1, 2, 5.0});
}

TEST_CASE("contiguity is enforced even when non-adjacent points coincide") {
    // 1 and 3 coincide but may not merge before one of them joins 2; the tie
    // between (1,2) and (2,3) goes to the left pair.
    const auto d = cluster(std::vector<std::vector<double>>{{0.0}, {5.0}, {0.0}, {6.0}});
    check_structure(d);
    CHECK(d.merges[0] == Merge{1, 1, 2, 5.0});
    CHECK(d.merges[1] == Merge{1, 2, 3, 5.0});
    CHECK(d.merges[2] == Merge{1, 3, 4, 6.0});
}

TEST_CASE("identical vectors merge at height zero from the left") {
    const auto d = cluster(oracle::Matrix(5, std::vector<double>{0.3, -0.2}));
    check_structure(d);
    for (std::size_t k = 0; k < d.merges.size(); ++k) {
        CHECK(d.merges[k].height == 0.0);
        CHECK(d.merges[k].left_first == 1);
        CHECK(d.merges[k].right_last == k + 2);
    }
}

TEST_CASE("cluster errors") {
    CHECK_THROWS_AS(cluster(std::vector<std::vector<double>>{{1.0, 2.0}, {1.0}}), DimensionMismatch);
    CHECK_THROWS_AS(cluster(std::vector<std::vector<double>>{{1.0}}), TooFewUnits);
}

TEST_CASE("nearest-neighbour chain equals the exhaustive rescanning oracle") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 600; ++round) {
        const auto n = 2 + rng() % 7;
        const auto pts = random_points(rng, n, 1 + rng() % 4);
        const auto d = cluster(pts);
        const auto ref = oracle::exhaustive_cluster(pts);
        REQUIRE(d.merges.size() == ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k) {
            CHECK(d.merges[k].left_first == ref[k].left_first);
            CHECK(d.merges[k].left_last == ref[k].left_last);
            CHECK(d.merges[k].right_last == ref[k].right_last);
            CHECK(d.merges[k].height == ref[k].height);
        }
    }
}

TEST_CASE("oracle equivalence holds on tie-heavy integer grids") {
    std::mt19937_64 rng(22);
    for (int round = 0; round < 400; ++round) {
        const auto n = 2 + rng() % 7;
        oracle::Matrix pts(n, std::vector<double>(1));
        for (auto& p : pts) p[0] = static_cast<double>(rng() % 3);
        const auto d = cluster(pts);
        const auto ref = oracle::exhaustive_cluster(pts);
        for (std::size_t k = 0; k < ref.size(); ++k) {
            CHECK(d.merges[k].left_first == ref[k].left_first);
            CHECK(d.merges[k].right_last == ref[k].right_last);
            CHECK(d.merges[k].left_last == ref[k].left_last);
            CHECK(d.merges[k].height == ref[k].height);
        }
    }
}

TEST_CASE("no inversions and contiguity on larger random inputs") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 100; ++round) {
        const auto d = cluster(random_points(rng, 10 + rng() % 90, 1 + rng() % 6));
        check_structure(d);
        // every merge joins intervals that exist at that point of the run
        std::vector<std::size_t> owner(d.leaf_count + 2);
        for (std::size_t i = 1; i <= d.leaf_count; ++i) owner[i] = i;
        std::vector<std::size_t> last(d.leaf_count + 2);
        for (std::size_t i = 1; i <= d.leaf_count; ++i) last[i] = i;
        for (const auto& m : d.merges) {
            CHECK(last[m.left_first] == m.left_last);
            CHECK(last[m.right_first()] == m.right_last);
            last[m.left_first] = m.right_last;
        }
    }
}

TEST_CASE("reversing the sequence mirrors the dendrogram") {
    std::mt19937_64 rng(24);
    for (int round = 0; round < 50; ++round) {
        const auto n = 3 + rng() % 20;
        auto pts = random_points(rng, n, 3);
        const auto fwd = cluster(pts);
        std::reverse(pts.begin(), pts.end());
        const auto rev = cluster(pts);
        std::vector<double> hf, hr;
        for (const auto& m : fwd.merges) hf.push_back(m.height);
        for (const auto& m : rev.merges) hr.push_back(m.height);
        CHECK(hf == hr);
        for (std::size_t k = 0; k < fwd.merges.size(); ++k) {
            const auto& a = fwd.merges[k];
            const auto& b = rev.merges[k];
            CHECK(b.left_first == n + 1 - a.right_last);
            CHECK(b.right_last == n + 1 - a.left_first);
            CHECK(b.left_last == n - a.left_last);
        }
    }
}

TEST_CASE("cut") {
    const auto d = cluster(std::vector<std::vector<double>>{{0.0}, {1.0}, {10.0}, {10.5}, {30.0}});
    CHECK(cut(d, 1) == std::vector<SegmentRange>{{1, 5}});
    CHECK(cut(d, 5) == std::vector<SegmentRange>{{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}});
    CHECK(cut(d, 2) == std::vector<SegmentRange>{{1, 4}, {5, 5}});
    CHECK(cut(d, 3) == std::vector<SegmentRange>{{1, 2}, {3, 4}, {5, 5}});
    CHECK_THROWS_AS(cut(d, 0), InvalidK);
    CHECK_THROWS_AS(cut(d, 6), InvalidK);

    // equal heights: the later merge is undone first
    const auto flat = cluster(oracle::Matrix(4, std::vector<double>{1.0}));
    CHECK(cut(flat, 2) == std::vector<SegmentRange>{{1, 3}, {4, 4}});
}

TEST_CASE("cut ranges always partition the sequence") {
    std::mt19937_64 rng(25);
    for (int round = 0; round < 50; ++round) {
        const auto n = 2 + rng() % 30;
        const auto d = cluster(random_points(rng, n, 2));
        for (std::size_t k = 1; k <= n; ++k) {
            const auto segs = cut(d, k);
            REQUIRE(segs.size() == k);
            CHECK(segs.front().first == 1);
            CHECK(segs.back().second == n);
            for (std::size_t s = 1; s < k; ++s) CHECK(segs[s].first == segs[s - 1].second + 1);
        }
    }
}

TEST_CASE("newick export and cophenetic heights") {
    const auto d = cluster(std::vector<std::vector<double>>{{0.0}, {1.0}, {10.0}});
    CHECK(to_newick(d) == "((1:1,2:1):9,3:10);");
    CHECK(d.cophenetic(1, 2) == 1.0);
    CHECK(d.cophenetic(3, 1) == 10.0);
    CHECK(d.cophenetic(2, 2) == 0.0);
}
