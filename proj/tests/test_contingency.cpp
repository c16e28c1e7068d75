#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "oracles.hpp"
#include "storymap/contingency.hpp"
#include "storymap/errors.hpp"

using namespace storymap;

namespace {

SceneUnit unit(std::size_t index, std::vector<std::string> tokens) {
    SceneUnit u;
    u.index = index;
    u.tokens = std::move(tokens);
    return u;
}

std::vector<SceneUnit> random_units(std::mt19937_64& rng, std::size_t n, std::size_t vocab, std::size_t max_len) {
    std::vector<SceneUnit> units;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> toks;
        const auto len = rng() % (max_len + 1);
        for (std::size_t k = 0; k < len; ++k) toks.push_back(oracle::pseudo_word(rng, vocab));
        units.push_back(unit(i + 1, std::move(toks)));
    }
    return units;
}

}  // namespace

TEST_CASE("build_table presence and frequency") {
    const std::vector<SceneUnit> units{unit(1, {"the", "cat", "the"}), unit(2, {"a_dog", "the"})};
    const auto freq = build_table(units, CountMode::frequency);
    CHECK(freq.col_labels() == std::vector<std::string>{"a_dog", "cat", "the"});
    CHECK(freq.row_labels() == std::vector<std::size_t>{1, 2});
    CHECK(freq.dense() == std::vector<std::vector<std::uint64_t>>{{0, 1, 2}, {1, 0, 1}});
    CHECK(freq.total() == 5);

    const auto pres = build_table(units, CountMode::presence);
    CHECK(pres.dense() == std::vector<std::vector<std::uint64_t>>{{0, 1, 1}, {1, 0, 1}});
    CHECK(pres == freq.binarized());
}

TEST_CASE("identical token sets give identical rows") {
    const std::vector<SceneUnit> units{unit(1, {"x", "yy", "zz"}), unit(2, {"zz", "yy", "x"})};
    const auto t = build_table(units, CountMode::presence);
    CHECK(t.dense()[0] == t.dense()[1]);
}

TEST_CASE("build_table degenerate input") {
    const std::vector<SceneUnit> one{unit(1, {"aa"})};
    CHECK_THROWS_AS(build_table(one, CountMode::presence), DegenerateInput);
    const std::vector<SceneUnit> empty_vocab{unit(1, {}), unit(2, {})};
    CHECK_THROWS_AS(build_table(empty_vocab, CountMode::presence), DegenerateInput);
}

TEST_CASE("marginals, presence idempotence and permutation equivariance on random corpora") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 50; ++round) {
        auto units = random_units(rng, 2 + rng() % 10, 40, 30);
        units.front().tokens.push_back("anchor");
        const auto freq = build_table(units, CountMode::frequency);
        const auto pres = build_table(units, CountMode::presence);
        CHECK(pres == freq.binarized());

        const auto dense = freq.dense();
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < dense.size(); ++i) {
            std::uint64_t s = 0;
            for (auto v : dense[i]) s += v;
            CHECK(s == freq.row_sums()[i]);
            total += s;
        }
        for (std::size_t j = 0; j < freq.n_cols(); ++j) {
            std::uint64_t s = 0;
            for (const auto& r : dense) s += r[j];
            CHECK(s == freq.col_sums()[j]);
        }
        CHECK(total == freq.total());
        for (const auto& r : pres.dense())
            for (auto v : r) CHECK(v <= 1);

        auto shuffled = units;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto perm_table = build_table(shuffled, CountMode::frequency);
        CHECK(perm_table.col_labels() == freq.col_labels());
        for (std::size_t i = 0; i < shuffled.size(); ++i)
            CHECK(perm_table.dense()[i] == dense[shuffled[i].index - 1]);
    }
}

TEST_CASE("prune drops an all-zero column and logs it") {
    ContingencyTable t({1, 2}, {"aa", "bb", "cc"}, {{{0, 1}, {2, 1}}, {{0, 1}}}, CountMode::presence);
    const auto p = prune(t);
    CHECK(p.log.dropped_columns == std::vector<std::string>{"bb"});
    CHECK(p.log.dropped_rows.empty());
    CHECK(p.table.col_labels() == std::vector<std::string>{"aa", "cc"});
    CHECK(p.table.dense() == std::vector<std::vector<std::uint64_t>>{{1, 1}, {1, 0}});
}

TEST_CASE("prune is the identity without zero marginals") {
    ContingencyTable t({1, 2}, {"aa", "bb"}, {{{0, 2}}, {{1, 3}}}, CountMode::frequency);
    const auto p = prune(t);
    CHECK(p.log.empty());
    CHECK(p.table == t);
}

TEST_CASE("prune of an all-zero table fails") {
    ContingencyTable t({1, 2}, {"aa"}, {{}, {}}, CountMode::presence);
    CHECK_THROWS_AS(prune(t), EmptyAfterPrune);
}

TEST_CASE("prune matches a brute-force filter on random sparse tables") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 100; ++round) {
        auto dense = oracle::random_counts(rng, 10, 20, 1);
        for (auto& r : dense)
            for (auto& v : r)
                if (rng() % 3) v = 0;  // sparse
        std::vector<std::vector<ContingencyTable::Entry>> rows(10);
        std::vector<std::string> words;
        for (std::size_t j = 0; j < 20; ++j) words.push_back("w" + std::string(1, char('a' + j)));
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 20; ++j)
                if (dense[i][j]) rows[i].push_back({j, dense[i][j]});
        std::vector<std::size_t> labels(10);
        for (std::size_t i = 0; i < 10; ++i) labels[i] = i + 1;
        const ContingencyTable t(labels, words, rows, CountMode::presence);

        // brute force: keep rows/cols with non-zero sums
        std::vector<std::size_t> keep_r, keep_c;
        for (std::size_t i = 0; i < 10; ++i)
            if (std::any_of(dense[i].begin(), dense[i].end(), [](auto v) { return v > 0; })) keep_r.push_back(i);
        for (std::size_t j = 0; j < 20; ++j) {
            bool any = false;
            for (std::size_t i = 0; i < 10; ++i) any = any || dense[i][j] > 0;
            if (any) keep_c.push_back(j);
        }
        if (keep_r.empty()) {
            CHECK_THROWS_AS(prune(t), EmptyAfterPrune);
            continue;
        }
        std::vector<std::vector<std::uint64_t>> expected;
        for (auto i : keep_r) {
            std::vector<std::uint64_t> r;
            for (auto j : keep_c) r.push_back(dense[i][j]);
            expected.push_back(r);
        }
        const auto p = prune(t);
        CHECK(p.table.dense() == expected);
        CHECK(p.table.row_labels().size() == keep_r.size());
        CHECK(p.log.dropped_rows.size() == 10 - keep_r.size());
        CHECK(p.log.dropped_columns.size() == 20 - keep_c.size());
    }
}

TEST_CASE("zipf_summary ranks by count then word") {
    const std::vector<SceneUnit> units{unit(1, {"the", "rick", "the", "you"}), unit(2, {"you", "the", "ilsa"})};
    const auto z = zipf_summary(build_table(units, CountMode::frequency), 3);
    REQUIRE(z.ranked.size() == 3);
    CHECK(z.ranked[0] == std::pair<std::string, std::uint64_t>{"the", 3});
    CHECK(z.ranked[1] == std::pair<std::string, std::uint64_t>{"you", 2});
    CHECK(z.ranked[2] == std::pair<std::string, std::uint64_t>{"ilsa", 1});
    CHECK(z.frequency_histogram == std::vector<std::size_t>{0, 2, 1, 1});

    const std::vector<SceneUnit> single{unit(1, {"solo"}), unit(2, {"solo"})};
    CHECK(zipf_summary(build_table(single, CountMode::frequency), 10).ranked.size() == 1);
    CHECK_THROWS_AS(zipf_summary(build_table(single, CountMode::presence), 10), DegenerateInput);
}

TEST_CASE("zipf_summary matches a hash-count oracle") {
    std::mt19937_64 rng(5);
    const auto units = random_units(rng, 12, 60, 50);
    std::map<std::string, std::uint64_t> counts;
    for (const auto& u : units)
        for (const auto& t : u.tokens) ++counts[t];
    std::vector<std::pair<std::string, std::uint64_t>> expected(counts.begin(), counts.end());
    std::stable_sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    expected.resize(std::min<std::size_t>(15, expected.size()));

    const auto z = zipf_summary(build_table(units, CountMode::frequency), 15);
    CHECK(z.ranked == expected);
    for (std::size_t r = 1; r < z.ranked.size(); ++r) CHECK(z.ranked[r - 1].second >= z.ranked[r].second);
}
