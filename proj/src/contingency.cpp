#include "storymap/contingency.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "storymap/errors.hpp"

namespace storymap {

std::string to_string(CountMode mode) {
    return mode == CountMode::presence ? "presence" : "frequency";
}

CountMode count_mode_from_string(const std::string& name) {
    if (name == "presence") return CountMode::presence;
    if (name == "frequency") return CountMode::frequency;
    throw InputError("unknown count mode '" + name + "' (expected presence or frequency)");
}

ContingencyTable::ContingencyTable(std::vector<std::size_t> row_labels, std::vector<std::string> col_labels,
                                   std::vector<std::vector<Entry>> rows, CountMode mode)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      rows_(std::move(rows)),
      mode_(mode),
      row_sums_(row_labels_.size(), 0),
      col_sums_(col_labels_.size(), 0) {
    if (rows_.size() != row_labels_.size()) throw DimensionMismatch("row data does not match row labels");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        std::size_t prev = 0;
        bool first = true;
        for (const auto& e : rows_[i]) {
            if (e.col >= col_labels_.size() || (!first && e.col <= prev) || e.count == 0)
                throw DimensionMismatch("row " + std::to_string(i) + " has a malformed sparse entry");
            if (mode_ == CountMode::presence && e.count != 1)
                throw DimensionMismatch("presence table entry differs from 1");
            row_sums_[i] += e.count;
            col_sums_[e.col] += e.count;
            prev = e.col;
            first = false;
        }
        total_ += row_sums_[i];
    }
}

std::uint64_t ContingencyTable::at(std::size_t i, std::size_t j) const {
    const auto& r = rows_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t c) { return e.col < c; });
    return (it != r.end() && it->col == j) ? it->count : 0;
}

std::size_t ContingencyTable::nonzeros() const {
    std::size_t nnz = 0;
    for (const auto& r : rows_) nnz += r.size();
    return nnz;
}

std::vector<std::vector<std::uint64_t>> ContingencyTable::dense() const {
    std::vector<std::vector<std::uint64_t>> out(n_rows(), std::vector<std::uint64_t>(n_cols(), 0));
    for (std::size_t i = 0; i < n_rows(); ++i)
        for (const auto& e : rows_[i]) out[i][e.col] = e.count;
    return out;
}

ContingencyTable ContingencyTable::transposed() const {
    std::vector<std::vector<Entry>> cols(n_cols());
    for (std::size_t i = 0; i < n_rows(); ++i)
        for (const auto& e : rows_[i]) cols[e.col].push_back({i, e.count});
    std::vector<std::size_t> labels(n_cols());
    std::iota(labels.begin(), labels.end(), std::size_t{1});
    std::vector<std::string> words;
    words.reserve(n_rows());
    for (auto r : row_labels_) words.push_back(std::to_string(r));
    return ContingencyTable(std::move(labels), std::move(words), std::move(cols), mode_);
}

ContingencyTable ContingencyTable::binarized() const {
    auto rows = rows_;
    for (auto& r : rows)
        for (auto& e : r) e.count = 1;
    return ContingencyTable(row_labels_, col_labels_, std::move(rows), CountMode::presence);
}

ContingencyTable build_table(std::span<const SceneUnit> units, CountMode mode) {
    if (units.size() < 2) throw DegenerateInput("need at least 2 units, got " + std::to_string(units.size()));

    std::map<std::string, std::size_t> vocab;
    for (const auto& u : units)
        for (const auto& t : u.tokens) vocab.emplace(t, 0);
    if (vocab.empty()) throw DegenerateInput("combined vocabulary is empty");

    std::vector<std::string> words;
    words.reserve(vocab.size());
    for (auto& [w, id] : vocab) {
        id = words.size();
        words.push_back(w);
    }

    std::vector<std::size_t> labels;
    std::vector<std::vector<ContingencyTable::Entry>> rows;
    labels.reserve(units.size());
    rows.reserve(units.size());
    for (const auto& u : units) {
        std::vector<std::size_t> ids;
        ids.reserve(u.tokens.size());
        for (const auto& t : u.tokens) ids.push_back(vocab.at(t));
        std::sort(ids.begin(), ids.end());
        std::vector<ContingencyTable::Entry> row;
        for (std::size_t k = 0; k < ids.size();) {
            std::size_t run = k;
            while (run < ids.size() && ids[run] == ids[k]) ++run;
            row.push_back({ids[k], mode == CountMode::presence ? 1 : static_cast<std::uint64_t>(run - k)});
            k = run;
        }
        labels.push_back(u.index);
        rows.push_back(std::move(row));
    }
    return ContingencyTable(std::move(labels), std::move(words), std::move(rows), mode);
}

PrunedTable prune(const ContingencyTable& table) {
    PrunedTable out;
    std::vector<std::size_t> col_map(table.n_cols(), 0);
    std::vector<std::string> words;
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
        if (table.col_sums()[j] == 0) {
            out.log.dropped_columns.push_back(table.col_labels()[j]);
        } else {
            col_map[j] = words.size();
            words.push_back(table.col_labels()[j]);
        }
    }
    std::vector<std::size_t> labels;
    std::vector<std::vector<ContingencyTable::Entry>> rows;
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        if (table.row_sums()[i] == 0) {
            out.log.dropped_rows.push_back(table.row_labels()[i]);
            continue;
        }
        std::vector<ContingencyTable::Entry> row;
        for (const auto& e : table.row(i)) row.push_back({col_map[e.col], e.count});
        labels.push_back(table.row_labels()[i]);
        rows.push_back(std::move(row));
    }
    if (labels.empty() || words.empty()) throw EmptyAfterPrune("no non-zero row or column remains");
    out.table = ContingencyTable(std::move(labels), std::move(words), std::move(rows), table.mode());
    return out;
}

ZipfSummary zipf_summary(const ContingencyTable& table, std::size_t top_k) {
    if (table.mode() != CountMode::frequency) throw DegenerateInput("Zipf summary needs a frequency-mode table");
    std::vector<std::size_t> order(table.n_cols());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& sums = table.col_sums();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sums[a] != sums[b]) return sums[a] > sums[b];
        return table.col_labels()[a] < table.col_labels()[b];
    });

    ZipfSummary z;
    const auto k = std::min(top_k, order.size());
    z.ranked.reserve(k);
    for (std::size_t r = 0; r < k; ++r) z.ranked.emplace_back(table.col_labels()[order[r]], sums[order[r]]);
    const std::uint64_t max_f = order.empty() ? 0 : sums[order.front()];
    z.frequency_histogram.assign(static_cast<std::size_t>(max_f) + 1, 0);
    for (auto f : sums) ++z.frequency_histogram[static_cast<std::size_t>(f)];
    return z;
}

}  // namespace storymap
