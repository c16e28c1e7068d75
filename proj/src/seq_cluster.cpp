#include "storymap/seq_cluster.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <tuple>

#include "storymap/errors.hpp"

namespace storymap {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

double euclidean(const Eigen::MatrixXd& pts, Eigen::Index a, Eigen::Index b) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < pts.cols(); ++c) {
        const double d = pts(a, c) - pts(b, c);
        s += d * d;
    }
    return std::sqrt(s);
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct ChainMerge {
    double height;
    std::size_t boundary;  // 0-based first position of the right cluster
    std::size_t left_first;
    std::size_t right_last;
};

}  // namespace

double Dendrogram::cophenetic(std::size_t a, std::size_t b) const {
    if (a == b) return 0.0;
    if (a > b) std::swap(a, b);
    for (const auto& m : merges)
        if (m.left_first <= a && a <= m.left_last && m.right_first() <= b && b <= m.right_last) return m.height;
    throw InputError("positions outside the dendrogram");
}

Dendrogram cluster(const Eigen::MatrixXd& points) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (n < 2) throw TooFewUnits("clustering needs at least 2 units, got " + std::to_string(n));

    // Cluster ids are the 0-based position of their first member.
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            dist[a * n + b] = dist[b * n + a] =
                euclidean(points, static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));

    std::vector<std::size_t> last(n), prev(n), next(n);
    for (std::size_t i = 0; i < n; ++i) {
        last[i] = i;
        prev[i] = i == 0 ? kNone : i - 1;
        next[i] = i + 1 == n ? kNone : i + 1;
    }
    std::vector<bool> active(n, true);

    // Adjacent pairs are ordered by (distance, boundary); boundaries of the
    // current adjacent pairs are distinct, so the order is strict.
    auto key = [&](std::size_t x, std::size_t y) {
        const auto l = std::min(x, y), r = std::max(x, y);
        return std::pair{dist[l * n + r], r};
    };

    std::vector<ChainMerge> merges;
    merges.reserve(n - 1);
    std::vector<std::size_t> chain;
    chain.reserve(n);
    std::size_t remaining = n;
    std::size_t head = 0;

    while (remaining > 1) {
        if (chain.empty()) chain.push_back(head);
        const auto a = chain.back();
        std::size_t b = kNone;
        if (prev[a] != kNone) b = prev[a];
        if (next[a] != kNone && (b == kNone || key(a, next[a]) < key(a, b))) b = next[a];

        if (chain.size() >= 2 && chain[chain.size() - 2] == b) {
            chain.pop_back();
            chain.pop_back();
            const auto l = std::min(a, b), r = std::max(a, b);
            merges.push_back({dist[l * n + r], r, l, last[r]});

            // Lance-Williams update for complete link: d(l+r, c) = max.
            for (std::size_t c = 0; c < n; ++c) {
                if (!active[c] || c == l || c == r) continue;
                const double d = std::max(dist[l * n + c], dist[r * n + c]);
                dist[l * n + c] = dist[c * n + l] = d;
            }
            active[r] = false;
            last[l] = last[r];
            next[l] = next[r];
            if (next[r] != kNone) prev[next[r]] = l;
            --remaining;
        } else {
            chain.push_back(b);
        }
    }

    std::sort(merges.begin(), merges.end(), [](const ChainMerge& x, const ChainMerge& y) {
        return std::tie(x.height, x.boundary) < std::tie(y.height, y.boundary);
    });

    Dendrogram d;
    d.leaf_count = n;
    d.leaf_labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.leaf_labels[i] = i + 1;
    d.merges.reserve(merges.size());
    for (const auto& m : merges) d.merges.push_back({m.left_first + 1, m.boundary, m.right_last + 1, m.height});
    return d;
}

Dendrogram cluster(const std::vector<std::vector<double>>& points) {
    if (points.size() < 2) throw TooFewUnits("clustering needs at least 2 units, got " + std::to_string(points.size()));
    const auto dim = points.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim)
            throw DimensionMismatch("vector " + std::to_string(i + 1) + " has " + std::to_string(points[i].size()) +
                                    " components, expected " + std::to_string(dim));
        for (std::size_t c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = points[i][c];
    }
    return cluster(m);
}

namespace {

Dendrogram relabel(Dendrogram d, const std::vector<std::size_t>& labels) {
    if (labels.size() == d.leaf_count) d.leaf_labels = labels;
    return d;
}

}  // namespace

Dendrogram cluster_by_orientation(const CorrespondenceEmbedding& embedding) {
    if (embedding.n_rows() < embedding.zero_norm_rows.size() + 2)
        throw TooFewUnits("orientation clustering needs at least 2 rows away from the origin");
    return relabel(cluster(embedding.row_correlations), embedding.row_labels);
}

Dendrogram cluster_by_projection(const CorrespondenceEmbedding& embedding) {
    return relabel(cluster(embedding.row_projections), embedding.row_labels);
}

std::vector<SegmentRange> cut(const Dendrogram& dendrogram, std::size_t k) {
    const auto n = dendrogram.leaf_count;
    if (k < 1 || k > n) throw InvalidK("k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    // Heights are non-decreasing, so the last k-1 merges are the highest with
    // ties resolved toward the later merge.
    std::vector<std::size_t> starts{1};
    for (std::size_t m = dendrogram.merges.size() - (k - 1); m < dendrogram.merges.size(); ++m)
        starts.push_back(dendrogram.merges[m].right_first());
    std::sort(starts.begin(), starts.end());

    std::vector<SegmentRange> out;
    out.reserve(k);
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const auto stop = s + 1 < starts.size() ? starts[s + 1] - 1 : n;
        out.emplace_back(starts[s], stop);
    }
    return out;
}

std::string to_newick(const Dendrogram& d) {
    const auto n = d.leaf_count;
    if (n == 0) return ";";
    auto label = [&](std::size_t pos) {
        return std::to_string(pos < d.leaf_labels.size() ? d.leaf_labels[pos] : pos + 1);
    };
    if (d.merges.empty()) return label(0) + ";";

    // Node for each interval currently formed, keyed by its first position.
    struct Node {
        std::string text;
        double height;
    };
    std::vector<Node> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = {label(i), 0.0};

    for (const auto& m : d.merges) {
        const auto& left = nodes[m.left_first - 1];
        const auto& right = nodes[m.right_first() - 1];
        std::string text = "(" + left.text + ":" + format_number(m.height - left.height) + "," + right.text + ":" +
                           format_number(m.height - right.height) + ")";
        nodes[m.left_first - 1] = {std::move(text), m.height};
    }
    return nodes[0].text + ";";
}

}  // namespace storymap
