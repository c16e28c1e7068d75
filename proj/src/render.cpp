#include "storymap/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "storymap/errors.hpp"

namespace storymap::render {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string svg_open(double w, double h, const std::string& title) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w) << "\" height=\"" << num(h)
       << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n"
       << "<title>" << escape(title) << "</title>\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h) << "\" fill=\"white\"/>\n"
       << "<text x=\"" << num(w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"16\">" << escape(title) << "</text>\n";
    return os.str();
}

std::string leaf_label(const Dendrogram& d, std::size_t pos) {
    return std::to_string(pos < d.leaf_labels.size() ? d.leaf_labels[pos] : pos + 1);
}

}  // namespace

std::string dendrogram_svg(const Dendrogram& d, const std::string& title) {
    const std::size_t n = d.leaf_count;
    const double left = 70, right = 30, top = 50, bottom = 60;
    const double spacing = n > 60 ? 12.0 : 22.0;
    const double plot_w = std::max(500.0, spacing * static_cast<double>(n));
    const double plot_h = 380;
    const double w = left + plot_w + right, h = top + plot_h + bottom;

    double max_h = 0.0;
    for (const auto& m : d.merges) max_h = std::max(max_h, m.height);
    const double scale = max_h > 0.0 ? plot_h / max_h : 0.0;
    auto y_of = [&](double height) { return top + plot_h - height * scale; };
    const double step = plot_w / static_cast<double>(std::max<std::size_t>(n, 1));

    std::ostringstream os;
    os << svg_open(w, h, title);

    // height axis
    os << "<g font-family=\"sans-serif\" font-size=\"10\" stroke=\"none\" fill=\"black\">\n";
    os << "<line x1=\"" << num(left - 10) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left - 10) << "\" y2=\""
       << num(top + plot_h) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double hv = max_h * t / 4.0;
        const double y = y_of(hv);
        os << "<line x1=\"" << num(left - 14) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left - 10) << "\" y2=\""
           << num(y) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(left - 16) << "\" y=\"" << num(y + 3) << "\" text-anchor=\"end\">" << num(hv)
           << "</text>\n";
    }
    os << "</g>\n";

    struct Node {
        double x;
        double height;
    };
    std::vector<Node> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = {left + step * (static_cast<double>(i) + 0.5), 0.0};

    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    for (const auto& m : d.merges) {
        const auto l = nodes[m.left_first - 1];
        const auto r = nodes[m.right_first() - 1];
        const double ym = y_of(m.height);
        os << "<path d=\"M " << num(l.x) << " " << num(y_of(l.height)) << " V " << num(ym) << " H " << num(r.x)
           << " V " << num(y_of(r.height)) << "\"/>\n";
        nodes[m.left_first - 1] = {(l.x + r.x) / 2.0, m.height};
    }
    os << "</g>\n";

    os << "<g font-family=\"sans-serif\" font-size=\"" << (n > 60 ? 8 : 10) << "\" fill=\"black\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double x = left + step * (static_cast<double>(i) + 0.5);
        const double y = top + plot_h + 14;
        os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"middle\">" << leaf_label(d, i)
           << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string dendrogram_dot(const Dendrogram& d, const std::string& title) {
    std::ostringstream os;
    os << "digraph dendrogram {\n"
       << "  label=\"" << escape(title) << "\";\n"
       << "  rankdir=TB;\n"
       << "  node [shape=plaintext];\n";
    for (std::size_t i = 0; i < d.leaf_count; ++i)
        os << "  leaf" << i + 1 << " [label=\"" << leaf_label(d, i) << "\"];\n";

    std::vector<std::string> node_id(d.leaf_count);
    std::vector<double> node_h(d.leaf_count, 0.0);
    for (std::size_t i = 0; i < d.leaf_count; ++i) node_id[i] = "leaf" + std::to_string(i + 1);

    for (std::size_t k = 0; k < d.merges.size(); ++k) {
        const auto& m = d.merges[k];
        const auto id = "merge" + std::to_string(k + 1);
        os << "  " << id << " [shape=point, xlabel=\"" << num(m.height) << "\"];\n";
        for (auto pos : {m.left_first - 1, m.right_first() - 1})
            os << "  " << id << " -> " << node_id[pos] << " [len=" << num(m.height - node_h[pos]) << ", arrowhead=none];\n";
        node_id[m.left_first - 1] = id;
        node_h[m.left_first - 1] = m.height;
    }
    os << "}\n";
    return os.str();
}

std::string factor_plane_svg(const CorrespondenceEmbedding& e, std::size_t axis_x, std::size_t axis_y,
                             const std::string& title) {
    const auto kept = e.n_factors();
    if (axis_x < 1 || axis_y < 1 || axis_x > kept || axis_y > kept)
        throw InputError("axes " + std::to_string(axis_x) + "," + std::to_string(axis_y) + " not available: " +
                         std::to_string(kept) + " factors retained");
    const auto ax = static_cast<Eigen::Index>(axis_x - 1);
    const auto ay = static_cast<Eigen::Index>(axis_y - 1);
    const bool with_cols = e.col_projections.cols() > std::max(ax, ay);

    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    auto extend = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (Eigen::Index i = 0; i < e.row_projections.rows(); ++i) extend(e.row_projections(i, ax), e.row_projections(i, ay));
    if (with_cols)
        for (Eigen::Index j = 0; j < e.col_projections.rows(); ++j)
            extend(e.col_projections(j, ax), e.col_projections(j, ay));
    const double padx = std::max(1e-9, (xmax - xmin) * 0.05), pady = std::max(1e-9, (ymax - ymin) * 0.05);
    xmin -= padx;
    xmax += padx;
    ymin -= pady;
    ymax += pady;

    const double left = 60, right = 30, top = 50, bottom = 60, size = 560;
    const double w = left + size + right, h = top + size + bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * size; };
    auto py = [&](double y) { return top + size - (y - ymin) / (ymax - ymin) * size; };

    std::ostringstream os;
    os << svg_open(w, h, title);
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(size) << "\" height=\""
       << num(size) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<g stroke=\"#999999\" stroke-dasharray=\"4 3\">\n"
       << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(0)) << "\" y2=\""
       << num(top + size) << "\"/>\n"
       << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(left + size) << "\" y2=\""
       << num(py(0)) << "\"/>\n</g>\n";

    auto axis_label = [&](std::size_t axis) {
        const double pct = static_cast<Eigen::Index>(axis - 1) < e.percent_inertia.size()
                               ? e.percent_inertia(static_cast<Eigen::Index>(axis - 1))
                               : 0.0;
        return "Factor " + std::to_string(axis) + " (" + num(pct) + "% of inertia)";
    };
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<text x=\"" << num(left + size / 2) << "\" y=\"" << num(top + size + 40)
       << "\" text-anchor=\"middle\">" << axis_label(axis_x) << "</text>\n"
       << "<text x=\"18\" y=\"" << num(top + size / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << num(top + size / 2) << ")\">" << axis_label(axis_y) << "</text>\n</g>\n";

    if (with_cols) {
        os << "<g fill=\"#777777\" stroke=\"none\">\n";
        for (Eigen::Index j = 0; j < e.col_projections.rows(); ++j)
            os << "<circle cx=\"" << num(px(e.col_projections(j, ax))) << "\" cy=\""
               << num(py(e.col_projections(j, ay))) << "\" r=\"1.5\"/>\n";
        os << "</g>\n";
    }
    os << "<g font-family=\"sans-serif\" font-size=\"13\" font-weight=\"bold\" fill=\"#b00000\" "
          "text-anchor=\"middle\">\n";
    for (Eigen::Index i = 0; i < e.row_projections.rows(); ++i) {
        const auto label = static_cast<std::size_t>(i) < e.row_labels.size() ? e.row_labels[static_cast<std::size_t>(i)]
                                                                              : static_cast<std::size_t>(i + 1);
        os << "<text x=\"" << num(px(e.row_projections(i, ax))) << "\" y=\"" << num(py(e.row_projections(i, ay)) + 4)
           << "\">" << label << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace storymap::render
