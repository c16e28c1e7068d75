#include "storymap/serialize.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "storymap/errors.hpp"

namespace storymap::io {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("field '") + key + "': " + e.what());
    }
}

Json header(std::string_view schema) {
    Json j;
    j["schema"] = schema;
    j["version"] = kSchemaVersion;
    return j;
}

Json matrix_to_json(const Eigen::MatrixXd& m, Eigen::Index cols) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (Eigen::Index c = 0; c < cols; ++c) r.push_back(m(i, c));
        rows.push_back(std::move(r));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw SchemaError(std::string(what) + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.front().size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& r = j[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols)
            throw SchemaError(std::string(what) + ": ragged row " + std::to_string(i));
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = r[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

Json vector_to_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vector_from_json(const Json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Direction direction_from_string(const std::string& s) {
    if (s == "<=") return Direction::at_most;
    if (s == ">=") return Direction::at_least;
    if (s == "both") return Direction::both;
    if (s == "none") return Direction::none;
    throw SchemaError("unknown direction '" + s + "'");
}

template <typename F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(e.what());
    }
}

}  // namespace

void expect_schema(const Json& j, std::string_view schema) {
    const auto tag = field<std::string>(j, "schema");
    if (tag != schema) throw SchemaError("expected a '" + std::string(schema) + "' document, got '" + tag + "'");
    const auto version = field<int>(j, "version");
    if (version != kSchemaVersion)
        throw SchemaError("unsupported " + std::string(schema) + " version " + std::to_string(version));
}

Json profile_to_json(const FormatProfile& p) {
    auto j = header("storymap.profile");
    j["name"] = p.name;
    j["scene_heading_patterns"] = p.scene_heading_patterns;
    j["strip_sections"] = p.strip_sections;
    j["beat_marker"] = p.beat_marker ? Json(*p.beat_marker) : Json(nullptr);
    j["include_headings"] = p.include_headings;
    return j;
}

FormatProfile profile_from_json(const Json& j) {
    expect_schema(j, "storymap.profile");
    FormatProfile p;
    p.name = field<std::string>(j, "name");
    p.scene_heading_patterns = field<std::vector<std::string>>(j, "scene_heading_patterns");
    if (j.contains("strip_sections")) p.strip_sections = field<std::vector<std::string>>(j, "strip_sections");
    if (j.contains("beat_marker") && !j["beat_marker"].is_null()) p.beat_marker = field<std::string>(j, "beat_marker");
    if (j.contains("include_headings")) p.include_headings = field<bool>(j, "include_headings");
    p.validate();
    return p;
}

FormatProfile load_profile(const std::string& name_or_path) {
    namespace fs = std::filesystem;
    if (fs::is_regular_file(name_or_path)) return profile_from_json(read_json(name_or_path));
    if (const char* dir = std::getenv(kConfigDirEnv)) {
        const auto candidate = fs::path(dir) / (name_or_path + ".json");
        if (fs::is_regular_file(candidate)) return profile_from_json(read_json(candidate));
    }
    if (name_or_path == "imsdb") return FormatProfile::imsdb();
    if (name_or_path == "twiz") return FormatProfile::twiz();
    throw InvalidProfile("no profile file or built-in profile named '" + name_or_path + "'");
}

Json units_to_json(const std::vector<SceneUnit>& units, const SourceInfo& source, const FormatProfile& profile) {
    auto j = header("storymap.units");
    j["source"] = {{"name", source.name}, {"sha256", source.sha256}};
    j["profile"] = profile_to_json(profile);
    Json arr = Json::array();
    for (const auto& u : units) {
        Json ju;
        ju["index"] = u.index;
        ju["heading"] = u.heading;
        ju["metadata"] = {{"setting", u.metadata.setting},
                          {"location", u.metadata.location},
                          {"time_of_day", u.metadata.time_of_day}};
        ju["span"] = {{"start", u.start}, {"body_start", u.body_start}, {"end", u.end}};
        ju["body"] = u.body;
        ju["length"] = u.length();
        ju["tokens"] = u.tokens;
        arr.push_back(std::move(ju));
    }
    j["units"] = std::move(arr);
    return j;
}

UnitsDocument units_from_json(const Json& j) {
    return guarded([&] {
        expect_schema(j, "storymap.units");
        UnitsDocument doc;
        const auto& src = j.at("source");
        doc.source = {field<std::string>(src, "name"), field<std::string>(src, "sha256")};
        doc.profile = profile_from_json(j.at("profile"));
        std::size_t expected = 1;
        for (const auto& ju : field<Json>(j, "units")) {
            SceneUnit u;
            u.index = field<std::size_t>(ju, "index");
            if (u.index != expected++) throw SchemaError("unit indices must run 1..n in order");
            u.heading = field<std::string>(ju, "heading");
            const auto& m = ju.at("metadata");
            u.metadata = {field<std::string>(m, "setting"), field<std::string>(m, "location"),
                          field<std::string>(m, "time_of_day")};
            const auto& s = ju.at("span");
            u.start = field<std::size_t>(s, "start");
            u.body_start = field<std::size_t>(s, "body_start");
            u.end = field<std::size_t>(s, "end");
            u.body = field<std::string>(ju, "body");
            u.tokens = field<std::vector<std::string>>(ju, "tokens");
            if (field<std::size_t>(ju, "length") != u.tokens.size())
                throw SchemaError("unit " + std::to_string(u.index) + ": length does not match token count");
            doc.units.push_back(std::move(u));
        }
        return doc;
    });
}

Json table_to_json(const ContingencyTable& t) {
    auto j = header("storymap.table");
    j["mode"] = to_string(t.mode());
    j["row_labels"] = t.row_labels();
    j["col_labels"] = t.col_labels();
    j["total"] = t.total();
    Json entries = Json::array();
    for (std::size_t i = 0; i < t.n_rows(); ++i)
        for (const auto& e : t.row(i)) entries.push_back(Json::array({i, e.col, e.count}));
    j["entries"] = std::move(entries);
    return j;
}

ContingencyTable table_from_json(const Json& j) {
    return guarded([&] {
        expect_schema(j, "storymap.table");
        auto rows_labels = field<std::vector<std::size_t>>(j, "row_labels");
        auto cols = field<std::vector<std::string>>(j, "col_labels");
        std::vector<std::vector<ContingencyTable::Entry>> rows(rows_labels.size());
        for (const auto& e : field<Json>(j, "entries")) {
            const auto i = e.at(0).get<std::size_t>();
            if (i >= rows.size()) throw SchemaError("entry row out of range");
            rows[i].push_back({e.at(1).get<std::size_t>(), e.at(2).get<std::uint64_t>()});
        }
        try {
            ContingencyTable t(std::move(rows_labels), std::move(cols), std::move(rows),
                               count_mode_from_string(field<std::string>(j, "mode")));
            if (t.total() != field<std::uint64_t>(j, "total")) throw SchemaError("total does not match entries");
            return t;
        } catch (const DimensionMismatch& e) {
            throw SchemaError(e.what());
        }
    });
}

std::string table_to_delimited(const ContingencyTable& t, char sep) {
    std::ostringstream os;
    os << "unit";
    for (const auto& w : t.col_labels()) os << sep << w;
    os << '\n';
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
        os << t.row_labels()[i];
        std::size_t next = 0;
        for (const auto& e : t.row(i)) {
            for (; next < e.col; ++next) os << sep << '0';
            os << sep << e.count;
            next = e.col + 1;
        }
        for (; next < t.n_cols(); ++next) os << sep << '0';
        os << '\n';
    }
    return os.str();
}

Json zipf_to_json(const ZipfSummary& z) {
    Json j;
    Json ranked = Json::array();
    for (const auto& [w, c] : z.ranked) ranked.push_back({{"word", w}, {"count", c}});
    j["ranked"] = std::move(ranked);
    j["frequency_histogram"] = z.frequency_histogram;
    return j;
}

ZipfSummary zipf_from_json(const Json& j) {
    return guarded([&] {
        ZipfSummary z;
        for (const auto& r : field<Json>(j, "ranked"))
            z.ranked.emplace_back(field<std::string>(r, "word"), field<std::uint64_t>(r, "count"));
        z.frequency_histogram = field<std::vector<std::size_t>>(j, "frequency_histogram");
        return z;
    });
}

Json embedding_to_json(const CorrespondenceEmbedding& e, std::size_t column_factors) {
    auto j = header("storymap.embedding");
    const auto kept = static_cast<Eigen::Index>(e.n_factors());
    const auto col_k = std::min<Eigen::Index>(kept, static_cast<Eigen::Index>(std::min<std::size_t>(
                                                        column_factors, static_cast<std::size_t>(kept))));
    j["factors"] = kept;
    j["inertia_total"] = e.inertia_total;
    j["eigenvalues"] = vector_to_json(e.eigenvalues);
    j["percent_inertia"] = vector_to_json(e.percent_inertia);
    j["row_labels"] = e.row_labels;
    j["row_masses"] = vector_to_json(e.row_masses);
    j["row_projections"] = matrix_to_json(e.row_projections, kept);
    j["row_correlations"] = matrix_to_json(e.row_correlations, kept);
    j["squared_cosines"] = matrix_to_json(e.squared_cosines, kept);
    j["zero_norm_rows"] = e.zero_norm_rows;
    j["col_labels"] = e.col_labels;
    j["col_masses"] = vector_to_json(e.col_masses);
    j["col_factors"] = col_k;
    j["col_projections"] = matrix_to_json(e.col_projections, col_k);
    return j;
}

CorrespondenceEmbedding embedding_from_json(const Json& j) {
    return guarded([&] {
        expect_schema(j, "storymap.embedding");
        CorrespondenceEmbedding e;
        const auto kept = field<Eigen::Index>(j, "factors");
        e.inertia_total = field<double>(j, "inertia_total");
        e.eigenvalues = vector_from_json(j.at("eigenvalues"));
        e.percent_inertia = vector_from_json(j.at("percent_inertia"));
        e.row_labels = field<std::vector<std::size_t>>(j, "row_labels");
        e.row_masses = vector_from_json(j.at("row_masses"));
        e.row_projections = matrix_from_json(j.at("row_projections"), "row_projections");
        e.row_correlations = matrix_from_json(j.at("row_correlations"), "row_correlations");
        e.squared_cosines = matrix_from_json(j.at("squared_cosines"), "squared_cosines");
        e.zero_norm_rows = field<std::vector<std::size_t>>(j, "zero_norm_rows");
        e.col_labels = field<std::vector<std::string>>(j, "col_labels");
        e.col_masses = vector_from_json(j.at("col_masses"));
        e.col_projections = matrix_from_json(j.at("col_projections"), "col_projections");
        const auto n = static_cast<Eigen::Index>(e.row_labels.size());
        if (e.eigenvalues.size() != kept || e.row_projections.rows() != n ||
            (n > 0 && e.row_projections.cols() != kept) || e.row_correlations.rows() != n)
            throw SchemaError("embedding dimensions are inconsistent");
        // Empty matrices parse with zero columns; restore the factor count.
        if (n > 0 && kept == 0) {
            e.row_projections.resize(n, 0);
            e.row_correlations.resize(n, 0);
            e.squared_cosines.resize(n, 0);
        }
        if (e.col_projections.rows() == 0 && !e.col_labels.empty())
            e.col_projections.resize(static_cast<Eigen::Index>(e.col_labels.size()), 0);
        return e;
    });
}

Json dendrogram_to_json(const Dendrogram& d) {
    auto j = header("storymap.dendrogram");
    j["leaf_count"] = d.leaf_count;
    j["leaf_labels"] = d.leaf_labels;
    Json merges = Json::array();
    for (const auto& m : d.merges)
        merges.push_back({{"left", {m.left_first, m.left_last}},
                          {"right", {m.right_first(), m.right_last}},
                          {"height", m.height}});
    j["merges"] = std::move(merges);
    return j;
}

Dendrogram dendrogram_from_json(const Json& j) {
    return guarded([&] {
        expect_schema(j, "storymap.dendrogram");
        Dendrogram d;
        d.leaf_count = field<std::size_t>(j, "leaf_count");
        d.leaf_labels = field<std::vector<std::size_t>>(j, "leaf_labels");
        for (const auto& jm : field<Json>(j, "merges")) {
            const auto left = field<std::vector<std::size_t>>(jm, "left");
            const auto right = field<std::vector<std::size_t>>(jm, "right");
            if (left.size() != 2 || right.size() != 2 || right[0] != left[1] + 1)
                throw SchemaError("merge ranges must be adjacent intervals");
            d.merges.push_back({left[0], left[1], right[1], field<double>(jm, "height")});
        }
        if (d.leaf_count > 0 && d.merges.size() != d.leaf_count - 1)
            throw SchemaError("dendrogram must have leaf_count - 1 merges");
        return d;
    });
}

Json style_to_json(const StyleProfile& s) {
    auto j = header("storymap.style");
    Json attrs = Json::array();
    for (std::size_t a = 1; a <= kAttributeCount; ++a)
        attrs.push_back({{"attribute", a}, {"name", StyleProfile::attribute_name(a)}, {"value", s.attribute(a)}});
    j["attributes"] = std::move(attrs);
    j["insufficient_for_variance"] = s.insufficient_for_variance;
    j["lengths"] = s.lengths;
    return j;
}

StyleProfile style_from_json(const Json& j) {
    return guarded([&] {
        expect_schema(j, "storymap.style");
        StyleProfile s;
        const auto attrs = field<Json>(j, "attributes");
        if (attrs.size() != kAttributeCount) throw SchemaError("style profile needs 9 attributes");
        for (std::size_t a = 0; a < kAttributeCount; ++a) s.values[a] = field<double>(attrs[a], "value");
        s.insufficient_for_variance = field<bool>(j, "insufficient_for_variance");
        s.lengths = field<std::vector<double>>(j, "lengths");
        return s;
    });
}

Json report_to_json(const RandomizationReport& r) {
    auto j = header("storymap.randomization");
    j["n_units"] = r.n_units;
    j["n_trials"] = r.n_trials;
    j["seed"] = r.seed;
    j["threshold_percent"] = r.threshold_percent;
    Json attrs = Json::array();
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        const auto& c = r.attributes[a];
        attrs.push_back({{"attribute", a + 1},
                         {"name", StyleProfile::attribute_name(a + 1)},
                         {"real", c.real},
                         {"trials_le", c.trials_at_least_real},
                         {"trials_ge", c.trials_at_most_real},
                         {"fraction_le", c.fraction_le},
                         {"fraction_ge", c.fraction_ge},
                         {"direction", to_string(c.direction)}});
    }
    j["attributes"] = std::move(attrs);
    if (r.repeated) {
        j["repeated"] = {{"runs", r.repeated->runs},
                         {"le_share", r.repeated->le_share},
                         {"ge_share", r.repeated->ge_share}};
    } else {
        j["repeated"] = nullptr;
    }
    return j;
}

RandomizationReport report_from_json(const Json& j) {
    return guarded([&] {
        expect_schema(j, "storymap.randomization");
        RandomizationReport r;
        r.n_units = field<std::size_t>(j, "n_units");
        r.n_trials = field<std::size_t>(j, "n_trials");
        r.seed = field<std::uint64_t>(j, "seed");
        r.threshold_percent = field<double>(j, "threshold_percent");
        const auto attrs = field<Json>(j, "attributes");
        if (attrs.size() != kAttributeCount) throw SchemaError("report needs 9 attributes");
        for (std::size_t a = 0; a < kAttributeCount; ++a) {
            auto& c = r.attributes[a];
            c.real = field<double>(attrs[a], "real");
            c.trials_at_least_real = field<std::size_t>(attrs[a], "trials_le");
            c.trials_at_most_real = field<std::size_t>(attrs[a], "trials_ge");
            c.fraction_le = field<double>(attrs[a], "fraction_le");
            c.fraction_ge = field<double>(attrs[a], "fraction_ge");
            c.direction = direction_from_string(field<std::string>(attrs[a], "direction"));
        }
        if (j.contains("repeated") && !j["repeated"].is_null()) {
            RepeatedRuns rep;
            rep.runs = field<std::size_t>(j["repeated"], "runs");
            rep.le_share = field<std::array<double, kAttributeCount>>(j["repeated"], "le_share");
            rep.ge_share = field<std::array<double, kAttributeCount>>(j["repeated"], "ge_share");
            r.repeated = rep;
        }
        return r;
    });
}

Json significance_to_json(const std::vector<SignificanceRow>& rows, double threshold_percent) {
    auto j = header("storymap.significance");
    j["threshold_percent"] = threshold_percent;
    Json arr = Json::array();
    for (const auto& r : rows)
        arr.push_back({{"script", r.script},
                       {"attribute", r.attribute},
                       {"direction", to_string(r.direction)},
                       {"percent", r.percent}});
    j["rows"] = std::move(arr);
    return j;
}

Json segments_to_json(const std::vector<SegmentRange>& segments) {
    Json arr = Json::array();
    for (const auto& [a, b] : segments) arr.push_back(Json::array({a, b}));
    return arr;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw InputError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw InputError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

Json read_json(const std::filesystem::path& path) {
    const auto text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

std::string dump(const Json& j) {
    return j.dump(2) + "\n";
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw InputError("SHA-256 computation failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return os.str();
}

}  // namespace storymap::io
