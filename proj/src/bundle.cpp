#include "storymap/bundle.hpp"

#include "storymap/errors.hpp"

namespace storymap {

std::string to_string(ClusterInput c) {
    return c == ClusterInput::orientation ? "orientation" : "projection";
}

ClusterInput cluster_input_from_string(const std::string& name) {
    if (name == "orientation") return ClusterInput::orientation;
    if (name == "projection") return ClusterInput::projection;
    throw InputError("unknown cluster input '" + name + "' (expected orientation or projection)");
}

UnitSeries AnalysisBundle::series() const {
    return UnitSeries::from_embedding(embedding, style.lengths);
}

std::vector<SceneUnit> prepare_units(std::vector<SceneUnit> scenes, const AnalysisConfig& config) {
    if (config.beat_scene) {
        const auto s = *config.beat_scene;
        if (s < 1 || s > scenes.size())
            throw InputError("scene " + std::to_string(s) + " not found (" + std::to_string(scenes.size()) + " scenes)");
        const auto& scene = scenes[s - 1];
        auto offsets = config.beat_offsets;
        if (offsets.empty() && config.profile.beat_marker)
            offsets = beat_offsets_from_marker(scene.body, *config.profile.beat_marker);
        auto beats = load_beats(scene, offsets);
        tokenize_all(beats, config.profile.include_headings);
        return beats;
    }
    tokenize_all(scenes, config.profile.include_headings);
    return scenes;
}

std::vector<SceneUnit> prepare_units(std::string_view raw_text, const AnalysisConfig& config) {
    return prepare_units(split_scenes(raw_text, config.profile), config);
}

Dendrogram cluster_series(const CorrespondenceEmbedding& embedding, ClusterInput input) {
    return input == ClusterInput::orientation ? cluster_by_orientation(embedding) : cluster_by_projection(embedding);
}

AnalysisBundle analyze_units(const std::vector<SceneUnit>& units, const std::string& script,
                             const std::string& content_sha256, const AnalysisConfig& config, unsigned workers) {
    AnalysisBundle b;
    b.script = script;
    b.content_sha256 = content_sha256;
    b.config = config;

    const auto raw = build_table(units, config.mode);
    auto pruned = prune(raw);
    b.table = {pruned.table.n_rows(), raw.n_cols(), pruned.table.nonzeros(), pruned.table.total(), pruned.log};
    for (auto r : pruned.log.dropped_rows)
        b.warnings.push_back("unit " + std::to_string(r) + " has no words and was left out of the table");

    b.zipf = zipf_summary(config.mode == CountMode::frequency ? raw : build_table(units, CountMode::frequency),
                          config.zipf_top);

    b.embedding = embed(make_profiles(pruned.table));
    for (auto i : b.embedding.zero_norm_rows)
        b.warnings.push_back("unit " + std::to_string(b.embedding.row_labels[i]) +
                             " projects onto the origin; it is skipped by the orientation attributes");

    b.dendrogram = cluster_series(b.embedding, config.cluster_input);
    if (config.segments > 0) b.segments = cut(b.dendrogram, config.segments);

    std::vector<double> lengths;
    lengths.reserve(pruned.table.n_rows());
    for (auto label : pruned.table.row_labels()) lengths.push_back(static_cast<double>(units[label - 1].length()));

    const auto series = UnitSeries::from_embedding(b.embedding, lengths);
    b.style = style_profile(series);
    if (config.trials > 0) {
        b.randomization = config.repeats > 1 ? randomize_repeated(series, config.trials, config.seed, config.repeats,
                                                                  config.threshold_percent, workers)
                                             : randomize_test(series, config.trials, config.seed,
                                                              config.threshold_percent, workers);
    }
    return b;
}

AnalysisBundle analyze_text(std::string_view raw_text, const std::string& script, const AnalysisConfig& config,
                            unsigned workers) {
    return analyze_units(prepare_units(raw_text, config), script, io::sha256_hex(raw_text), config, workers);
}

io::Json config_to_json(const AnalysisConfig& c) {
    io::Json j;
    j["profile"] = io::profile_to_json(c.profile);
    j["mode"] = to_string(c.mode);
    j["cluster_input"] = to_string(c.cluster_input);
    j["beat_scene"] = c.beat_scene ? io::Json(*c.beat_scene) : io::Json(nullptr);
    j["beat_offsets"] = c.beat_offsets;
    j["segments"] = c.segments;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["threshold_percent"] = c.threshold_percent;
    j["repeats"] = c.repeats;
    j["zipf_top"] = c.zipf_top;
    j["column_factors"] = c.column_factors;
    return j;
}

AnalysisConfig config_from_json(const io::Json& j) {
    try {
        AnalysisConfig c;
        c.profile = io::profile_from_json(j.at("profile"));
        c.mode = count_mode_from_string(j.at("mode").get<std::string>());
        c.cluster_input = cluster_input_from_string(j.at("cluster_input").get<std::string>());
        if (!j.at("beat_scene").is_null()) c.beat_scene = j.at("beat_scene").get<std::size_t>();
        c.beat_offsets = j.at("beat_offsets").get<std::vector<std::size_t>>();
        c.segments = j.at("segments").get<std::size_t>();
        c.trials = j.at("trials").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.threshold_percent = j.at("threshold_percent").get<double>();
        c.repeats = j.at("repeats").get<std::size_t>();
        c.zipf_top = j.at("zipf_top").get<std::size_t>();
        c.column_factors = j.at("column_factors").get<std::size_t>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }
}

io::Json bundle_to_json(const AnalysisBundle& b) {
    io::Json j;
    j["schema"] = "storymap.bundle";
    j["version"] = io::kSchemaVersion;
    j["script"] = {{"name", b.script}, {"sha256", b.content_sha256}};
    j["config"] = config_to_json(b.config);
    io::Json pruned = {{"rows", b.table.pruned.dropped_rows}, {"columns", b.table.pruned.dropped_columns}};
    j["table"] = {{"units", b.table.units},
                  {"vocabulary", b.table.vocabulary},
                  {"nonzeros", b.table.nonzeros},
                  {"total", b.table.total},
                  {"pruned", pruned}};
    j["zipf"] = io::zipf_to_json(b.zipf);
    j["embedding"] = io::embedding_to_json(b.embedding, b.config.column_factors);
    j["dendrogram"] = io::dendrogram_to_json(b.dendrogram);
    j["segments"] = b.segments ? io::segments_to_json(*b.segments) : io::Json(nullptr);
    j["style"] = io::style_to_json(b.style);
    j["randomization"] = b.randomization ? io::report_to_json(*b.randomization) : io::Json(nullptr);
    j["warnings"] = b.warnings;
    return j;
}

AnalysisBundle bundle_from_json(const io::Json& j) {
    io::expect_schema(j, "storymap.bundle");
    try {
        AnalysisBundle b;
        b.script = j.at("script").at("name").get<std::string>();
        b.content_sha256 = j.at("script").at("sha256").get<std::string>();
        b.config = config_from_json(j.at("config"));
        const auto& t = j.at("table");
        b.table.units = t.at("units").get<std::size_t>();
        b.table.vocabulary = t.at("vocabulary").get<std::size_t>();
        b.table.nonzeros = t.at("nonzeros").get<std::size_t>();
        b.table.total = t.at("total").get<std::uint64_t>();
        b.table.pruned.dropped_rows = t.at("pruned").at("rows").get<std::vector<std::size_t>>();
        b.table.pruned.dropped_columns = t.at("pruned").at("columns").get<std::vector<std::string>>();
        b.zipf = io::zipf_from_json(j.at("zipf"));
        b.embedding = io::embedding_from_json(j.at("embedding"));
        b.dendrogram = io::dendrogram_from_json(j.at("dendrogram"));
        if (!j.at("segments").is_null()) {
            std::vector<SegmentRange> segs;
            for (const auto& s : j.at("segments")) segs.emplace_back(s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>());
            b.segments = std::move(segs);
        }
        b.style = io::style_from_json(j.at("style"));
        if (!j.at("randomization").is_null()) b.randomization = io::report_from_json(j.at("randomization"));
        b.warnings = j.at("warnings").get<std::vector<std::string>>();
        if (b.style.lengths.size() != b.embedding.n_rows())
            throw SchemaError("style lengths do not match the embedded units");
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bundle: ") + e.what());
    }
}

}  // namespace storymap
