#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storymap/ca_engine.hpp"
#include "storymap/contingency.hpp"
#include "storymap/monte_carlo.hpp"
#include "storymap/script_ingest.hpp"
#include "storymap/seq_cluster.hpp"
#include "storymap/serialize.hpp"
#include "storymap/style_metrics.hpp"

namespace storymap {

enum class ClusterInput { orientation, projection };

std::string to_string(ClusterInput c);
ClusterInput cluster_input_from_string(const std::string& name);

// Everything needed to re-run an analysis bit-identically.
struct AnalysisConfig {
    FormatProfile profile = FormatProfile::imsdb();
    CountMode mode = CountMode::presence;
    ClusterInput cluster_input = ClusterInput::orientation;
    // Analyse the beats of this 1-based scene instead of the scene sequence.
    std::optional<std::size_t> beat_scene;
    std::vector<std::size_t> beat_offsets;
    std::size_t segments = 0;  // 0: no cut
    std::size_t trials = 0;    // 0: no randomization in the analysis step
    std::uint64_t seed = 1;
    double threshold_percent = kDefaultThresholdPercent;
    std::size_t repeats = 1;
    std::size_t zipf_top = 20;
    std::size_t column_factors = 5;  // column projections kept in the bundle

    bool operator==(const AnalysisConfig&) const = default;
};

struct TableSummary {
    std::size_t units = 0;
    std::size_t vocabulary = 0;  // distinct words before pruning
    std::size_t nonzeros = 0;
    std::uint64_t total = 0;
    PruneLog pruned;
};

struct AnalysisBundle {
    std::string script;
    std::string content_sha256;
    AnalysisConfig config;
    TableSummary table;
    ZipfSummary zipf;
    CorrespondenceEmbedding embedding;
    Dendrogram dendrogram;
    std::optional<std::vector<SegmentRange>> segments;
    StyleProfile style;
    std::optional<RandomizationReport> randomization;
    std::vector<std::string> warnings;

    UnitSeries series() const;
};

// Units (scenes, or the beats of config.beat_scene) tokenized per the profile.
std::vector<SceneUnit> prepare_units(std::string_view raw_text, const AnalysisConfig& config);
std::vector<SceneUnit> prepare_units(std::vector<SceneUnit> scenes, const AnalysisConfig& config);

// Table, embedding, hierarchy, style profile and (when config.trials > 0) the
// randomization report for one script.
AnalysisBundle analyze_units(const std::vector<SceneUnit>& units, const std::string& script,
                             const std::string& content_sha256, const AnalysisConfig& config, unsigned workers = 1);
AnalysisBundle analyze_text(std::string_view raw_text, const std::string& script, const AnalysisConfig& config,
                            unsigned workers = 1);

Dendrogram cluster_series(const CorrespondenceEmbedding& embedding, ClusterInput input);

io::Json config_to_json(const AnalysisConfig& c);
AnalysisConfig config_from_json(const io::Json& j);
io::Json bundle_to_json(const AnalysisBundle& b);
AnalysisBundle bundle_from_json(const io::Json& j);

}  // namespace storymap
