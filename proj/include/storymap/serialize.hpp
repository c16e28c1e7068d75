#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "storymap/ca_engine.hpp"
#include "storymap/contingency.hpp"
#include "storymap/monte_carlo.hpp"
#include "storymap/script_ingest.hpp"
#include "storymap/seq_cluster.hpp"
#include "storymap/style_metrics.hpp"

// JSON documents exchanged by the command-line tools. Every top-level
// document carries "schema" and "version"; docs/schemas.md describes them.
namespace storymap::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Environment variable naming the directory searched for profile files.
inline constexpr const char* kConfigDirEnv = "STORYMAP_CONFIG_DIR";

Json profile_to_json(const FormatProfile& p);
FormatProfile profile_from_json(const Json& j);
// Resolves a profile by file path, by <name>.json in $STORYMAP_CONFIG_DIR, or
// by built-in name ("imsdb", "twiz").
FormatProfile load_profile(const std::string& name_or_path);

struct SourceInfo {
    std::string name;
    std::string sha256;
};

Json units_to_json(const std::vector<SceneUnit>& units, const SourceInfo& source, const FormatProfile& profile);
struct UnitsDocument {
    SourceInfo source;
    FormatProfile profile;
    std::vector<SceneUnit> units;
};
UnitsDocument units_from_json(const Json& j);

Json table_to_json(const ContingencyTable& t);
ContingencyTable table_from_json(const Json& j);
// Dense export: header row of words, one line per unit with its label first.
std::string table_to_delimited(const ContingencyTable& t, char sep = '\t');

Json zipf_to_json(const ZipfSummary& z);
ZipfSummary zipf_from_json(const Json& j);

// Column projections are truncated to `column_factors` factors.
Json embedding_to_json(const CorrespondenceEmbedding& e,
                       std::size_t column_factors = std::numeric_limits<std::size_t>::max());
CorrespondenceEmbedding embedding_from_json(const Json& j);

Json dendrogram_to_json(const Dendrogram& d);
Dendrogram dendrogram_from_json(const Json& j);

Json style_to_json(const StyleProfile& s);
StyleProfile style_from_json(const Json& j);

Json report_to_json(const RandomizationReport& r);
RandomizationReport report_from_json(const Json& j);

Json significance_to_json(const std::vector<SignificanceRow>& rows, double threshold_percent);

Json segments_to_json(const std::vector<SegmentRange>& segments);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
Json read_json(const std::filesystem::path& path);
std::string dump(const Json& j);

// Checks the "schema" tag of a document; throws SchemaError on mismatch.
void expect_schema(const Json& j, std::string_view schema);

std::string sha256_hex(std::string_view data);

}  // namespace storymap::io
