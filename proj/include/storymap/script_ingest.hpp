#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace storymap {

// Describes how scene headings and droppable sections look in one script
// source. Patterns are ECMAScript regular expressions matched at the start of
// each line (leading whitespace is only skipped if the pattern allows it).
struct FormatProfile {
    std::string name;
    std::vector<std::string> scene_heading_patterns;
    // A line matching one of these opens a section (credits, end titles, ...)
    // that is dropped up to the next scene heading.
    std::vector<std::string> strip_sections;
    std::optional<std::string> beat_marker;
    // Count the heading line's words as part of the unit's tokens.
    bool include_headings = true;

    // Throws InvalidProfile when no heading pattern is given or a pattern
    // does not compile.
    void validate() const;

    // Master-scene layout: "INT. CAFE - NIGHT", "EXT. AIRPORT - NIGHT".
    static FormatProfile imsdb();
    // Bracketed layout: "[INT. CSI - EVIDENCE ROOM -- NIGHT]".
    static FormatProfile twiz();

    bool operator==(const FormatProfile&) const = default;
};

struct SceneMetadata {
    std::string setting;      // "INT", "EXT", "INT/EXT" or empty
    std::string location;
    std::string time_of_day;  // empty when the heading carries none
};

struct SceneUnit {
    std::size_t index = 0;  // 1-based
    std::string heading;    // heading line without its line terminator
    SceneMetadata metadata;
    std::string body;
    std::vector<std::string> tokens;

    // Byte offsets into the source text: the unit spans [start, end) and its
    // body is [body_start, end). The heading line occupies [start, body_start).
    std::size_t start = 0;
    std::size_t body_start = 0;
    std::size_t end = 0;

    std::size_t length() const { return tokens.size(); }
};

SceneMetadata parse_heading(std::string_view heading);

// Segments a script into units, one per scene heading, in document order.
// Text before the first heading and stripped sections are dropped.
// Throws NoScenesFound if no line matches a heading pattern.
std::vector<SceneUnit> split_scenes(std::string_view raw_text, const FormatProfile& profile);

// Word rule: lowercase alphabetic runs with internal apostrophes kept; terms
// starting with a digit are dropped whole; words shorter than two characters
// are dropped.
std::vector<std::string> tokenize_text(std::string_view text);

SceneUnit tokenize(SceneUnit unit, bool include_heading = true);
void tokenize_all(std::vector<SceneUnit>& units, bool include_heading = true);

// Splits a scene at byte offsets into its body. Offsets must be strictly
// increasing and lie strictly inside the body. Beat 1 keeps the scene heading;
// later beats have an empty heading. Tokens are left empty.
std::vector<SceneUnit> load_beats(const SceneUnit& scene, std::span<const std::size_t> body_offsets);

// Offsets of every line in the body that begins with the marker (the first
// line is never a boundary).
std::vector<std::size_t> beat_offsets_from_marker(std::string_view body, std::string_view marker);

// Sidecar format: one non-negative integer per line; blank lines and lines
// starting with '#' are ignored.
std::vector<std::size_t> parse_beat_offsets(std::string_view sidecar);

}  // namespace storymap
