#include "storymap/script_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <regex>

#include "storymap/errors.hpp"
#include "storymap/utf8.hpp"

namespace storymap {

namespace {

std::vector<std::regex> compile(const std::vector<std::string>& patterns) {
    std::vector<std::regex> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) {
        try {
            out.emplace_back(p, std::regex::ECMAScript | std::regex::optimize);
        } catch (const std::regex_error& e) {
            throw InvalidProfile("pattern '" + p + "' does not compile: " + e.what());
        }
    }
    return out;
}

bool matches_any(const std::vector<std::regex>& res, std::string_view line) {
    return std::any_of(res.begin(), res.end(), [&](const std::regex& re) {
        return std::regex_search(line.begin(), line.end(), re, std::regex_constants::match_continuous);
    });
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Line content without its terminator ("\n" or "\r\n").
std::string_view line_content(std::string_view text, std::size_t begin, std::size_t newline) {
    auto stop = newline;
    if (stop > begin && text[stop - 1] == '\r') --stop;
    return text.substr(begin, stop - begin);
}

}  // namespace

void FormatProfile::validate() const {
    if (scene_heading_patterns.empty()) throw InvalidProfile("profile '" + name + "' has no heading pattern");
    compile(scene_heading_patterns);
    compile(strip_sections);
    if (beat_marker && beat_marker->empty()) throw InvalidProfile("beat marker must not be empty");
}

FormatProfile FormatProfile::imsdb() {
    FormatProfile p;
    p.name = "imsdb";
    p.scene_heading_patterns = {R"(\s*(\d+[A-Z]?\s+)?(INT\.?/EXT|EXT\.?/INT|INT|EXT|I/E)[.\s/])"};
    p.strip_sections = {R"(\s*THE END\s*$)", R"(\s*(END )?CREDITS\b)"};
    return p;
}

FormatProfile FormatProfile::twiz() {
    FormatProfile p;
    p.name = "twiz";
    p.scene_heading_patterns = {R"(\s*\[\s*(INT\.?/EXT|EXT\.?/INT|INT|EXT)[.\s/])"};
    p.strip_sections = {R"(\s*\[?\s*THE END\b)", R"(\s*\[?\s*(END )?CREDITS\b)"};
    return p;
}

SceneMetadata parse_heading(std::string_view heading) {
    SceneMetadata meta;
    auto h = trim(heading);
    if (!h.empty() && h.front() == '[') h.remove_prefix(1);
    if (!h.empty() && h.back() == ']') h.remove_suffix(1);
    h = trim(h);
    // optional scene number
    std::size_t k = 0;
    while (k < h.size() && utf8::is_digit(static_cast<unsigned char>(h[k]))) ++k;
    if (k > 0) {
        while (k < h.size() && h[k] >= 'A' && h[k] <= 'Z') ++k;
        h = trim(h.substr(k));
    }
    static const std::regex setting_re(R"((INT\.?/EXT|EXT\.?/INT|INT|EXT|I/E)\.?\s*)");
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(h.begin(), h.end(), m, setting_re, std::regex_constants::match_continuous)) {
        std::string s = m[1].str();
        s.erase(std::remove(s.begin(), s.end(), '.'), s.end());
        if (s == "I/E" || s == "EXT/INT") s = "INT/EXT";
        meta.setting = s;
        h.remove_prefix(static_cast<std::size_t>(m.length(0)));
    }
    // "LOCATION - SUBPLACE -- TIME": the last dash-separated part is the time.
    std::vector<std::string_view> parts;
    std::size_t from = 0;
    for (std::size_t i = 0; i < h.size();) {
        if (h[i] == '-' && i > 0 && h[i - 1] == ' ') {
            std::size_t j = i;
            while (j < h.size() && h[j] == '-') ++j;
            if (j < h.size() && h[j] == ' ') {
                parts.push_back(trim(h.substr(from, i - from)));
                from = j;
                i = j;
                continue;
            }
        }
        ++i;
    }
    parts.push_back(trim(h.substr(from)));
    if (parts.size() == 1) {
        meta.location = std::string(parts[0]);
    } else {
        meta.time_of_day = std::string(parts.back());
        std::string loc;
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            if (!loc.empty()) loc += " - ";
            loc += parts[i];
        }
        meta.location = loc;
    }
    return meta;
}

std::vector<SceneUnit> split_scenes(std::string_view raw_text, const FormatProfile& profile) {
    if (raw_text.empty()) throw NoScenesFound("input text is empty");
    const auto headings = compile(profile.scene_heading_patterns);
    if (headings.empty()) throw InvalidProfile("profile '" + profile.name + "' has no heading pattern");
    const auto strips = compile(profile.strip_sections);

    std::vector<SceneUnit> units;
    bool open = false;
    auto close = [&](std::size_t at) {
        if (!open) return;
        auto& u = units.back();
        u.end = at;
        u.body = std::string(raw_text.substr(u.body_start, u.end - u.body_start));
        open = false;
    };

    std::size_t pos = 0;
    while (pos < raw_text.size()) {
        auto nl = raw_text.find('\n', pos);
        const bool last = nl == std::string_view::npos;
        if (last) nl = raw_text.size();
        const auto line = line_content(raw_text, pos, nl);
        if (matches_any(headings, line)) {
            close(pos);
            SceneUnit u;
            u.index = units.size() + 1;
            u.heading = std::string(line);
            u.metadata = parse_heading(line);
            u.start = pos;
            u.body_start = last ? nl : nl + 1;
            units.push_back(std::move(u));
            open = true;
        } else if (open && matches_any(strips, line)) {
            close(pos);
        }
        pos = last ? nl : nl + 1;
    }
    close(raw_text.size());

    if (units.empty()) throw NoScenesFound("no line matches the heading patterns of profile '" + profile.name + "'");
    return units;
}

std::vector<std::string> tokenize_text(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    std::string word;
    std::size_t letters = 0;
    bool numeric_term = false;
    bool pending_apostrophe = false;

    auto flush = [&] {
        if (!numeric_term && letters >= 2) tokens.push_back(word);
        word.clear();
        letters = 0;
        pending_apostrophe = false;
    };

    while (pos < text.size()) {
        const auto cp = utf8::next(text, pos);
        if (utf8::is_letter(cp)) {
            if (pending_apostrophe) {
                word.push_back('\'');
                ++letters;
                pending_apostrophe = false;
            }
            utf8::append(word, utf8::to_lower(cp));
            ++letters;
        } else if (utf8::is_digit(cp)) {
            // A digit opening a term poisons the whole alphanumeric run; a
            // digit after letters just ends the word.
            if (word.empty() && !pending_apostrophe) {
                numeric_term = true;
            } else {
                flush();
                numeric_term = true;
            }
        } else if (utf8::is_apostrophe(cp) && !word.empty() && !pending_apostrophe) {
            pending_apostrophe = true;
        } else {
            flush();
            numeric_term = false;
        }
    }
    flush();
    return tokens;
}

SceneUnit tokenize(SceneUnit unit, bool include_heading) {
    unit.tokens.clear();
    if (include_heading) unit.tokens = tokenize_text(unit.heading);
    auto body = tokenize_text(unit.body);
    unit.tokens.insert(unit.tokens.end(), std::make_move_iterator(body.begin()), std::make_move_iterator(body.end()));
    return unit;
}

void tokenize_all(std::vector<SceneUnit>& units, bool include_heading) {
    for (auto& u : units) u = tokenize(std::move(u), include_heading);
}

std::vector<SceneUnit> load_beats(const SceneUnit& scene, std::span<const std::size_t> body_offsets) {
    std::size_t prev = 0;
    for (const auto off : body_offsets) {
        if (off <= prev || off >= scene.body.size())
            throw InvalidBoundaries("offset " + std::to_string(off) + " is not strictly increasing inside a body of " +
                                    std::to_string(scene.body.size()) + " bytes");
        prev = off;
    }

    std::vector<SceneUnit> beats;
    beats.reserve(body_offsets.size() + 1);
    std::size_t begin = 0;
    for (std::size_t b = 0; b <= body_offsets.size(); ++b) {
        const std::size_t stop = b < body_offsets.size() ? body_offsets[b] : scene.body.size();
        SceneUnit beat;
        beat.index = b + 1;
        beat.metadata = scene.metadata;
        beat.body = scene.body.substr(begin, stop - begin);
        beat.body_start = scene.body_start + begin;
        beat.end = scene.body_start + stop;
        if (b == 0) {
            beat.heading = scene.heading;
            beat.start = scene.start;
        } else {
            beat.start = beat.body_start;
        }
        beats.push_back(std::move(beat));
        begin = stop;
    }
    return beats;
}

std::vector<std::size_t> beat_offsets_from_marker(std::string_view body, std::string_view marker) {
    std::vector<std::size_t> offsets;
    std::size_t pos = 0;
    while (pos < body.size()) {
        auto nl = body.find('\n', pos);
        if (nl == std::string_view::npos) nl = body.size();
        if (pos > 0 && body.substr(pos).starts_with(marker)) offsets.push_back(pos);
        pos = nl + 1;
    }
    return offsets;
}

std::vector<std::size_t> parse_beat_offsets(std::string_view sidecar) {
    std::vector<std::size_t> offsets;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= sidecar.size()) {
        auto nl = sidecar.find('\n', pos);
        if (nl == std::string_view::npos) nl = sidecar.size();
        ++line_no;
        const auto line = trim(sidecar.substr(pos, nl - pos));
        if (!line.empty() && line.front() != '#') {
            std::size_t value = 0;
            const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
            if (ec != std::errc{} || ptr != line.data() + line.size())
                throw InvalidBoundaries("line " + std::to_string(line_no) + ": '" + std::string(line) +
                                        "' is not a non-negative integer");
            offsets.push_back(value);
        }
        if (nl == sidecar.size()) break;
        pos = nl + 1;
    }
    return offsets;
}

}  // namespace storymap
