#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "storymap/bundle.hpp"
#include "storymap/errors.hpp"
#include "storymap/render.hpp"
#include "storymap/serialize.hpp"

namespace fs = std::filesystem;
using namespace storymap;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    io::write_file_atomic(path, content);
}

AnalysisBundle load_bundle(const std::string& path) { return bundle_from_json(io::read_json(path)); }

std::string format_style(const StyleProfile& s) {
    std::ostringstream os;
    os << std::setprecision(6);
    for (std::size_t a = 1; a <= kAttributeCount; ++a)
        os << "  a" << a << "  " << std::left << std::setw(22) << StyleProfile::attribute_name(a) << std::right
           << s.attribute(a) << "\n";
    if (s.insufficient_for_variance) os << "  (one step only: variances reported as 0)\n";
    return os.str();
}

std::string format_report(const RandomizationReport& r) {
    std::ostringstream os;
    os << r.n_trials << " randomized orders of " << r.n_units << " units, seed " << r.seed << ", threshold "
       << r.threshold_percent << "%\n";
    os << "  attr        real value   real<=trial   real>=trial  direction\n";
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        const auto& c = r.attributes[a];
        os << "  a" << a + 1 << "  " << std::setw(16) << std::setprecision(6) << c.real << "  " << std::setw(11)
           << std::fixed << std::setprecision(1) << 100.0 * c.fraction_le << "%  " << std::setw(11)
           << 100.0 * c.fraction_ge << "%  " << to_string(c.direction) << "\n";
        os.unsetf(std::ios::fixed);
    }
    if (r.repeated) {
        os << "  over " << r.repeated->runs << " repeated runs, share of runs at or above the threshold:\n";
        for (std::size_t a = 0; a < kAttributeCount; ++a)
            os << "    a" << a + 1 << "  <= " << r.repeated->le_share[a] << "  >= " << r.repeated->ge_share[a] << "\n";
    }
    return os.str();
}

std::string format_segments(const std::vector<SegmentRange>& segs) {
    std::ostringstream os;
    for (std::size_t s = 0; s < segs.size(); ++s)
        os << "segment " << s + 1 << ": units " << segs[s].first << ".." << segs[s].second << "\n";
    return os.str();
}

// --- parse ---------------------------------------------------------------

struct ParseArgs {
    std::string script;
    std::string profile = "imsdb";
    std::string out;
    bool no_headings = false;
};

int cmd_parse(const ParseArgs& a) {
    auto profile = io::load_profile(a.profile);
    if (a.no_headings) profile.include_headings = false;
    const auto text = io::read_file(a.script);
    auto units = split_scenes(text, profile);
    tokenize_all(units, profile.include_headings);
    const io::SourceInfo src{fs::path(a.script).stem().string(), io::sha256_hex(text)};
    emit(a.out, io::dump(io::units_to_json(units, src, profile)));
    std::cerr << units.size() << " scenes\n";
    return 0;
}

// --- analyze -------------------------------------------------------------

struct AnalyzeArgs {
    std::string input;
    std::string profile;
    bool no_headings = false;
    std::string mode = "presence";
    std::string vectors = "orientation";
    std::size_t scene = 0;
    std::string beats;
    std::size_t k = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 1;
    double threshold = kDefaultThresholdPercent;
    std::size_t repeats = 1;
    unsigned workers = default_workers();
    std::size_t zipf_top = 20;
    std::size_t column_factors = 5;
    std::string out;
    std::string table_out;
    std::string table_tsv;
    std::string embedding_out;
};

bool is_units_document(const std::string& path) { return fs::path(path).extension() == ".json"; }

int cmd_analyze(const AnalyzeArgs& a) {
    AnalysisConfig cfg;
    cfg.mode = count_mode_from_string(a.mode);
    cfg.cluster_input = cluster_input_from_string(a.vectors);
    if (a.scene > 0) cfg.beat_scene = a.scene;
    if (!a.beats.empty()) {
        if (!cfg.beat_scene) throw InputError("--beats requires --scene");
        cfg.beat_offsets = parse_beat_offsets(io::read_file(a.beats));
    }
    cfg.segments = a.k;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.threshold_percent = a.threshold;
    cfg.repeats = a.repeats;
    cfg.zipf_top = a.zipf_top;
    cfg.column_factors = a.column_factors;

    AnalysisBundle b;
    if (is_units_document(a.input)) {
        auto doc = io::units_from_json(io::read_json(a.input));
        cfg.profile = a.profile.empty() ? doc.profile : io::load_profile(a.profile);
        if (a.no_headings) cfg.profile.include_headings = false;
        b = analyze_units(prepare_units(std::move(doc.units), cfg), doc.source.name, doc.source.sha256, cfg,
                          a.workers);
    } else {
        cfg.profile = io::load_profile(a.profile.empty() ? "imsdb" : a.profile);
        if (a.no_headings) cfg.profile.include_headings = false;
        b = analyze_text(io::read_file(a.input), fs::path(a.input).stem().string(), cfg, a.workers);
    }

    if (!a.table_out.empty() || !a.table_tsv.empty()) {
        // rebuild the pruned table for export
        const auto units = is_units_document(a.input)
                               ? prepare_units(io::units_from_json(io::read_json(a.input)).units, cfg)
                               : prepare_units(io::read_file(a.input), cfg);
        const auto table = prune(build_table(units, cfg.mode)).table;
        if (!a.table_out.empty()) emit(a.table_out, io::dump(io::table_to_json(table)));
        if (!a.table_tsv.empty()) emit(a.table_tsv, io::table_to_delimited(table));
    }
    if (!a.embedding_out.empty()) emit(a.embedding_out, io::dump(io::embedding_to_json(b.embedding)));
    emit(a.out, io::dump(bundle_to_json(b)));

    std::cerr << b.script << ": " << b.table.units << " units, " << b.table.vocabulary << " words, "
              << b.embedding.n_factors() << " factors";
    if (b.embedding.n_factors() >= 2)
        std::cerr << ", factor plane 1-2 explains " << std::fixed << std::setprecision(2)
                  << b.embedding.percent_inertia(0) + b.embedding.percent_inertia(1) << "% of inertia";
    std::cerr << "\n";
    for (const auto& w : b.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

// --- cluster -------------------------------------------------------------

struct ClusterArgs {
    std::string input;
    std::size_t k = 0;
    std::string vectors;
    std::string out;
    std::string newick;
};

int cmd_cluster(const ClusterArgs& a) {
    const auto j = io::read_json(a.input);
    const auto schema = j.is_object() && j.contains("schema") ? j["schema"].get<std::string>() : std::string{};
    Dendrogram d;
    if (schema == "storymap.embedding") {
        const auto e = io::embedding_from_json(j);
        d = cluster_series(e, cluster_input_from_string(a.vectors.empty() ? "orientation" : a.vectors));
    } else {
        const auto b = bundle_from_json(j);
        d = a.vectors.empty() ? b.dendrogram : cluster_series(b.embedding, cluster_input_from_string(a.vectors));
    }

    auto doc = io::dendrogram_to_json(d);
    std::optional<std::vector<SegmentRange>> segs;
    if (a.k > 0) {
        segs = cut(d, a.k);
        doc["segments"] = io::segments_to_json(*segs);
    }
    if (!a.newick.empty()) emit(a.newick, to_newick(d) + "\n");
    if (!a.out.empty()) emit(a.out, io::dump(doc));
    if (a.out.empty() && a.newick.empty()) std::cout << to_newick(d) << "\n";
    if (segs) std::cout << format_segments(*segs);
    return 0;
}

// --- test ----------------------------------------------------------------

struct TestArgs {
    std::string bundle;
    std::size_t trials = kDefaultTrials;
    std::uint64_t seed = 1;
    double threshold = kDefaultThresholdPercent;
    std::size_t repeats = 1;
    unsigned workers = default_workers();
    std::string out;
    bool update_bundle = false;
};

int cmd_test(const TestArgs& a) {
    auto b = load_bundle(a.bundle);
    const auto series = b.series();
    const auto report = a.repeats > 1
                            ? randomize_repeated(series, a.trials, a.seed, a.repeats, a.threshold, a.workers)
                            : randomize_test(series, a.trials, a.seed, a.threshold, a.workers);
    if (!a.out.empty()) emit(a.out, io::dump(io::report_to_json(report)));
    if (a.update_bundle) {
        b.config.trials = a.trials;
        b.config.seed = a.seed;
        b.config.threshold_percent = a.threshold;
        b.config.repeats = a.repeats;
        b.randomization = report;
        io::write_file_atomic(a.bundle, io::dump(bundle_to_json(b)));
    }
    std::cout << b.script << "\n" << format_style(b.style) << format_report(report);
    return 0;
}

// --- render --------------------------------------------------------------

struct RenderArgs {
    std::string bundle;
    std::string plot = "dendrogram";
    std::vector<std::size_t> axes{1, 2};
    std::string out_dir = ".";
};

int cmd_render(const RenderArgs& a) {
    const auto b = load_bundle(a.bundle);
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    if (a.plot == "dendrogram") {
        const auto title = b.script + ": contiguity-constrained complete-link hierarchy";
        const auto svg = dir / (b.script + ".dendrogram.svg");
        const auto dot = dir / (b.script + ".dendrogram.dot");
        io::write_file_atomic(svg, render::dendrogram_svg(b.dendrogram, title));
        io::write_file_atomic(dot, render::dendrogram_dot(b.dendrogram, title));
        std::cout << svg.string() << "\n" << dot.string() << "\n";
    } else {
        if (a.axes.size() != 2) throw InputError("--axes takes two factor numbers, e.g. 1,2");
        const auto title = b.script + ": correspondence analysis";
        const auto svg = dir / (b.script + ".factors-" + std::to_string(a.axes[0]) + "-" +
                                std::to_string(a.axes[1]) + ".svg");
        io::write_file_atomic(svg, render::factor_plane_svg(b.embedding, a.axes[0], a.axes[1], title));
        std::cout << svg.string() << "\n";
    }
    return 0;
}

// --- batch ---------------------------------------------------------------

struct BatchArgs {
    std::string dir;
    std::string profile = "imsdb";
    std::string mode = "presence";
    std::string out_dir;
    std::size_t k = 0;
    std::size_t trials = kDefaultTrials;
    std::uint64_t seed = 1;
    double threshold = kDefaultThresholdPercent;
    unsigned jobs = default_workers();
};

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
    return kExitInput;
}

int cmd_batch(const BatchArgs& a) {
    std::vector<fs::path> scripts;
    for (const auto& entry : fs::directory_iterator(a.dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt") scripts.push_back(entry.path());
    std::sort(scripts.begin(), scripts.end());
    if (scripts.empty()) throw InputError("no .txt scripts in " + a.dir);

    AnalysisConfig cfg;
    cfg.profile = io::load_profile(a.profile);
    cfg.mode = count_mode_from_string(a.mode);
    cfg.segments = a.k;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.threshold_percent = a.threshold;

    const fs::path out_dir = a.out_dir.empty() ? fs::path(a.dir) : fs::path(a.out_dir);
    fs::create_directories(out_dir);

    std::vector<std::optional<NamedReport>> results(scripts.size());
    std::vector<int> codes(scripts.size(), 0);
    std::mutex console;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < scripts.size(); i = next++) {
            const auto name = scripts[i].stem().string();
            try {
                const auto b = analyze_text(io::read_file(scripts[i]), name, cfg, 1);
                io::write_file_atomic(out_dir / (name + ".bundle.json"), io::dump(bundle_to_json(b)));
                if (b.randomization) results[i] = NamedReport{name, *b.randomization};
                std::lock_guard lock(console);
                std::cerr << name << ": " << b.table.units << " units, " << b.table.vocabulary << " words\n";
                for (const auto& w : b.warnings) std::cerr << "  warning: " << w << "\n";
            } catch (const std::exception& e) {
                codes[i] = exit_code_for(e);
                std::lock_guard lock(console);
                std::cerr << name << ": error: " << e.what() << "\n";
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto n = std::min<std::size_t>(std::max(1u, a.jobs), scripts.size());
        for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
    }

    std::vector<NamedReport> reports;
    for (auto& r : results)
        if (r) reports.push_back(std::move(*r));
    if (!reports.empty()) {
        const auto rows = summarize_table(reports, a.threshold);
        io::write_file_atomic(out_dir / "significance.json", io::dump(io::significance_to_json(rows, a.threshold)));
        const auto table = format_significance_table(rows);
        io::write_file_atomic(out_dir / "significance.txt", table);
        std::cout << table;
    }
    for (auto c : codes)
        if (c != 0) return c;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Narrative structure of film scripts: correspondence analysis, sequence-constrained\n"
                 "hierarchical clustering and randomization tests of pacing attributes."};
    app.require_subcommand(1);

    ParseArgs pa;
    auto* parse = app.add_subcommand("parse", "Split a script into scenes and tokenize them");
    parse->add_option("script", pa.script, "Script text file")->required()->check(CLI::ExistingFile);
    parse->add_option("--profile", pa.profile, "Format profile: imsdb, twiz, or a profile file")
        ->capture_default_str();
    parse->add_option("-o,--out", pa.out, "Output units JSON (default: stdout)");
    parse->add_flag("--no-headings", pa.no_headings, "Leave scene heading words out of the tokens");

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Table, correspondence analysis, hierarchy and style profile");
    analyze->add_option("input", aa.input, "Script text file or units JSON")->required()->check(CLI::ExistingFile);
    analyze->add_option("--profile", aa.profile, "Format profile (default: imsdb, or the units file's profile)");
    analyze->add_flag("--no-headings", aa.no_headings, "Leave scene heading words out of the tokens");
    analyze->add_option("--mode", aa.mode, "Table entries")
        ->check(CLI::IsMember({"presence", "frequency"}))
        ->capture_default_str();
    analyze->add_option("--vectors", aa.vectors, "Vectors clustered")
        ->check(CLI::IsMember({"orientation", "projection"}))
        ->capture_default_str();
    analyze->add_option("--scene", aa.scene, "Analyse the beats of this 1-based scene");
    analyze->add_option("--beats", aa.beats, "Beat boundary offsets file (one per line)")->check(CLI::ExistingFile);
    analyze->add_option("-k,--k", aa.k, "Cut the hierarchy into k segments");
    analyze->add_option("--trials", aa.trials, "Randomized orders to compare against (0: none)")
        ->capture_default_str();
    analyze->add_option("--seed", aa.seed, "Random seed")->capture_default_str();
    analyze->add_option("--threshold", aa.threshold, "Significance threshold in percent")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    analyze->add_option("--repeats", aa.repeats, "Repeated randomization runs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    analyze->add_option("-j,--workers", aa.workers, "Worker threads")->check(CLI::PositiveNumber);
    analyze->add_option("--zipf-top", aa.zipf_top, "Top word frequencies kept")->capture_default_str();
    analyze->add_option("--column-factors", aa.column_factors, "Word projections kept per factor")
        ->capture_default_str();
    analyze->add_option("-o,--out", aa.out, "Output bundle JSON (default: stdout)");
    analyze->add_option("--table-out", aa.table_out, "Write the pruned table as JSON");
    analyze->add_option("--table-tsv", aa.table_tsv, "Write the pruned table as TSV");
    analyze->add_option("--embedding-out", aa.embedding_out, "Write the full embedding as JSON");

    ClusterArgs ca;
    auto* clusterc = app.add_subcommand("cluster", "Hierarchy of a bundle or embedding, with an optional cut");
    clusterc->add_option("input", ca.input, "Bundle or embedding JSON")->required()->check(CLI::ExistingFile);
    clusterc->add_option("-k,--k", ca.k, "Cut into k contiguous segments");
    clusterc->add_option("--vectors", ca.vectors, "Recluster on these vectors")
        ->check(CLI::IsMember({"orientation", "projection"}));
    clusterc->add_option("-o,--out", ca.out, "Output dendrogram JSON");
    clusterc->add_option("--newick", ca.newick, "Output Newick file");

    TestArgs ta;
    auto* testc = app.add_subcommand("test", "Randomization test of the style attributes");
    testc->add_option("bundle", ta.bundle, "Bundle JSON")->required()->check(CLI::ExistingFile);
    testc->add_option("--trials", ta.trials, "Randomized orders")->check(CLI::PositiveNumber)->capture_default_str();
    testc->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
    testc->add_option("--threshold", ta.threshold, "Significance threshold in percent")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    testc->add_option("--repeats", ta.repeats, "Repeated runs")->check(CLI::PositiveNumber)->capture_default_str();
    testc->add_option("-j,--workers", ta.workers, "Worker threads")->check(CLI::PositiveNumber);
    testc->add_option("-o,--out", ta.out, "Output report JSON");
    testc->add_flag("--update-bundle", ta.update_bundle, "Store the report in the bundle");

    RenderArgs ra;
    auto* renderc = app.add_subcommand("render", "Static SVG/DOT plots of a bundle");
    renderc->add_option("bundle", ra.bundle, "Bundle JSON")->required()->check(CLI::ExistingFile);
    renderc->add_option("--plot", ra.plot, "Plot type")
        ->check(CLI::IsMember({"dendrogram", "factors"}))
        ->capture_default_str();
    renderc->add_option("--axes", ra.axes, "Factor axes, e.g. 1,2")->delimiter(',')->expected(2);
    renderc->add_option("--out-dir", ra.out_dir, "Output directory")->capture_default_str();

    BatchArgs ba;
    auto* batch = app.add_subcommand("batch", "Analyse every .txt script in a directory");
    batch->add_option("dir", ba.dir, "Directory of scripts")->required()->check(CLI::ExistingDirectory);
    batch->add_option("--profile", ba.profile, "Format profile")->capture_default_str();
    batch->add_option("--mode", ba.mode, "Table entries")
        ->check(CLI::IsMember({"presence", "frequency"}))
        ->capture_default_str();
    batch->add_option("--out-dir", ba.out_dir, "Output directory (default: the input directory)");
    batch->add_option("-k,--k", ba.k, "Cut each hierarchy into k segments");
    batch->add_option("--trials", ba.trials, "Randomized orders per script")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    batch->add_option("--seed", ba.seed, "Random seed")->capture_default_str();
    batch->add_option("--threshold", ba.threshold, "Significance threshold in percent")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    batch->add_option("-j,--jobs", ba.jobs, "Scripts analysed in parallel")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*parse) return cmd_parse(pa);
        if (*analyze) return cmd_analyze(aa);
        if (*clusterc) return cmd_cluster(ca);
        if (*testc) return cmd_test(ta);
        if (*renderc) return cmd_render(ra);
        if (*batch) return cmd_batch(ba);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
