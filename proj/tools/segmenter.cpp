// Command-line front door: translate toy source to segment IR, inspect the
// structure dependence graph, run segmentation, and score suggestions
// against developer marks.
//
// Exit codes: 0 success, 1 internal error, 2 input error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "segmentation/engine.hpp"
#include "segmentation/eval.hpp"
#include "segmentation/frontend.hpp"
#include "segmentation/ir.hpp"
#include "segmentation/metrics.hpp"
#include "segmentation/report.hpp"
#include "segmentation/sdg.hpp"

namespace {

namespace fs = std::filesystem;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

seg::IrProgram load_ir(const std::string& path) {
    try {
        return seg::parse_ir(read_file(path));
    } catch (const seg::ParseError& e) {
        throw InputError(path + ": " + e.what());
    }
}

seg::Ratio threshold_arg(const std::string& text, const char* name) {
    try {
        auto r = seg::Ratio::from_decimal(text);
        if (!(seg::Ratio(0, 1) < r) || seg::Ratio(1, 1) < r)
            throw InputError(std::string(name) + " must lie in (0,1]");
        return r;
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string(name) + ": " + e.what());
    }
}

int run(int argc, char** argv) {
    CLI::App app{"extract-method suggestion engine over segment IR"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    // translate
    auto* cmd_translate = app.add_subcommand("translate", "toy source -> IR + source map");
    std::string translate_input;
    bool reduced_loop = false, no_split_io = false;
    cmd_translate->add_option("source", translate_input, "toy-language file")->required();
    cmd_translate->add_flag("--reduced-loop", reduced_loop, "omit loop step statements");
    cmd_translate->add_flag("--no-split-io", no_split_io, "keep multi-variable I/O grouped");

    // validate
    auto* cmd_validate = app.add_subcommand("validate", "check an IR file");
    std::string validate_input;
    cmd_validate->add_option("ir", validate_input, "IR file")->required();

    // sdg
    auto* cmd_sdg = app.add_subcommand("sdg", "build the dependence graph of an IR file");
    std::string sdg_input;
    bool want_dot = false;
    cmd_sdg->add_option("ir", sdg_input, "IR file")->required();
    cmd_sdg->add_flag("--dot", want_dot, "emit DOT instead of the debug dump");

    // analyze
    auto* cmd_analyze = app.add_subcommand("analyze", "per-block metric census of an IR file");
    std::string analyze_input;
    bool analyze_nre = false;
    cmd_analyze->add_option("ir", analyze_input, "IR file")->required();
    cmd_analyze->add_flag("--no-relay-extract", analyze_nre, "admit relay-free blocks");

    // segment
    auto* cmd_segment = app.add_subcommand("segment", "run segmentation, emit suggestions");
    std::string segment_input, locs_text = "0.41", pa_text = "0.34", map_path;
    bool nre = false, trace = false;
    cmd_segment->add_option("ir", segment_input, "IR file")->required();
    cmd_segment->add_option("--locs", locs_text, "LoCS threshold")->capture_default_str();
    cmd_segment->add_option("--pa", pa_text, "parent-affinity threshold")->capture_default_str();
    cmd_segment->add_flag("--no-relay-extract", nre, "admit relay-free blocks");
    cmd_segment->add_flag("--trace", trace, "write one DOT snapshot per contraction event");
    cmd_segment->add_option("--map", map_path, "source-map sidecar for source-line spans");

    // eval
    auto* cmd_eval = app.add_subcommand("eval", "score suggestions against marks");
    std::string eval_suggestions, eval_truth;
    int tolerance = 1;
    cmd_eval->add_option("suggestions", eval_suggestions, "suggestions file")->required();
    cmd_eval->add_option("truth", eval_truth, "ground-truth file")->required();
    cmd_eval->add_option("--tolerance", tolerance, "per-boundary deviation in statements")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    fs::path out{out_dir};

    if (cmd_translate->parsed()) {
        seg::FrontendOptions opts;
        opts.reduced_loop = reduced_loop;
        opts.split_io = !no_split_io;
        std::pair<seg::IrProgram, seg::SourceMap> result;
        try {
            result = seg::translate(read_file(translate_input), opts);
        } catch (const seg::FrontendError& e) {
            throw InputError(translate_input + ": " + e.what());
        }
        std::string stem = stem_of(translate_input);
        write_file(out / (stem + ".ir"), seg::serialize_ir(result.first));
        write_file(out / (stem + ".map"), result.second.serialize());
        std::cout << "wrote " << (out / (stem + ".ir")).string() << " ("
                  << result.first.size() << " statements)\n";
        return 0;
    }

    if (cmd_validate->parsed()) {
        auto program = seg::parse_ir_lines(read_file(validate_input));
        auto diags = seg::validate(program);
        for (const auto& d : diags)
            std::cerr << validate_input << ": statement " << d.index << ": " << d.rule << ": "
                      << d.message << "\n";
        if (!diags.empty()) return 2;
        std::cout << "ok (" << program.size() << " statements)\n";
        return 0;
    }

    if (cmd_sdg->parsed()) {
        auto program = load_ir(sdg_input);
        auto g = seg::build_sdg(program);
        std::string stem = stem_of(sdg_input);
        if (want_dot) {
            write_file(out / (stem + ".dot"), g.to_dot());
            std::cout << "wrote " << (out / (stem + ".dot")).string() << "\n";
        } else {
            std::cout << g.dump();
        }
        return 0;
    }

    if (cmd_analyze->parsed()) {
        auto program = load_ir(analyze_input);
        auto g = seg::build_sdg(program);
        for (int v : g.primary_control_vertices()) {
            auto a = seg::analyze_block(g, v);
            std::cout << seg::render_block_report(a, seg::locs(a, analyze_nre));
        }
        return 0;
    }

    if (cmd_segment->parsed()) {
        auto program = load_ir(segment_input);
        seg::SegmentationConfig cfg;
        cfg.locs_threshold = threshold_arg(locs_text, "--locs");
        cfg.pa_threshold = threshold_arg(pa_text, "--pa");
        cfg.no_relay_extract = nre;
        std::string stem = stem_of(segment_input);

        int snapshot = 0;
        seg::TraceObserver observer;
        if (trace) {
            observer = [&](const seg::TraceEvent& ev, const seg::Sdg& g) {
                std::ostringstream name;
                name << stem << ".trace." << std::setw(3) << std::setfill('0') << ++snapshot
                     << ".dot";
                std::string body = "// " + ev.describe() + "\n" + g.to_dot();
                write_file(out / name.str(), body);
            };
        }
        auto result = seg::segment(program, cfg, observer);

        seg::SourceMap map;
        bool have_map = false;
        if (!map_path.empty()) {
            map = seg::SourceMap::parse(read_file(map_path));
            have_map = true;
        }
        auto text = seg::write_suggestions(result, cfg, fs::path(segment_input).filename().string(),
                                           have_map ? &map : nullptr);
        write_file(out / (stem + ".suggestions.txt"), text);
        std::cout << "wrote " << (out / (stem + ".suggestions.txt")).string() << " ("
                  << result.emos.size() << " suggestions";
        if (trace) std::cout << ", " << snapshot << " snapshots";
        std::cout << ")\n";
        return 0;
    }

    if (cmd_eval->parsed()) {
        if (tolerance < 0) throw InputError("--tolerance must be non-negative");
        auto spans = seg::parse_suggestions(read_file(eval_suggestions));
        seg::GroundTruth truth;
        try {
            truth = seg::load_ground_truth(read_file(eval_truth));
        } catch (const seg::ParseError& e) {
            throw InputError(eval_truth + ": " + e.what());
        }
        auto report = seg::match_opportunities(spans, truth, tolerance);
        std::cout << seg::write_match_report(report);
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const seg::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
