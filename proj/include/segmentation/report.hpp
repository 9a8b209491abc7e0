#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "segmentation/engine.hpp"
#include "segmentation/eval.hpp"
#include "segmentation/frontend.hpp"

namespace seg {

// Structured-text suggestions, one block per opportunity. The format is the
// eval command's input, so it round-trips through parse_suggestions.
inline std::string write_suggestions(const SegmentationResult& result,
                                     const SegmentationConfig& cfg,
                                     const std::string& source_name,
                                     const SourceMap* map = nullptr) {
    std::ostringstream out;
    out << "# suggestions v1\n";
    out << "# source: " << source_name << "\n";
    out << "# config: locs=" << cfg.locs_threshold.str() << " pa=" << cfg.pa_threshold.str()
        << " no_relay_extract=" << (cfg.no_relay_extract ? 1 : 0) << "\n";
    int n = 0;
    for (const auto& e : result.emos) {
        out << "emo " << ++n << "\n";
        out << "span " << e.ir_span.first << ' ' << e.ir_span.second << "\n";
        out << "members " << Sdg::format_members(e.members) << "\n";
        if (map) {
            auto [a, b] = map->map_range(e.ir_span.first, e.ir_span.second);
            out << "source_span " << a << ' ' << b << "\n";
        }
        out << "params";
        for (const auto& v : e.params) out << ' ' << v;
        if (e.params.empty()) out << " -";
        out << "\n";
        out << "returns";
        for (const auto& v : e.returns) out << ' ' << v;
        if (e.returns.empty()) out << " -";
        out << "\n";
        out << "score " << e.score.str() << ' ' << e.score.decimal() << "\n";
        for (const auto& v : e.variants) out << "variant " << v << "\n";
        for (const auto& t : e.trace) out << "trace " << t << "\n";
        out << "end\n";
    }
    return out.str();
}

inline std::vector<SuggestionSpan> parse_suggestions(const std::string& text) {
    std::vector<SuggestionSpan> spans;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word != "span") continue;
        SuggestionSpan s;
        if (!(ls >> s.start >> s.end)) throw ParseError(line_no, "malformed span line");
        spans.push_back(s);
    }
    return spans;
}

inline std::string write_match_report(const MatchReport& r) {
    auto ratio_line = [](const char* name, const std::optional<double>& v) {
        std::ostringstream out;
        out << name << ' ';
        if (!v) {
            out << '-';
        } else {
            out << std::fixed;
            out.precision(4);
            out << *v;
        }
        out << '\n';
        return out.str();
    };
    std::ostringstream out;
    out << "tp " << r.tp << "\nfp " << r.fp << "\nfn " << r.fn << "\n";
    out << ratio_line("precision", r.precision) << ratio_line("recall", r.recall)
        << ratio_line("f_measure", r.f_measure);
    return out.str();
}

} // namespace seg
