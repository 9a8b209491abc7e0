#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "segmentation/ir.hpp"

namespace seg {

struct GroundTruth {
    struct Mark {
        std::string method;
        int start = 0;
        int end = 0;
    };
    std::vector<Mark> marks;
};

// One mark per line: "method start end". '#' comments and blank lines skipped.
inline GroundTruth load_ground_truth(const std::string& text) {
    GroundTruth gt;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string method;
        if (!(ls >> method)) continue;
        if (method[0] == '#') continue;
        int start, end;
        if (!(ls >> start >> end)) throw ParseError(line_no, "expected 'method start end'");
        std::string extra;
        if (ls >> extra) throw ParseError(line_no, "trailing tokens");
        if (start > end) throw ParseError(line_no, "start exceeds end");
        gt.marks.push_back({method, start, end});
    }
    return gt;
}

struct SuggestionSpan {
    int start = 0;
    int end = 0;
};

struct MatchReport {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f_measure;
};

// A suggestion matches a mark when both boundary deviations fit the
// tolerance. Matching is one-to-one: pairs are taken greedily by smallest
// total deviation, ties broken by earlier mark, then earlier suggestion.
inline MatchReport match_opportunities(const std::vector<SuggestionSpan>& suggested,
                                       const GroundTruth& marked, int tolerance) {
    if (tolerance < 0) throw std::invalid_argument("negative tolerance");
    struct Pair {
        int deviation;
        int mark;
        int suggestion;
    };
    std::vector<Pair> pairs;
    for (size_t m = 0; m < marked.marks.size(); ++m) {
        for (size_t s = 0; s < suggested.size(); ++s) {
            int ds = std::abs(suggested[s].start - marked.marks[m].start);
            int de = std::abs(suggested[s].end - marked.marks[m].end);
            if (ds <= tolerance && de <= tolerance)
                pairs.push_back({ds + de, static_cast<int>(m), static_cast<int>(s)});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.deviation != b.deviation) return a.deviation < b.deviation;
        if (a.mark != b.mark) return a.mark < b.mark;
        return a.suggestion < b.suggestion;
    });
    std::vector<bool> mark_used(marked.marks.size(), false);
    std::vector<bool> sugg_used(suggested.size(), false);
    MatchReport r;
    for (const auto& p : pairs) {
        if (mark_used[static_cast<size_t>(p.mark)] || sugg_used[static_cast<size_t>(p.suggestion)])
            continue;
        mark_used[static_cast<size_t>(p.mark)] = true;
        sugg_used[static_cast<size_t>(p.suggestion)] = true;
        ++r.tp;
    }
    r.fp = static_cast<int>(suggested.size()) - r.tp;
    r.fn = static_cast<int>(marked.marks.size()) - r.tp;
    if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / (r.tp + r.fp);
    if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / (r.tp + r.fn);
    if (r.precision && r.recall && (*r.precision + *r.recall) > 0)
        r.f_measure = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    return r;
}

} // namespace seg
