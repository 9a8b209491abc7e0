#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "segmentation/metrics.hpp"
#include "segmentation/sdg.hpp"

namespace seg {

struct SegmentationConfig {
    Ratio locs_threshold{41, 100};
    Ratio pa_threshold{34, 100};
    bool no_relay_extract = false;

    void check() const {
        Ratio zero{0, 1}, one{1, 1};
        if (!(zero < locs_threshold) || one < locs_threshold)
            throw std::invalid_argument("locs threshold outside (0,1]");
        if (!(zero < pa_threshold) || one < pa_threshold)
            throw std::invalid_argument("pa threshold outside (0,1]");
    }
};

struct TraceEvent {
    enum class Phase { Block, Source, Chain };
    Phase phase = Phase::Block;
    int root = -1;              // vertex the activity targeted
    std::vector<int> absorbed;  // labels merged in by this event
    int pass_root = -1;         // primary vertex whose pass produced it

    std::string describe() const {
        std::string name = phase == Phase::Block ? "block"
                           : phase == Phase::Source ? "source"
                                                    : "chain";
        std::string s = name + " " + std::to_string(root) + ": absorbed";
        for (size_t i = 0; i < absorbed.size(); ++i)
            s += (i ? "," : " ") + std::to_string(absorbed[i]);
        return s;
    }
};

// One line per edge contraction, with both regions captured before the merge.
struct ContractionRecord {
    bool control = false;
    int u = -1, v = -1;
    int u_region = -1, v_region = -1;
    int kept = -1;
};

struct Emo {
    std::set<int> members;
    std::pair<int, int> ir_span{0, 0};
    std::vector<std::string> params;
    std::vector<std::string> returns;
    Ratio score;
    int origin_root = -1;
    std::vector<std::string> variants;
    std::vector<std::string> trace;
};

struct SegmentationResult {
    Sdg segment_graph;
    std::vector<Emo> emos;
    std::vector<TraceEvent> events;
    std::vector<ContractionRecord> contractions;
};

using TraceObserver = std::function<void(const TraceEvent&, const Sdg&)>;

namespace detail {

class Engine {
public:
    Engine(Sdg graph, SegmentationConfig config, TraceObserver obs)
        : g(std::move(graph)), cfg(config), observer(std::move(obs)) {
        cfg.check();
    }

    Sdg g;
    SegmentationConfig cfg;
    TraceObserver observer;
    std::vector<TraceEvent> events;
    std::vector<ContractionRecord> contractions;
    std::vector<Emo> emos;
    int pass_root = -1;
    std::vector<std::string>* pass_trace = nullptr;

    void run() {
        auto worklist = g.primary_control_vertices();
        while (!worklist.empty()) {
            int v = worklist.back();
            worklist.pop_back();
            if (!g.has_vertex(v)) continue; // swallowed by an earlier pass
            pass_root = v;
            auto analysis = analyze_block(g, v);
            auto score = locs(analysis, cfg.no_relay_extract);
            if (score && *score < cfg.locs_threshold) {
                accept_pass(v, *score, worklist);
            } else if (!g.control_parent(v)) {
                // Rejected and not control dependent on anything: the block
                // still collapses, it just is not suggested.
                ccb_in_place(v);
                esc_in_place(v);
            }
            // Rejected blocks under an unprocessed parent stay intact; the
            // parent's pass sweeps them up.
        }
    }

    void accept_pass(int v, Ratio score, std::vector<int>& worklist) {
        Emo emo;
        emo.score = score;
        emo.origin_root = v;
        pass_trace = &emo.trace;
        ccb_in_place(v);
        esc_in_place(v);
        sddc_in_place(v, emo.variants);
        int final_vertex = climb(v, worklist, emo.variants);
        pass_trace = nullptr;
        emo.members = g.vertex(final_vertex).members;
        // A bigger accepted segment supersedes the smaller ones it absorbed;
        // their contraction history belongs to the surviving segment.
        std::vector<Emo> kept;
        std::vector<std::string> inherited;
        for (auto& prior : emos) {
            bool absorbed = std::includes(emo.members.begin(), emo.members.end(),
                                          prior.members.begin(), prior.members.end());
            if (absorbed) {
                emo.variants.push_back("absorbed segment " + Sdg::format_members(prior.members) +
                                       ": locs " + prior.score.str());
                inherited.insert(inherited.end(), prior.trace.begin(), prior.trace.end());
            } else {
                kept.push_back(std::move(prior));
            }
        }
        emo.trace.insert(emo.trace.begin(), inherited.begin(), inherited.end());
        emos = std::move(kept);
        emos.push_back(std::move(emo));
    }

    // Climb control parents while the merger case (or PA, where the case
    // defers to it) says the parent belongs to the same functionality. Each
    // merged parent is pruned from the worklist and fully contracted.
    int climb(int v, std::vector<int>& worklist, std::vector<std::string>& variants) {
        int cur = v;
        for (;;) {
            auto p = g.control_parent(cur);
            if (!p || g.vertex(*p).kind != VertexKind::Primary) return cur;
            auto mc = merger_case(g, *p, cur);
            if (merger_decision(mc) == MergerDecision::UsePA) {
                auto pa = parent_affinity(g, *p, cur);
                if (!(pa && *pa < cfg.pa_threshold)) {
                    variants.push_back("parent " + std::to_string(*p) + " not merged: pa " +
                                       (pa ? pa->str() : "not-computed") + " >= " +
                                       cfg.pa_threshold.str());
                    return cur;
                }
            }
            worklist.erase(std::remove(worklist.begin(), worklist.end(), *p), worklist.end());
            int parent = *p;
            ccb_in_place(parent);
            esc_in_place(parent);
            sddc_in_place(parent, variants);
            cur = parent;
        }
    }

    // Contract Control Block: fold the whole control subtree of v into one
    // vertex labeled v, innermost blocks first.
    void ccb_in_place(int v) {
        auto subtree = g.block_members(v);
        std::vector<int> roots;
        for (int u : subtree)
            if (!g.control_succs(u).empty()) roots.push_back(u);
        std::sort(roots.rbegin(), roots.rend());
        for (int u : roots) {
            bool noteworthy = u == v;
            for (int w : g.control_succs(u))
                if (g.vertex(w).members.size() > 1) noteworthy = true;
            std::vector<int> absorbed;
            for (;;) {
                auto succs = g.control_succs(u);
                if (succs.empty()) break;
                int w = *succs.begin();
                record(true, u, w, u);
                g.contract_with_label(u, w, u);
                absorbed.push_back(w);
            }
            if (noteworthy) emit({TraceEvent::Phase::Block, u, absorbed, pass_root});
        }
    }

    // Exclusive Source Contraction: plain sources with a single data edge
    // fold into their receiver when source, receiver, and target all share a
    // control region. Repeats until no source qualifies, so supplier chains
    // reach the target one merge at a time. Contracted block vertices are
    // suppliers of another kind and are never folded away here.
    void esc_in_place(int target) {
        std::vector<int> absorbed;
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<int> ids;
            for (const auto& [id, vx] : g.vertices) ids.push_back(id);
            for (int u : ids) {
                if (u == target || !g.has_vertex(u) || !g.is_source_vertex(u)) continue;
                if (g.vertex(u).kind != VertexKind::Plain) continue;
                auto succs = g.data_succs(u);
                if (succs.size() != 1) continue;
                int w = *succs.begin();
                int tr = g.control_region(target);
                if (g.control_region(u) != tr || g.control_region(w) != tr) continue;
                record(false, u, w, w);
                g.contract_with_label(u, w, w);
                absorbed.push_back(u);
                changed = true;
            }
        }
        if (!absorbed.empty()) emit({TraceEvent::Phase::Source, target, absorbed, pass_root});
    }

    // Sequential Data Dependence Contraction: unit incoming chains always
    // merge; one remaining longer incoming chain merges; the outgoing chain
    // merges only when it is alone. Competing long chains are reported as
    // variants and left for the user.
    void sddc_in_place(int target, std::vector<std::string>& variants) {
        const int region = g.control_region(target);
        std::vector<int> absorbed;

        std::vector<int> units;
        std::vector<std::vector<int>> longs;
        for (int u : g.data_preds(target)) {
            if (g.vertex(u).kind != VertexKind::Plain) continue;
            if (g.control_region(u) != region) continue;
            auto succs = g.data_succs(u);
            if (succs.size() != 1 || *succs.begin() != target) continue;
            auto chain = metrics_walk_incoming(u, region);
            if (chain.size() == 1)
                units.push_back(u);
            else
                longs.push_back(chain);
        }
        for (int u : units) {
            record(false, u, target, target);
            g.contract_with_label(u, target, target);
            absorbed.push_back(u);
        }
        if (longs.size() == 1) {
            const auto& chain = longs[0];
            for (size_t i = 1; i < chain.size(); ++i) {
                record(false, chain[0], chain[i], chain[0]);
                g.contract_with_label(chain[0], chain[i], chain[0]);
            }
            record(false, chain[0], target, target);
            g.contract_with_label(chain[0], target, target);
            for (int c : chain) absorbed.push_back(c);
        } else {
            for (const auto& chain : longs)
                variants.push_back("incoming chain " +
                                   Sdg::format_members({chain.begin(), chain.end()}) +
                                   " not merged: " + std::to_string(longs.size()) +
                                   " long incoming chains");
        }

        std::vector<std::vector<int>> outgoing;
        for (int w : g.data_succs(target)) {
            if (g.vertex(w).kind != VertexKind::Plain) continue;
            if (g.control_region(w) != region) continue;
            auto preds = g.data_preds(w);
            if (preds.size() != 1 || *preds.begin() != target) continue;
            auto path = detail::walk_outgoing_chain(g, w, region);
            if (path) outgoing.push_back(*path);
        }
        if (outgoing.size() == 1) {
            const auto& chain = outgoing[0];
            for (size_t i = 1; i < chain.size(); ++i) {
                record(false, chain[0], chain[i], chain[0]);
                g.contract_with_label(chain[0], chain[i], chain[0]);
            }
            record(false, target, chain[0], target);
            g.contract_with_label(target, chain[0], target);
            for (int c : chain) absorbed.push_back(c);
        } else {
            for (const auto& chain : outgoing)
                variants.push_back("outgoing chain " +
                                   Sdg::format_members({chain.begin(), chain.end()}) +
                                   " not merged: " + std::to_string(outgoing.size()) +
                                   " outgoing chains");
        }

        if (!absorbed.empty()) emit({TraceEvent::Phase::Chain, target, absorbed, pass_root});
    }

private:
    std::vector<int> metrics_walk_incoming(int u, int region) const {
        return detail::walk_incoming_chain(g, u, region);
    }

    void record(bool control, int u, int v, int kept) {
        contractions.push_back(
            {control, u, v, g.control_region(u), g.control_region(v), kept});
    }

    void emit(TraceEvent ev) {
        if (pass_trace) pass_trace->push_back(ev.describe());
        events.push_back(ev);
        if (observer) observer(events.back(), g);
    }
};

} // namespace detail

// Parameters are the variables flowing in over boundary data edges, the
// return variables flow out; both read from the original graph and IR.
inline std::pair<std::vector<std::string>, std::vector<std::string>>
infer_signature(const Sdg& original, const IrProgram& ir, const std::set<int>& members) {
    std::set<std::string> params, returns;
    for (const auto& [u, w] : original.data_edges) {
        bool u_in = members.count(u), w_in = members.count(w);
        if (u_in == w_in) continue;
        for (const auto& var : ir.used_at(w)) {
            auto def = ir.last_defined(var, w);
            if (def && *def == u) {
                if (w_in)
                    params.insert(var);
                else
                    returns.insert(var);
            }
        }
    }
    return {{params.begin(), params.end()}, {returns.begin(), returns.end()}};
}

// Ascending score, bigger segments first among equals, then earlier span.
inline void rank(std::vector<Emo>& emos) {
    std::stable_sort(emos.begin(), emos.end(), [](const Emo& a, const Emo& b) {
        if (a.score != b.score) return a.score < b.score;
        if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
        return a.ir_span.first < b.ir_span.first;
    });
}

struct CecResult {
    Sdg graph;
    std::vector<Emo> emos;
    std::vector<TraceEvent> events;
    std::vector<ContractionRecord> contractions;
};

inline CecResult cec(const Sdg& g, const SegmentationConfig& cfg, TraceObserver obs = {}) {
    detail::Engine engine(g, cfg, std::move(obs));
    engine.run();
    return {std::move(engine.g), std::move(engine.emos), std::move(engine.events),
            std::move(engine.contractions)};
}

inline Sdg ccb(const Sdg& g, int v) {
    detail::Engine engine(g, SegmentationConfig{}, {});
    engine.ccb_in_place(v);
    return std::move(engine.g);
}

inline Sdg esc(const Sdg& g, int target) {
    detail::Engine engine(g, SegmentationConfig{}, {});
    engine.esc_in_place(target);
    return std::move(engine.g);
}

inline Sdg sddc(const Sdg& g, int target) {
    detail::Engine engine(g, SegmentationConfig{}, {});
    std::vector<std::string> variants;
    engine.sddc_in_place(target, variants);
    return std::move(engine.g);
}

// Resolve the seg id for an already contracted block vertex v: climb merged
// ancestors, contracting each, pruning them from the worklist. Returns the
// outermost vertex of the merged segment.
inline int gsi(Sdg& g, int v, std::vector<int>& worklist, const SegmentationConfig& cfg) {
    detail::Engine engine(g, cfg, {});
    std::vector<std::string> variants;
    int out = engine.climb(v, worklist, variants);
    g = std::move(engine.g);
    return out;
}

inline SegmentationResult segment(const IrProgram& ir, const SegmentationConfig& cfg,
                                  TraceObserver obs = {}) {
    Sdg g0 = build_sdg(ir);
    auto res = cec(g0, cfg, std::move(obs));
    SegmentationResult out;
    out.segment_graph = std::move(res.graph);
    out.events = std::move(res.events);
    out.contractions = std::move(res.contractions);
    for (auto& e : res.emos) {
        e.ir_span = {*e.members.begin(), *e.members.rbegin()};
        auto [params, returns] = infer_signature(g0, ir, e.members);
        e.params = std::move(params);
        e.returns = std::move(returns);
        out.emos.push_back(std::move(e));
    }
    rank(out.emos);
    return out;
}

} // namespace seg
