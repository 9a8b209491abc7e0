#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "segmentation/ratio.hpp"
#include "segmentation/sdg.hpp"

namespace seg {

// A chain attached to a control block, kept with its border edges so the
// census can be rendered as (vertex set, count) rows. For an incoming chain
// the vertices run toward the block and the borders leave the last vertex;
// for an outgoing chain the borders enter the first vertex.
struct AttachedChain {
    std::vector<int> vertices;
    std::vector<Edge> borders;
    bool incoming = true;

    std::vector<Edge> edge_list() const {
        std::vector<Edge> out;
        if (incoming) {
            for (size_t i = 0; i + 1 < vertices.size(); ++i)
                out.push_back({vertices[i], vertices[i + 1]});
            for (const auto& b : borders) out.push_back(b);
        } else {
            for (const auto& b : borders) out.push_back(b);
            for (size_t i = 0; i + 1 < vertices.size(); ++i)
                out.push_back({vertices[i], vertices[i + 1]});
        }
        return out;
    }
};

// Per-control-block census. Producers supply data (including exclusive
// sources one data hop outside the block), relays export results past the
// block boundary, sinks only consume.
struct BlockAnalysis {
    int root = -1;
    std::set<int> members;
    std::set<int> relays;
    std::set<int> sinks;
    std::set<int> exclusive_sources;
    std::set<int> producers;
    std::map<int, std::set<int>> relay_share;
    std::set<int> non_relay_share;
    std::vector<AttachedChain> incoming_chains;
    std::vector<AttachedChain> outgoing_chains;

    int total_relay_share() const {
        int sum = 0;
        for (const auto& [r, share] : relay_share) sum += static_cast<int>(share.size());
        return sum;
    }
};

namespace detail {

// Walk an incoming chain backward from its border vertex t. All chain
// vertices are plain, share the block root's control region, and form a
// single-pred/single-succ run.
inline std::vector<int> walk_incoming_chain(const Sdg& g, int t, int region) {
    std::vector<int> rev{t};
    int cur = t;
    for (;;) {
        auto preds = g.data_preds(cur);
        if (preds.size() != 1) break;
        int x = *preds.begin();
        if (g.data_succs(x).size() != 1) break;
        if (g.vertex(x).kind != VertexKind::Plain) break;
        if (g.control_region(x) != region) break;
        rev.push_back(x);
        cur = x;
    }
    return {rev.rbegin(), rev.rend()};
}

// Walk an outgoing chain forward from its border vertex w. Returns nullopt
// when the walk dead-ends against a join or a fan-out in the same region:
// such a path is not a sequential-dependence chain and must not be merged.
inline std::optional<std::vector<int>> walk_outgoing_chain(const Sdg& g, int w, int region) {
    std::vector<int> path{w};
    int cur = w;
    for (;;) {
        auto succs = g.data_succs(cur);
        if (succs.empty()) return path; // genuine tail
        if (succs.size() != 1) return std::nullopt;
        int x = *succs.begin();
        if (g.control_region(x) != region) return path; // truncated at the border
        if (g.vertex(x).kind != VertexKind::Plain) return std::nullopt;
        if (g.data_preds(x).size() != 1) return std::nullopt;
        path.push_back(x);
        cur = x;
    }
}

} // namespace detail

inline BlockAnalysis analyze_block(const Sdg& g, int root) {
    if (g.vertex(root).kind != VertexKind::Primary)
        throw std::invalid_argument("vertex " + std::to_string(root) +
                                    " is not a primary control vertex");
    BlockAnalysis a;
    a.root = root;
    a.members = g.block_members(root);
    const int region = g.control_region(root);

    for (int m : a.members) {
        auto succs = g.data_succs(m);
        bool exits = false;
        for (int w : succs)
            if (!a.members.count(w)) exits = true;
        if (exits) a.relays.insert(m);
        if (!succs.empty()) a.producers.insert(m);
        if (succs.empty() && g.data_in_degree(m) > 0) a.sinks.insert(m);
    }

    // Exclusive sources: sources outside the block, in the block root's
    // control region, all of whose data edges feed the block. They count as
    // producers of the block's computation.
    for (const auto& [id, v] : g.vertices) {
        if (a.members.count(id)) continue;
        if (!g.is_source_vertex(id)) continue;
        if (g.control_region(id) != region) continue;
        bool all_in = true;
        for (int w : g.data_succs(id))
            if (!a.members.count(w)) all_in = false;
        if (all_in) a.exclusive_sources.insert(id);
    }
    a.producers.insert(a.exclusive_sources.begin(), a.exclusive_sources.end());

    // RelayShare(r): producers with a data path to r through the block.
    for (int r : a.relays) {
        std::set<int> reached;
        std::deque<int> work{r};
        while (!work.empty()) {
            int x = work.front();
            work.pop_front();
            for (int u : g.data_preds(x)) {
                if (reached.count(u)) continue;
                if (!a.members.count(u) && !a.producers.count(u)) continue;
                reached.insert(u);
                if (a.members.count(u)) work.push_back(u);
            }
        }
        std::set<int> share;
        for (int u : reached)
            if (a.producers.count(u) && u != r) share.insert(u);
        a.relay_share[r] = std::move(share);
    }
    std::set<int> in_some_share;
    for (const auto& [r, share] : a.relay_share)
        in_some_share.insert(share.begin(), share.end());
    for (int u : a.producers)
        if (!in_some_share.count(u)) a.non_relay_share.insert(u);

    // Incoming chains end at a non-source border vertex all of whose data
    // edges feed the block; sources in that position are exclusive sources,
    // never chains.
    for (const auto& [id, v] : g.vertices) {
        if (a.members.count(id)) continue;
        if (v.kind != VertexKind::Plain) continue;
        if (g.control_region(id) != region) continue;
        auto succs = g.data_succs(id);
        if (succs.empty()) continue;
        bool all_in = true;
        for (int w : succs)
            if (!a.members.count(w)) all_in = false;
        if (!all_in || g.is_source_vertex(id)) continue;
        AttachedChain c;
        c.incoming = true;
        c.vertices = detail::walk_incoming_chain(g, id, region);
        for (int w : succs) c.borders.push_back({id, w});
        a.incoming_chains.push_back(std::move(c));
    }

    // Outgoing chains start at a border vertex fed only from the block.
    for (const auto& [id, v] : g.vertices) {
        if (a.members.count(id)) continue;
        if (v.kind != VertexKind::Plain) continue;
        if (g.control_region(id) != region) continue;
        auto preds = g.data_preds(id);
        if (preds.empty()) continue;
        bool all_in = true;
        for (int u : preds)
            if (!a.members.count(u)) all_in = false;
        if (!all_in) continue;
        auto path = detail::walk_outgoing_chain(g, id, region);
        if (!path) continue;
        AttachedChain c;
        c.incoming = false;
        c.vertices = *path;
        for (int u : preds) c.borders.push_back({u, id});
        a.outgoing_chains.push_back(std::move(c));
    }
    return a;
}

// LoCS = #Relay / (#TotalRelayShare + #NonRelayShare). Relay-free blocks are
// skipped unless no_relay_extract forces the numerator to one; a block with
// no producers at all is never computed.
inline std::optional<Ratio> locs(const BlockAnalysis& a, bool no_relay_extract) {
    std::int64_t numerator;
    if (a.relays.empty()) {
        if (!no_relay_extract) return std::nullopt;
        numerator = 1;
    } else {
        numerator = static_cast<std::int64_t>(a.relays.size());
    }
    std::int64_t denom = a.total_relay_share() + static_cast<std::int64_t>(a.non_relay_share.size());
    if (denom == 0) return std::nullopt;
    return Ratio(numerator, denom);
}

namespace detail {

struct ParentCounts {
    int data_nodes = 0;
    int independent = 0;
    bool has_distinct_relay = false;
};

// Census of the parent block bp around a contracted child vertex v: how many
// of its data-producing vertices exist, how many are not directly joined to
// v by a data edge, and whether any of them exports data past bp.
inline ParentCounts parent_counts(const Sdg& g, int p, int v) {
    ParentCounts c;
    auto bp = g.block_members(p);
    for (int m : bp) {
        if (m == v) continue;
        auto succs = g.data_succs(m);
        if (succs.empty()) continue;
        ++c.data_nodes;
        for (int w : succs)
            if (!bp.count(w)) c.has_distinct_relay = true;
        bool joined = succs.count(v) != 0 || g.data_preds(m).count(v) != 0;
        if (!joined) ++c.independent;
    }
    return c;
}

} // namespace detail

// PA = 1 - IndependentNodes / ParentDataNodes, for a child block already
// contracted to the single vertex v inside the parent block at p. Not
// computed when the parent has no data nodes; the merger case decides alone.
inline std::optional<Ratio> parent_affinity(const Sdg& g, int p, int v) {
    auto c = detail::parent_counts(g, p, v);
    if (c.data_nodes == 0) return std::nullopt;
    return Ratio(c.data_nodes - c.independent, c.data_nodes);
}

enum class MergerCase {
    DistinctRelayAllConnected,   // merge
    DistinctRelayPartialOrNone,  // decided by PA
    NoRelayAllConnectedOrEmpty,  // merge
    NoRelayPartialOrNone,        // decided by PA
};

enum class MergerDecision { Merge, UsePA };

inline MergerDecision merger_decision(MergerCase c) {
    return (c == MergerCase::DistinctRelayAllConnected ||
            c == MergerCase::NoRelayAllConnectedOrEmpty)
               ? MergerDecision::Merge
               : MergerDecision::UsePA;
}

inline MergerCase merger_case(const Sdg& g, int p, int v) {
    auto c = detail::parent_counts(g, p, v);
    bool all_connected = c.data_nodes > 0 && c.independent == 0;
    bool empty = c.data_nodes == 0;
    if (c.has_distinct_relay)
        return all_connected ? MergerCase::DistinctRelayAllConnected
                             : MergerCase::DistinctRelayPartialOrNone;
    return (empty || all_connected) ? MergerCase::NoRelayAllConnectedOrEmpty
                                    : MergerCase::NoRelayPartialOrNone;
}

namespace detail {

inline std::string vertex_set(const std::set<int>& s) {
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (int v : s) {
        if (!first) out << ',';
        first = false;
        out << v;
    }
    out << '}';
    return out.str();
}

inline std::string chain_edges(const AttachedChain& c) {
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (const auto& [a, b] : c.edge_list()) {
        if (!first) out << ',';
        first = false;
        out << '(' << a << ',' << b << ')';
    }
    out << '}';
    return out.str();
}

} // namespace detail

inline std::string render_block_report(const BlockAnalysis& a, std::optional<Ratio> score) {
    std::ostringstream out;
    out << "block " << a.root << '\n';
    out << "relay_nodes " << detail::vertex_set(a.relays) << ' ' << a.relays.size() << '\n';
    out << "sink_nodes " << detail::vertex_set(a.sinks) << ' ' << a.sinks.size() << '\n';
    out << "exclusive_sources " << detail::vertex_set(a.exclusive_sources) << ' '
        << a.exclusive_sources.size() << '\n';
    out << "producer_nodes " << detail::vertex_set(a.producers) << ' ' << a.producers.size()
        << '\n';
    std::set<int> all_share;
    for (const auto& [r, share] : a.relay_share)
        all_share.insert(share.begin(), share.end());
    out << "relay_share " << detail::vertex_set(all_share) << ' ' << a.total_relay_share()
        << '\n';
    out << "non_relay_share " << detail::vertex_set(a.non_relay_share) << ' '
        << a.non_relay_share.size() << '\n';
    out << "incoming_chains";
    for (const auto& c : a.incoming_chains) out << ' ' << detail::chain_edges(c);
    out << ' ' << a.incoming_chains.size() << '\n';
    out << "outgoing_chains";
    for (const auto& c : a.outgoing_chains) out << ' ' << detail::chain_edges(c);
    out << ' ' << a.outgoing_chains.size() << '\n';
    out << "locs " << (score ? score->str() : "not-computed") << '\n';
    return out.str();
}

} // namespace seg
