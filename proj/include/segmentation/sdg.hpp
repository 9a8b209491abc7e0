#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "segmentation/ir.hpp"

namespace seg {

enum class VertexKind { Primary, Secondary, Plain };

inline VertexKind vertex_kind_for(IrKind k) {
    switch (k) {
        case IrKind::If:
        case IrKind::Loop:
        case IrKind::DoCase:
            return VertexKind::Primary;
        case IrKind::ElseIf:
        case IrKind::Else:
        case IrKind::Case:
        case IrKind::Break:
        case IrKind::Continue:
            return VertexKind::Secondary;
        default:
            return VertexKind::Plain;
    }
}

using Edge = std::pair<int, int>;

// A maximal data-edge path whose interior vertices have data in/out degree
// exactly one. The head may have any number of predecessors and the tail any
// number of successors; chains never cross control-region borders and only
// run through plain vertices.
struct Chain {
    std::vector<int> path;
    int head() const { return path.front(); }
    int tail() const { return path.back(); }
    int length() const { return static_cast<int>(path.size()) - 1; }
    bool operator==(const Chain& o) const { return path == o.path; }
    bool operator<(const Chain& o) const { return path < o.path; }
};

class Sdg {
public:
    struct Vertex {
        int label = 0;
        VertexKind kind = VertexKind::Plain;
        std::set<int> members;
    };

    std::map<int, Vertex> vertices;
    std::set<Edge> control_edges;
    std::set<Edge> data_edges;

    bool has_vertex(int v) const { return vertices.count(v) != 0; }

    const Vertex& vertex(int v) const {
        auto it = vertices.find(v);
        if (it == vertices.end())
            throw std::out_of_range("no vertex " + std::to_string(v));
        return it->second;
    }

    void add_vertex(int id, VertexKind kind) {
        Vertex v;
        v.label = id;
        v.kind = kind;
        v.members = {id};
        vertices[id] = std::move(v);
    }

    void add_control_edge(int u, int v) { control_edges.insert({u, v}); }
    void add_data_edge(int u, int v) { data_edges.insert({u, v}); }

    std::set<int> data_succs(int u) const {
        std::set<int> out;
        for (const auto& [a, b] : data_edges)
            if (a == u) out.insert(b);
        return out;
    }

    std::set<int> data_preds(int v) const {
        std::set<int> out;
        for (const auto& [a, b] : data_edges)
            if (b == v) out.insert(a);
        return out;
    }

    std::set<int> control_succs(int u) const {
        std::set<int> out;
        for (const auto& [a, b] : control_edges)
            if (a == u) out.insert(b);
        return out;
    }

    std::optional<int> control_parent(int v) const {
        for (const auto& [a, b] : control_edges)
            if (b == v) return a;
        return std::nullopt;
    }

    // Vertex-id of the control parent, -1 at the outermost level.
    int control_region(int v) const {
        auto p = control_parent(v);
        return p ? *p : -1;
    }

    int data_out_degree(int u) const { return static_cast<int>(data_succs(u).size()); }
    int data_in_degree(int v) const { return static_cast<int>(data_preds(v).size()); }

    // No incoming data edges and at least one outgoing data edge: an input
    // statement or a constant initialization.
    bool is_source_vertex(int v) const {
        return data_in_degree(v) == 0 && data_out_degree(v) > 0;
    }

    std::vector<int> primary_control_vertices() const {
        std::vector<int> out;
        for (const auto& [id, v] : vertices)
            if (v.kind == VertexKind::Primary) out.push_back(id);
        return out;
    }

    // Root plus everything reachable through control edges.
    std::set<int> block_members(int root) const {
        std::set<int> seen{root};
        std::deque<int> work{root};
        while (!work.empty()) {
            int u = work.front();
            work.pop_front();
            for (int w : control_succs(u))
                if (seen.insert(w).second) work.push_back(w);
        }
        return seen;
    }

    // Minimum number of control edges over all u->v paths (both edge kinds
    // are traversable); nullopt when v is unreachable from u.
    std::optional<int> control_depth(int u, int v) const {
        vertex(u);
        vertex(v);
        std::map<int, int> dist;
        std::deque<int> work;
        dist[u] = 0;
        work.push_back(u);
        while (!work.empty()) {
            int x = work.front();
            work.pop_front();
            int d = dist[x];
            for (int w : data_succs(x)) {
                auto it = dist.find(w);
                if (it == dist.end() || it->second > d) {
                    dist[w] = d;
                    work.push_front(w);
                }
            }
            for (int w : control_succs(x)) {
                auto it = dist.find(w);
                if (it == dist.end() || it->second > d + 1) {
                    dist[w] = d + 1;
                    work.push_back(w);
                }
            }
        }
        auto it = dist.find(v);
        if (it == dist.end()) return std::nullopt;
        return it->second;
    }

    // Seg-id rule for contracting (u, v): u survives for a control edge, v
    // survives when u is a source, u survives on a chain edge, v otherwise.
    int seg_id_for(int u, int v) const {
        if (control_edges.count({u, v})) return u;
        if (is_source_vertex(u)) return v;
        if (edge_on_chain(u, v)) return u;
        return v;
    }

    bool edge_on_chain(int u, int v) const {
        if (!data_edges.count({u, v})) return false;
        if (vertex(u).kind != VertexKind::Plain || vertex(v).kind != VertexKind::Plain)
            return false;
        if (control_region(u) != control_region(v)) return false;
        return data_out_degree(u) == 1 && data_in_degree(v) == 1;
    }

    // Merge the endpoints of an existing edge into one vertex labeled by the
    // seg id. Incident edges re-target the surviving vertex; duplicates
    // collapse and self-edges are dropped.
    void contract_edge(int u, int v) {
        if (!control_edges.count({u, v}) && !data_edges.count({u, v}))
            throw std::invalid_argument("no edge (" + std::to_string(u) + "," +
                                        std::to_string(v) + ")");
        int keep = seg_id_for(u, v);
        contract_with_label(u, v, keep);
    }

    void contract_with_label(int u, int v, int keep) {
        int drop = keep == u ? v : u;
        auto keep_it = vertices.find(keep);
        auto drop_it = vertices.find(drop);
        if (keep_it == vertices.end() || drop_it == vertices.end())
            throw std::out_of_range("contracting a missing vertex");
        keep_it->second.members.insert(drop_it->second.members.begin(),
                                       drop_it->second.members.end());
        vertices.erase(drop_it);
        retarget(control_edges, drop, keep);
        retarget(data_edges, drop, keep);
    }

    std::string to_dot() const {
        std::ostringstream out;
        out << "digraph sdg {\n";
        for (const auto& [id, v] : vertices)
            out << "  " << id << " [label=\"" << vertex_label(v) << "\"];\n";
        for (const auto& [a, b] : control_edges)
            out << "  " << a << " -> " << b << " [label=\"C\", style=dashed];\n";
        for (const auto& [a, b] : data_edges)
            out << "  " << a << " -> " << b << " [label=\"D\"];\n";
        out << "}\n";
        return out.str();
    }

    // Line-ordered listing for diffing: vertices then edges.
    std::string dump() const {
        std::ostringstream out;
        for (const auto& [id, v] : vertices) {
            out << "v " << id << ' ';
            switch (v.kind) {
                case VertexKind::Primary: out << "primary"; break;
                case VertexKind::Secondary: out << "secondary"; break;
                case VertexKind::Plain: out << "plain"; break;
            }
            out << " members=" << format_members(v.members) << '\n';
        }
        for (const auto& [a, b] : control_edges) out << "e " << a << ' ' << b << " C\n";
        for (const auto& [a, b] : data_edges) out << "e " << a << ' ' << b << " D\n";
        return out.str();
    }

    static std::string format_members(const std::set<int>& members) {
        std::ostringstream out;
        auto it = members.begin();
        bool first = true;
        while (it != members.end()) {
            int lo = *it, hi = *it;
            auto next = std::next(it);
            while (next != members.end() && *next == hi + 1) {
                hi = *next;
                ++next;
            }
            if (!first) out << ',';
            first = false;
            if (lo == hi)
                out << lo;
            else
                out << lo << '-' << hi;
            it = next;
        }
        return out.str();
    }

private:
    static std::string vertex_label(const Vertex& v) {
        std::string label = std::to_string(v.label);
        if (v.members.size() > 1) label += " [" + format_members(v.members) + "]";
        return label;
    }

    static void retarget(std::set<Edge>& edges, int drop, int keep) {
        std::set<Edge> next;
        for (const auto& [a, b] : edges) {
            int x = a == drop ? keep : a;
            int y = b == drop ? keep : b;
            if (x != y) next.insert({x, y});
        }
        edges = std::move(next);
    }
};

// Mapping rules: one vertex per statement; a data edge from the last prior
// definition of each used variable; a control edge from the direct control
// parent. A statement never depends on itself: last_defined looks strictly
// before the use, so self-reads like "assign i i" draw their edge from the
// previous definition.
inline Sdg build_sdg(const IrProgram& p) {
    auto diags = validate(p);
    if (!diags.empty())
        throw std::invalid_argument("invalid program: " + diags[0].rule + " at statement " +
                                    std::to_string(diags[0].index));
    Sdg g;
    const int n = p.size();
    for (int i = 0; i < n; ++i) g.add_vertex(i, vertex_kind_for(p.at(i).kind));
    for (int v = 0; v < n; ++v) {
        for (const auto& var : p.used_at(v)) {
            auto def = p.last_defined(var, v);
            if (def) g.add_data_edge(*def, v);
        }
    }
    for (int pid = 0; pid < n; ++pid) {
        if (!p.is_control_block(pid)) continue;
        for (int cid : p.direct_children(pid)) g.add_control_edge(pid, cid);
    }
    return g;
}

inline std::vector<Chain> find_chains(const Sdg& g) {
    std::set<Edge> chain_edges;
    for (const auto& [u, v] : g.data_edges)
        if (g.edge_on_chain(u, v)) chain_edges.insert({u, v});
    std::map<int, int> succ, pred;
    for (const auto& [u, v] : chain_edges) {
        succ[u] = v;
        pred[v] = u;
    }
    std::vector<Chain> out;
    for (const auto& [u, v] : chain_edges) {
        if (pred.count(u)) continue; // not a head
        Chain c;
        c.path.push_back(u);
        int cur = u;
        while (succ.count(cur)) {
            cur = succ[cur];
            c.path.push_back(cur);
        }
        out.push_back(std::move(c));
    }
    return out;
}

// Chains whose tail feeds exactly v.
inline std::vector<Chain> chains_into(const Sdg& g, int v) {
    std::vector<Chain> out;
    for (auto& c : find_chains(g)) {
        auto succs = g.data_succs(c.tail());
        if (succs.size() == 1 && *succs.begin() == v) out.push_back(c);
    }
    return out;
}

// Chains whose head is fed exactly by v.
inline std::vector<Chain> chain_from(const Sdg& g, int v) {
    std::vector<Chain> out;
    for (auto& c : find_chains(g)) {
        auto preds = g.data_preds(c.head());
        if (preds.size() == 1 && *preds.begin() == v) out.push_back(c);
    }
    return out;
}

// A subgraph is control independent when no control edge escapes it and
// every control edge entering it targets a primary control vertex.
inline bool is_control_independent(const Sdg& g, const std::set<int>& s) {
    for (const auto& [u, v] : g.control_edges) {
        bool u_in = s.count(u), v_in = s.count(v);
        if (u_in && !v_in) return false;
        if (!u_in && v_in && g.vertex(v).kind != VertexKind::Primary) return false;
    }
    return true;
}

// A subgraph is data independent when every data edge crossing its boundary
// joins vertices in different control regions.
inline bool is_data_independent(const Sdg& g, const std::set<int>& s) {
    for (const auto& [u, v] : g.data_edges) {
        bool u_in = s.count(u), v_in = s.count(v);
        if (u_in == v_in) continue;
        if (g.control_region(u) == g.control_region(v)) return false;
    }
    return true;
}

} // namespace seg
