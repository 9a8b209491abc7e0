#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "segmentation/engine.hpp"
#include "segmentation/ir.hpp"
#include "segmentation/sdg.hpp"

namespace fixtures {

// Fibonacci-prime walkthrough program, 23 statements.
inline const char* kFibIr = R"(invar
input n
assign a
if n 2
output a
else 3
assign b
assign i
loop i n 4
assign t a b
assign a b
assign b t
assign i i
output b
assign i
loop i b 2
if b i 1
break
assign i i
if b i 2
invar
else 1
invar
)";

// Three nested control blocks (outer loop 1, middle if 3, inner loop 9) with
// two long incoming chains, an exclusive source, and one outgoing chain.
inline const char* kNestedIr = R"(input m
loop m 2
input x
if x 10
assign w
assign p x
assign q p
assign r x
assign s r
loop z 5
assign c q
assign d s
assign e c d
assign f e
output w
assign g f
output g
assign h x
output h
)";

// Accumulation loop: relay feeding an output sink past the block.
inline const char* kSumIr = R"(assign sum
assign i
loop i 3
input a
assign sum sum a
assign i i
output sum
)";

// Control-region demo: a source outside the if-block may not merge into a
// consumer inside it.
inline const char* kRegionsIr = R"(assign n2
input n1
if n2 2
input n2
output n1 n2
)";

inline seg::IrProgram fib() { return seg::parse_ir(kFibIr); }
inline seg::IrProgram nested() { return seg::parse_ir(kNestedIr); }
inline seg::IrProgram sum() { return seg::parse_ir(kSumIr); }
inline seg::IrProgram regions() { return seg::parse_ir(kRegionsIr); }

// Diamond with two forward branches: 0 and 1 feed 2, 2 feeds 3, 3 fans out
// into 4->5 and 6->7.
inline seg::Sdg diamond() {
    seg::Sdg g;
    for (int i = 0; i <= 7; ++i) g.add_vertex(i, seg::VertexKind::Plain);
    g.add_data_edge(0, 2);
    g.add_data_edge(1, 2);
    g.add_data_edge(2, 3);
    g.add_data_edge(3, 4);
    g.add_data_edge(4, 5);
    g.add_data_edge(3, 6);
    g.add_data_edge(6, 7);
    return g;
}

// Brute-force data-edge oracle: rescan the last definition of every used
// variable, independently of build_sdg.
inline std::set<seg::Edge> data_edge_oracle(const seg::IrProgram& p) {
    std::set<seg::Edge> edges;
    for (int v = 0; v < p.size(); ++v) {
        for (const auto& var : p.used_at(v)) {
            for (int j = v - 1; j >= 0; --j) {
                if (p.defined_at(j).count(var)) {
                    edges.insert({j, v});
                    break;
                }
            }
        }
    }
    return edges;
}

// Brute-force relay-share oracle: transitive closure over data edges whose
// interior stays in the block, restricted to the producer set.
inline std::set<int> relay_share_oracle(const seg::Sdg& g, const std::set<int>& members,
                                        const std::set<int>& producers, int relay) {
    std::set<int> share;
    for (int p : producers) {
        if (p == relay) continue;
        std::set<int> frontier{p}, visited{p};
        bool reached = false;
        while (!frontier.empty() && !reached) {
            std::set<int> next;
            for (int x : frontier) {
                for (int w : g.data_succs(x)) {
                    if (w == relay) reached = true;
                    if (!members.count(w) || visited.count(w)) continue;
                    visited.insert(w);
                    next.insert(w);
                }
            }
            frontier = next;
        }
        if (reached) share.insert(p);
    }
    return share;
}

inline bool partition_ok(const seg::Sdg& g, int statement_count) {
    std::set<int> all;
    size_t total = 0;
    for (const auto& [id, v] : g.vertices) {
        all.insert(v.members.begin(), v.members.end());
        total += v.members.size();
    }
    if (total != all.size()) return false; // overlap
    if (static_cast<int>(all.size()) != statement_count) return false;
    return *all.begin() == 0 && *all.rbegin() == statement_count - 1;
}

// Control independence relaxed for merged segments: entering control edges
// must target primary members or plain members, and all entry targets must
// hang off one parent vertex (the call site's region). Secondary members fed
// from outside would detach an else/case from its primary partner.
inline bool segment_control_ok(const seg::Sdg& g, const std::set<int>& s) {
    std::set<int> parents;
    for (const auto& [u, v] : g.control_edges) {
        bool u_in = s.count(u), v_in = s.count(v);
        if (u_in && !v_in) return false;
        if (!u_in && v_in) {
            if (g.vertex(v).kind == seg::VertexKind::Secondary) return false;
            parents.insert(u);
        }
    }
    return parents.size() <= 1;
}

// Data independence relaxed for merged segments: boundary data edges must
// cross control regions, except flows at the segment's own call-site region,
// which become parameters or return values.
inline bool segment_data_ok(const seg::Sdg& g, const std::set<int>& s) {
    int base = -1;
    bool base_set = false;
    for (int m : s) {
        int r = g.control_region(m);
        if (s.count(r)) continue; // parent inside the segment
        if (!base_set || r < base) base = r;
        base_set = true;
    }
    for (const auto& [u, v] : g.data_edges) {
        bool u_in = s.count(u), v_in = s.count(v);
        if (u_in == v_in) continue;
        int ru = g.control_region(u), rv = g.control_region(v);
        if (ru != rv) continue;
        if (!(base_set && ru == base && rv == base)) return false;
    }
    return true;
}

// Deterministic random IR programs with well-formed nesting.
class IrGenerator {
public:
    explicit IrGenerator(unsigned seed) : rng_(seed) {}

    seg::IrProgram generate(int max_statements) {
        program_ = seg::IrProgram{};
        budget_ = max_statements;
        emit_level(0);
        if (program_.statements.empty()) {
            seg::IrStatement s;
            s.kind = seg::IrKind::Invar;
            program_.statements.push_back(s);
        }
        return program_;
    }

private:
    std::mt19937 rng_;
    seg::IrProgram program_;
    int budget_ = 0;

    int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }

    std::string var() {
        static const char* names[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
        return names[pick(8)];
    }

    int emit(seg::IrStatement s) {
        program_.statements.push_back(std::move(s));
        --budget_;
        return program_.size() - 1;
    }

    void patch(int idx, int len) {
        program_.statements[static_cast<size_t>(idx)].block_length = len;
    }

    // Emits a run of statements at one nesting level, returns the count.
    int emit_level(int depth) {
        int count = 0;
        int quota = 1 + pick(4);
        while (quota-- > 0 && budget_ > 0) {
            int roll = depth >= 3 || budget_ < 4 ? pick(60) : pick(100);
            seg::IrStatement s;
            if (roll < 35) {
                s.kind = seg::IrKind::Assign;
                s.defined = {var()};
                int uses = pick(3);
                for (int i = 0; i < uses; ++i) s.used.push_back(var());
                emit(std::move(s));
            } else if (roll < 45) {
                s.kind = seg::IrKind::Input;
                s.defined = {var()};
                if (pick(8) == 0) s.defined.push_back(var());
                emit(std::move(s));
            } else if (roll < 53) {
                s.kind = seg::IrKind::Output;
                s.used = {var()};
                if (pick(4) == 0) s.used.push_back(var());
                emit(std::move(s));
            } else if (roll < 56) {
                s.kind = seg::IrKind::Invar;
                emit(std::move(s));
            } else if (roll < 58) {
                s.kind = pick(2) ? seg::IrKind::Break : seg::IrKind::Continue;
                emit(std::move(s));
            } else if (roll < 60) {
                continue; // breather keeps sizes uneven
            } else if (roll < 78) {
                s.kind = seg::IrKind::If;
                s.used = {var()};
                if (pick(3) == 0) s.used.push_back(var());
                s.block_length = 0;
                int idx = emit(std::move(s));
                int kids = emit_level(depth + 1);
                if (pick(3) == 0 && budget_ > 1) {
                    seg::IrStatement e;
                    e.kind = seg::IrKind::Else;
                    e.block_length = 0;
                    int eidx = emit(std::move(e));
                    patch(eidx, emit_level(depth + 1));
                    ++kids;
                }
                patch(idx, kids);
            } else if (roll < 90) {
                s.kind = seg::IrKind::Loop;
                s.used = {var()};
                if (pick(2)) s.used.push_back(var());
                s.block_length = 0;
                int idx = emit(std::move(s));
                patch(idx, emit_level(depth + 1));
            } else {
                s.kind = seg::IrKind::DoCase;
                s.used = {var()};
                s.block_length = 0;
                int didx = emit(std::move(s));
                int cases = 1 + pick(2);
                int prev = -1, prev_count = 0;
                for (int c = 0; c < cases && budget_ > 0; ++c) {
                    seg::IrStatement cs;
                    cs.kind = seg::IrKind::Case;
                    cs.block_length = 0;
                    int cidx = emit(std::move(cs));
                    if (prev < 0)
                        patch(didx, 1);
                    else
                        patch(prev, prev_count + 1);
                    prev = cidx;
                    prev_count = emit_level(depth + 1);
                }
                if (prev >= 0) patch(prev, prev_count);
            }
            ++count;
        }
        return count;
    }
};

} // namespace fixtures
