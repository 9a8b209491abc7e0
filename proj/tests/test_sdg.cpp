#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "fixtures.hpp"
#include "segmentation/sdg.hpp"

using namespace seg;

namespace {

const std::set<Edge> kFibData = {
    {1, 3},  {2, 4},  {1, 8},  {7, 8},  {2, 9},  {6, 9},   {6, 10},  {9, 11},  {7, 12},
    {11, 13}, {11, 15}, {14, 15}, {11, 16}, {14, 16}, {14, 18}, {11, 19}, {18, 19}};

const std::set<Edge> kFibControl = {
    {3, 4},  {3, 5},  {5, 6},  {5, 7},  {5, 8},  {8, 9},  {8, 10}, {8, 11},
    {8, 12}, {15, 16}, {15, 18}, {16, 17}, {19, 20}, {19, 21}, {21, 22}};

} // namespace

TEST_CASE("build maps every statement to one vertex with edges per the rules") {
    auto g = build_sdg(fixtures::fib());
    REQUIRE(g.vertices.size() == 23);
    CHECK(g.data_edges == kFibData);
    CHECK(g.control_edges == kFibControl);
    CHECK(g.data_edges.count({1, 3}) == 1);
    CHECK(g.data_edges.count({1, 8}) == 1);
    CHECK(g.data_edges.count({11, 13}) == 1);
}

TEST_CASE("vertex kinds follow the statement kinds") {
    auto g = build_sdg(fixtures::fib());
    for (int v : {3, 8, 15, 16, 19}) CHECK(g.vertex(v).kind == VertexKind::Primary);
    for (int v : {5, 17, 21}) CHECK(g.vertex(v).kind == VertexKind::Secondary);
    for (int v : {0, 1, 2, 9, 13}) CHECK(g.vertex(v).kind == VertexKind::Plain);
}

TEST_CASE("build rejects invalid programs and trivial ones work") {
    CHECK_THROWS_AS(build_sdg(parse_ir_lines("if x 5\n")), std::invalid_argument);
    auto g = build_sdg(parse_ir("invar\n"));
    REQUIRE(g.vertices.size() == 1);
    CHECK(g.vertex(0).kind == VertexKind::Plain);
    CHECK(g.data_edges.empty());
    CHECK(g.control_edges.empty());
}

TEST_CASE("self reads draw their edge from the prior definition") {
    auto g = build_sdg(fixtures::sum());
    CHECK(g.data_edges ==
          std::set<Edge>{{1, 2}, {0, 4}, {3, 4}, {1, 5}, {4, 6}});
    for (const auto& [u, v] : g.data_edges) CHECK(u != v);
}

TEST_CASE("data edges match the brute-force rescan on random programs") {
    for (unsigned seed = 200; seed < 240; ++seed) {
        fixtures::IrGenerator gen(seed);
        auto p = gen.generate(25);
        auto g = build_sdg(p);
        CHECK(g.data_edges == fixtures::data_edge_oracle(p));
        for (const auto& [u, v] : g.data_edges) CHECK(u < v);
        for (const auto& [u, v] : g.control_edges) CHECK(u < v);
        CHECK(static_cast<int>(g.vertices.size()) == p.size());
    }
}

TEST_CASE("source vertices have data flowing out but not in") {
    auto g = build_sdg(fixtures::fib());
    CHECK(g.is_source_vertex(1));
    CHECK_FALSE(g.is_source_vertex(0));
    auto r = build_sdg(fixtures::regions());
    CHECK(r.is_source_vertex(1));
    CHECK(r.is_source_vertex(3));
}

TEST_CASE("control regions name the direct parent") {
    auto r = build_sdg(fixtures::regions());
    CHECK(r.control_region(3) == 2);
    CHECK(r.control_region(4) == 2);
    CHECK(r.control_region(0) == -1);
    CHECK(r.control_region(1) == -1);
    CHECK(r.control_region(2) == -1);
    auto g = build_sdg(fixtures::fib());
    for (int v : {9, 10, 11, 12}) CHECK(g.control_region(v) == 8);
    auto iso = build_sdg(parse_ir("invar\n"));
    CHECK(iso.control_region(0) == -1);
}

TEST_CASE("control depth counts control edges along a path") {
    auto g = build_sdg(fixtures::fib());
    CHECK(g.control_depth(1, 6) == 2);
    CHECK(g.control_depth(1, 7) == 2);
    CHECK(g.control_depth(3, 3) == 0);
    CHECK_FALSE(g.control_depth(13, 1).has_value());
}

TEST_CASE("primary control vertices are listed in ascending order") {
    CHECK(build_sdg(fixtures::fib()).primary_control_vertices() ==
          std::vector<int>{3, 8, 15, 16, 19});
    CHECK(build_sdg(fixtures::nested()).primary_control_vertices() ==
          std::vector<int>{1, 3, 9});
    CHECK(build_sdg(parse_ir("assign a\n")).primary_control_vertices().empty());
}

TEST_CASE("chains are maximal single-pred single-succ runs") {
    auto g = fixtures::diamond();
    auto chains = find_chains(g);
    REQUIRE(chains.size() == 3);
    CHECK(chains[0].path == std::vector<int>{2, 3});
    CHECK(chains[1].path == std::vector<int>{4, 5});
    CHECK(chains[2].path == std::vector<int>{6, 7});
    // 0->2->3 fails at 2 (two predecessors), 3->4->5 fails at 3 (two
    // successors).
    for (const auto& c : chains) {
        for (size_t i = 1; i + 1 < c.path.size(); ++i) {
            CHECK(g.data_in_degree(c.path[i]) == 1);
            CHECK(g.data_out_degree(c.path[i]) == 1);
        }
    }
    auto fib_chains = find_chains(build_sdg(fixtures::fib()));
    REQUIRE(fib_chains.size() == 1);
    CHECK(fib_chains[0].path == std::vector<int>{9, 11});
    CHECK(find_chains(Sdg{}).empty());
}

TEST_CASE("chains attach to a vertex through their endpoints") {
    auto g = fixtures::diamond();
    auto into = chains_into(g, 3); // none: tail 3 belongs to chain {2,3}
    // chain {2,3} ends at 3 whose successors are 4 and 6, so nothing attaches
    CHECK(into.empty());
    Sdg h;
    for (int i = 0; i < 5; ++i) h.add_vertex(i, VertexKind::Plain);
    h.add_data_edge(0, 1); // 0 fans out, so the chain proper is {1,2}
    h.add_data_edge(0, 4);
    h.add_data_edge(1, 2);
    h.add_data_edge(2, 3); // 3 joins two flows, ending the chain at 2
    h.add_data_edge(4, 3);
    auto c_into = chains_into(h, 3);
    REQUIRE(c_into.size() == 1);
    CHECK(c_into[0].path == std::vector<int>{1, 2});
    auto c_from = chain_from(h, 0);
    REQUIRE(c_from.size() == 1);
    CHECK(c_from[0].path == std::vector<int>{1, 2});
}

TEST_CASE("contraction follows the seg-id rules") {
    auto g = build_sdg(fixtures::fib());
    SECTION("control edge keeps the parent") {
        g.contract_edge(3, 4);
        CHECK(g.has_vertex(3));
        CHECK_FALSE(g.has_vertex(4));
        CHECK(g.vertex(3).members == std::set<int>{3, 4});
    }
    SECTION("a source merges into its receiver") {
        g.contract_edge(1, 3);
        CHECK_FALSE(g.has_vertex(1));
        CHECK(g.vertex(3).members == std::set<int>{1, 3});
    }
    SECTION("a chain edge keeps its head") {
        auto d = fixtures::diamond();
        d.contract_edge(2, 3);
        CHECK(d.has_vertex(2));
        CHECK_FALSE(d.has_vertex(3));
    }
    SECTION("otherwise the receiver survives") {
        auto d = fixtures::diamond();
        d.contract_edge(3, 4); // 3 has two successors and is no source
        CHECK(d.has_vertex(4));
        CHECK_FALSE(d.has_vertex(3));
    }
    SECTION("missing edges are rejected") {
        CHECK_THROWS_AS(g.contract_edge(0, 9), std::invalid_argument);
    }
}

TEST_CASE("contraction preserves the member partition") {
    for (unsigned seed = 300; seed < 320; ++seed) {
        fixtures::IrGenerator gen(seed);
        auto p = gen.generate(20);
        auto g = build_sdg(p);
        std::mt19937 rng(seed);
        while (g.vertices.size() > 1) {
            std::vector<Edge> all(g.control_edges.begin(), g.control_edges.end());
            all.insert(all.end(), g.data_edges.begin(), g.data_edges.end());
            if (all.empty()) break;
            auto e = all[rng() % all.size()];
            size_t before = g.vertices.size();
            g.contract_edge(e.first, e.second);
            REQUIRE(g.vertices.size() == before - 1);
            REQUIRE(fixtures::partition_ok(g, p.size()));
            for (const auto& [a, b] : g.data_edges) REQUIRE(a != b);
            for (const auto& [a, b] : g.control_edges) REQUIRE(a != b);
        }
    }
}

TEST_CASE("control independence requires primary entries and no exits") {
    auto g = build_sdg(fixtures::fib());
    CHECK_FALSE(is_control_independent(g, {21, 22}));
    CHECK(is_control_independent(g, {8, 9, 10, 11, 12}));
    std::set<int> whole;
    for (int i = 0; i < 23; ++i) whole.insert(i);
    CHECK(is_control_independent(g, whole));
}

TEST_CASE("data independence requires region changes at the boundary") {
    // The block subgraph taken on its own has no boundary edges at all.
    Sdg h;
    h.add_vertex(8, VertexKind::Primary);
    for (int v : {9, 10, 11, 12, 13}) h.add_vertex(v, VertexKind::Plain);
    for (int v : {9, 10, 11, 12}) h.add_control_edge(8, v);
    h.add_data_edge(9, 11);
    h.add_data_edge(11, 13);
    CHECK(is_data_independent(h, {8, 9, 10, 11, 12, 13}));

    auto r = build_sdg(fixtures::regions());
    CHECK_FALSE(is_data_independent(r, {4})); // (3,4) stays inside region 2
    CHECK(is_data_independent(r, {0, 1, 2, 3, 4}));
}

TEST_CASE("dot output is deterministic and labeled") {
    auto g = build_sdg(fixtures::fib());
    auto dot = g.to_dot();
    CHECK(dot.find("1 -> 8 [label=\"D\"]") != std::string::npos);
    CHECK(dot.find("3 -> 4 [label=\"C\", style=dashed]") != std::string::npos);
    CHECK(dot == build_sdg(fixtures::fib()).to_dot());
    auto tiny = build_sdg(parse_ir("invar\n")).to_dot();
    CHECK(tiny == "digraph sdg {\n  0 [label=\"0\"];\n}\n");
}

TEST_CASE("merged vertices display their member ranges") {
    auto g = build_sdg(fixtures::fib());
    g.contract_edge(3, 4);
    g.contract_edge(3, 5);
    CHECK(g.to_dot().find("3 [label=\"3 [3-5]\"]") != std::string::npos);
    CHECK(Sdg::format_members({4, 9, 10, 11, 12, 13, 14, 15, 16}) == "4,9-16");
    auto dump = g.dump();
    CHECK(dump.find("v 3 primary members=3-5") != std::string::npos);
    CHECK(dump == g.dump());
}
