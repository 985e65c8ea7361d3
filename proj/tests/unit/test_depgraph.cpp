#include <doctest.h>

#include "maintcast/depgraph.hpp"
#include "maintcast/error.hpp"
#include "maintcast/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

using namespace maintcast;

namespace {

DependencySnapshot snapshot_of(std::vector<std::pair<std::string, std::string>> edges) {
    DependencySnapshot s;
    s.edges = std::move(edges);
    return s;
}

// Dense Google-matrix power iteration run far past convergence.
std::vector<double> dense_pagerank(const DependencyGraph& g, double d) {
    const auto n = static_cast<Eigen::Index>(g.nodes.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& outs = g.out_edges[static_cast<std::size_t>(j)];
        if (outs.empty()) {
            m.col(j).setConstant(1.0 / static_cast<double>(n));
        } else {
            for (auto i : outs) m(static_cast<Eigen::Index>(i), j) = 1.0 / static_cast<double>(outs.size());
        }
    }
    Eigen::MatrixXd google = d * m + Eigen::MatrixXd::Constant(n, n, (1.0 - d) / static_cast<double>(n));
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (int k = 0; k < 5000; ++k) p = google * p;
    return {p.data(), p.data() + n};
}

}  // namespace

TEST_CASE("build_dependency_graph") {
    auto g = build_dependency_graph(snapshot_of({{"a", "b"}}));
    CHECK(g.nodes.size() == 2);
    CHECK(g.edge_count() == 1);
    CHECK(g.out_edges[g.index_of("a")] == std::vector<std::size_t>{g.index_of("b")});

    g = build_dependency_graph(snapshot_of({{"a", "b"}, {"b", "c"}, {"a", "c"}}));
    CHECK(g.nodes.size() == 3);
    CHECK(g.edge_count() == 3);

    g = build_dependency_graph(DependencySnapshot{});
    CHECK(g.nodes.empty());
    CHECK(g.edge_count() == 0);

    g = build_dependency_graph(snapshot_of({{"a", "b"}}), true);
    CHECK(g.out_edges[g.index_of("b")] == std::vector<std::size_t>{g.index_of("a")});
    CHECK_THROWS_AS(g.index_of("zzz"), Error);
}

TEST_CASE("pagerank small graphs") {
    auto g = build_dependency_graph(snapshot_of({{"a", "b"}, {"b", "a"}}));
    CHECK(pagerank(g).converged);
    CHECK(g.pagerank[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g.pagerank[1] == doctest::Approx(0.5).epsilon(1e-12));

    g = DependencyGraph{{"x"}, {{}}, {}};
    pagerank(g);
    CHECK(g.pagerank[0] == doctest::Approx(1.0).epsilon(1e-12));

    g = build_dependency_graph(snapshot_of({{"a", "b"}, {"a", "c"}, {"b", "c"}}));
    PageRankParams p;
    p.tol = 1e-14;
    p.max_iter = 1000;
    pagerank(g, p);
    const auto oracle = dense_pagerank(g, 0.85);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(g.pagerank[i] - oracle[i]) <= 1e-10);
}

TEST_CASE("pagerank reports non-convergence instead of throwing") {
    auto g = build_dependency_graph(snapshot_of({{"a", "b"}, {"b", "c"}, {"c", "a"}, {"a", "c"}}));
    PageRankParams p;
    p.max_iter = 1;
    p.tol = 1e-300;
    const auto rep = pagerank(g, p);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations == 1);
}

TEST_CASE("select_top_fraction") {
    DependencySnapshot s;
    for (int i = 0; i < 100; ++i) {
        const auto name = "lib" + std::to_string(100 + i);
        s.library_to_repo[name] = "org/" + name;
        if (i > 0) s.edges.emplace_back(name, "lib100");
    }
    auto g = build_dependency_graph(s);
    pagerank(g);
    auto sel = select_top_fraction(g, s, 0.01);
    REQUIRE(sel.selected.size() == 1);
    CHECK(sel.selected[0].library == "lib100");
    CHECK(select_top_fraction(g, s, 1.0).selected.size() == 100);

    // symmetric pair: equal ranks, the smaller name wins the single slot
    DependencySnapshot tie = snapshot_of({{"m", "zeta"}, {"m", "alpha"}});
    tie.library_to_repo = {{"zeta", "org/z"}, {"alpha", "org/a"}, {"m", ""}};
    g = build_dependency_graph(tie);
    pagerank(g);
    CHECK(g.pagerank[g.index_of("zeta")] == g.pagerank[g.index_of("alpha")]);
    sel = select_top_fraction(g, tie, 0.5);
    REQUIRE(sel.selected.size() == 1);
    CHECK(sel.selected[0].library == "alpha");

    CHECK_THROWS_AS(select_top_fraction(g, tie, 0.0), Error);
    CHECK(format_selection_csv(sel) .rfind("rank,library,repo,pagerank\n1,alpha,org/a,", 0) == 0);
}

TEST_CASE("pagerank sums to one on random graphs") {
    Rng rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        DependencySnapshot s;
        const int n = 2 + static_cast<int>(rng.below(30));
        for (int k = 0; k < 3 * n; ++k) {
            const auto a = rng.below(static_cast<std::uint64_t>(n)), b = rng.below(static_cast<std::uint64_t>(n));
            if (a != b) s.edges.emplace_back("n" + std::to_string(a), "n" + std::to_string(b));
        }
        if (s.edges.empty()) continue;
        auto g = build_dependency_graph(s);
        pagerank(g);
        double sum = 0.0;
        for (double v : g.pagerank) {
            CHECK(v > 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("pagerank ignores input order and respects the teleport floor") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        DependencySnapshot s;
        for (int k = 0; k < 40; ++k) {
            const auto a = rng.below(15), b = rng.below(15);
            if (a != b) s.edges.emplace_back("n" + std::to_string(a), "n" + std::to_string(b));
        }
        for (int i = 0; i < 15; i += 2) s.library_to_repo["n" + std::to_string(i)] = "org/n" + std::to_string(i);
        auto shuffled = s;
        for (std::size_t i = shuffled.edges.size(); i > 1; --i) std::swap(shuffled.edges[i - 1], shuffled.edges[rng.below(i)]);

        auto g1 = build_dependency_graph(s), g2 = build_dependency_graph(shuffled);
        pagerank(g1);
        pagerank(g2);
        REQUIRE(g1.nodes == g2.nodes);
        const double floor = (1.0 - 0.85) / static_cast<double>(g1.nodes.size()) - 1e-12;
        for (std::size_t i = 0; i < g1.nodes.size(); ++i) {
            CHECK(std::abs(g1.pagerank[i] - g2.pagerank[i]) <= 1e-12);
            CHECK(g1.pagerank[i] >= floor);
        }
        std::size_t linked = 0;
        for (const auto& n : g1.nodes) linked += s.repo_of(n).has_value();
        if (linked == 0) continue;
        for (double fraction : {0.01, 0.2, 0.5, 1.0}) {
            const auto a = select_top_fraction(g1, s, fraction), b = select_top_fraction(g2, shuffled, fraction);
            CHECK(format_selection_csv(a) == format_selection_csv(b));
            CHECK(a.selected.size() ==
                  static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(linked) - 1e-9)));
        }
    }
}
