#include "maintcast/depgraph.hpp"

#include "maintcast/error.hpp"
#include "maintcast/textio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace maintcast {

std::size_t DependencyGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& e : out_edges) n += e.size();
    return n;
}

std::size_t DependencyGraph::index_of(const std::string& name) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), name);
    if (it == nodes.end() || *it != name) throw Error(Errc::UnknownLabel, "no library named " + name);
    return static_cast<std::size_t>(it - nodes.begin());
}

DependencyGraph build_dependency_graph(const DependencySnapshot& snapshot, bool reverse_edges) {
    DependencyGraph g;
    for (const auto& [a, b] : snapshot.edges) {
        g.nodes.push_back(a);
        g.nodes.push_back(b);
    }
    std::sort(g.nodes.begin(), g.nodes.end());
    g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end()), g.nodes.end());
    g.out_edges.resize(g.nodes.size());
    for (const auto& [a, b] : snapshot.edges) {
        if (a == b) continue;
        auto from = g.index_of(a), to = g.index_of(b);
        if (reverse_edges) std::swap(from, to);
        g.out_edges[from].push_back(to);
    }
    for (auto& e : g.out_edges) {
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
    }
    return g;
}

PageRankReport pagerank(DependencyGraph& graph, const PageRankParams& params) {
    if (!(params.damping > 0.0 && params.damping < 1.0)) throw Error(Errc::InvalidConfig, "damping must be in (0,1)");
    if (!(params.tol > 0.0)) throw Error(Errc::InvalidConfig, "tolerance must be positive");
    const std::size_t n = graph.nodes.size();
    PageRankReport report;
    graph.pagerank.assign(n, n ? 1.0 / static_cast<double>(n) : 0.0);
    if (n == 0) {
        report.converged = true;
        return report;
    }
    const double nd = static_cast<double>(n);
    const double d = params.damping;
    std::vector<double> next(n);
    auto& x = graph.pagerank;
    for (int it = 0; it < params.max_iter; ++it) {
        double dangling = 0.0;
        for (std::size_t u = 0; u < n; ++u)
            if (graph.out_edges[u].empty()) dangling += x[u];
        const double base = (1.0 - d) / nd + d * dangling / nd;
        std::fill(next.begin(), next.end(), base);
        for (std::size_t u = 0; u < n; ++u) {
            const auto& out = graph.out_edges[u];
            if (out.empty()) continue;
            const double share = d * x[u] / static_cast<double>(out.size());
            for (auto v : out) next[v] += share;
        }
        double delta = 0.0;
        for (std::size_t v = 0; v < n; ++v) delta += std::abs(next[v] - x[v]);
        x.swap(next);
        report.iterations = it + 1;
        report.last_delta = delta;
        if (delta < params.tol) {
            report.converged = true;
            break;
        }
    }
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (auto& v : x) v /= total;
    return report;
}

SelectionResult select_top_fraction(const DependencyGraph& graph, const DependencySnapshot& snapshot,
                                    double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(Errc::InvalidConfig, "fraction must be in (0,1]");
    if (graph.pagerank.size() != graph.nodes.size()) throw Error(Errc::InvalidSpec, "pagerank not computed");

    std::vector<std::size_t> order(graph.nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (graph.pagerank[a] != graph.pagerank[b]) return graph.pagerank[a] > graph.pagerank[b];
        return graph.nodes[a] < graph.nodes[b];
    });

    std::size_t linked = 0;
    for (const auto& name : graph.nodes)
        if (snapshot.repo_of(name)) ++linked;
    if (linked == 0) throw Error(Errc::EmptySelection, "no library has a repository link");

    // guard against 0.01 * 100 landing a hair above 1
    const auto target = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(linked) - 1e-9));
    SelectionResult result;
    result.fraction = fraction;
    for (auto idx : order) {
        if (result.selected.size() >= std::max<std::size_t>(target, 1)) break;
        const auto repo = snapshot.repo_of(graph.nodes[idx]);
        if (!repo) {
            ++result.excluded_no_repo;
            continue;
        }
        result.selected.push_back({graph.nodes[idx], *repo, graph.pagerank[idx]});
    }
    return result;
}

std::string format_selection_csv(const SelectionResult& selection) {
    std::string out = "rank,library,repo,pagerank\n";
    for (std::size_t i = 0; i < selection.selected.size(); ++i) {
        const auto& s = selection.selected[i];
        out += std::to_string(i + 1) + ',' + s.library + ',' + s.repo_id + ',' + format_double(s.pagerank) + '\n';
    }
    return out;
}

}  // namespace maintcast
