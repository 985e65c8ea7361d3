#pragma once

#include "maintcast/ingest.hpp"

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace maintcast {

/// Library graph with edges dependent -> dependency (or reversed on request).
/// Nodes are kept sorted by name, so results never depend on input order.
struct DependencyGraph {
    std::vector<std::string> nodes;
    std::vector<std::vector<std::size_t>> out_edges;  // sorted, deduplicated
    std::vector<double> pagerank;                     // empty until computed

    std::size_t edge_count() const;
    std::size_t index_of(const std::string& name) const;  // throws UnknownLabel
};

struct PageRankParams {
    double damping = 0.85;
    double tol = 1e-8;  // L1 change between iterates
    int max_iter = 100;
};

struct PageRankReport {
    int iterations = 0;
    double last_delta = 0.0;
    bool converged = false;
};

DependencyGraph build_dependency_graph(const DependencySnapshot& snapshot, bool reverse_edges = false);

/// Power iteration with uniform teleportation; dangling mass is spread
/// uniformly. Non-convergence is reported, not thrown.
PageRankReport pagerank(DependencyGraph& graph, const PageRankParams& params = {});

struct SelectedLibrary {
    std::string library;
    std::string repo_id;
    double pagerank = 0.0;
};

struct SelectionResult {
    std::vector<SelectedLibrary> selected;  // pagerank descending, then name ascending
    double fraction = 0.0;
    std::size_t excluded_no_repo = 0;  // ranked above the cutoff but without a repo link
};

/// Keeps the top ceil(fraction * |libraries with a repo link|) linked libraries.
SelectionResult select_top_fraction(const DependencyGraph& graph, const DependencySnapshot& snapshot,
                                    double fraction);

/// `rank,library,repo,pagerank` with header.
std::string format_selection_csv(const SelectionResult& selection);

}  // namespace maintcast
