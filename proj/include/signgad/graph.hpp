#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "signgad/linalg.hpp"

namespace signgad {

// Sparse binary adjacency in CSR form. Column indices are sorted within each
// row and deduplicated; matrices are symmetric with a zero diagonal by
// construction (see build_adjacency).
struct Adjacency {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr; // size n + 1
    std::vector<std::uint32_t> cols;  // sorted within each row

    std::size_t degree(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
    std::span<const std::uint32_t> neighbors(std::size_t i) const {
        return {cols.data() + row_ptr[i], row_ptr[i + 1] - row_ptr[i]};
    }
    std::size_t edge_count_undirected() const { return cols.size() / 2; }
};

// Row-stochastic sparse matrix (zero rows stay zero for isolated nodes).
struct NormalizedAdjacency {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
};

enum class Label : std::int8_t { Normal = 0, Anomaly = 1, Unlabeled = -1 };
enum class Split : std::int8_t { None = -1, Train = 0, Val = 1, Test = 2 };

enum class Topology { Base, Fused };

// Multi-relation attributed graph. Immutable after construction; safe to read
// from many threads.
struct AttributedGraph {
    std::size_t n_nodes = 0;
    std::size_t n_features = 0;
    Adjacency base_adj;
    std::vector<Adjacency> extra_adjs; // relations 1..R
    Matrix features;                   // n_nodes x n_features
    std::vector<Label> labels;
    std::vector<Split> splits;

    std::size_t n_extra_relations() const { return extra_adjs.size(); }
    const Adjacency& relation(std::size_t r) const {
        return r == 0 ? base_adj : extra_adjs[r - 1];
    }

    std::vector<std::size_t> split_ids(Split s) const;
    std::vector<std::size_t> labeled_ids() const;
};

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

// Symmetrizes, deduplicates and strips self-loops.
Adjacency build_adjacency(std::size_t n, const EdgeList& edges);

// Validates and assembles the graph. Labeled nodes must be fully partitioned
// into train/val/test (split implies label and vice versa); features must be
// finite; indices in range.
AttributedGraph build_graph(std::size_t n_nodes,
                            const std::vector<EdgeList>& relation_edges,
                            Matrix features,
                            std::vector<Label> labels,
                            std::vector<Split> splits);

// Indicator union of all relations. Requires at least one extra relation.
Adjacency fuse_relations(const AttributedGraph& g);

// The adjacency selected by a topology choice. Fused requires R >= 1.
Adjacency topology_adjacency(const AttributedGraph& g, Topology t);

// Row-normalized adjacency (D^-1 A); zero rows are preserved as zero.
NormalizedAdjacency row_normalize(const Adjacency& adj);

// Row sums of the binary adjacency.
std::vector<std::size_t> degrees(const Adjacency& adj);

// One propagation step: returns norm_adj * X. Apply once for first-order and
// twice for second-order neighborhood aggregation. Zero rows yield zero rows.
Matrix propagate(const NormalizedAdjacency& norm_adj, const Matrix& x);

// Derived per-topology state shared by the evidence and encoding layers:
// the selected adjacency, its row-normalized form, degrees, and the first-
// and second-order propagated features.
struct GraphView {
    Topology topology = Topology::Base;
    Adjacency adj;
    std::vector<std::size_t> degs;
    Matrix h1;
    Matrix h2;
};

GraphView make_graph_view(const AttributedGraph& g, Topology t);

// View of a single extra relation (adjacency index r in 1..R), used by the
// relation-aware detector branch.
GraphView make_relation_view(const AttributedGraph& g, std::size_t extra_index);

const char* to_string(Topology t);
Topology topology_from_string(const std::string& name);

} // namespace signgad
