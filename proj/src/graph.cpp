#include "signgad/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace signgad {

std::vector<std::size_t> AttributedGraph::split_ids(Split s) const {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (splits[i] == s) {
            ids.push_back(i);
        }
    }
    return ids;
}

std::vector<std::size_t> AttributedGraph::labeled_ids() const {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (labels[i] != Label::Unlabeled) {
            ids.push_back(i);
        }
    }
    return ids;
}

Adjacency build_adjacency(std::size_t n, const EdgeList& edges) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> directed;
    directed.reserve(edges.size() * 2);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) {
            throw std::out_of_range("build_adjacency: node index out of range");
        }
        if (u == v) {
            continue; // self-loops stripped
        }
        directed.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
        directed.emplace_back(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(u));
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    Adjacency adj;
    adj.n = n;
    adj.row_ptr.assign(n + 1, 0);
    adj.cols.reserve(directed.size());
    for (const auto& [u, v] : directed) {
        ++adj.row_ptr[u + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        adj.row_ptr[i + 1] += adj.row_ptr[i];
    }
    for (const auto& [u, v] : directed) {
        adj.cols.push_back(v); // directed pairs already sorted by (row, col)
    }
    return adj;
}

AttributedGraph build_graph(std::size_t n_nodes,
                            const std::vector<EdgeList>& relation_edges,
                            Matrix features,
                            std::vector<Label> labels,
                            std::vector<Split> splits) {
    if (relation_edges.empty()) {
        throw std::invalid_argument("build_graph: at least the base relation is required");
    }
    if (features.rows != n_nodes) {
        throw std::invalid_argument("build_graph: feature row count != n_nodes");
    }
    if (labels.size() != n_nodes || splits.size() != n_nodes) {
        throw std::invalid_argument("build_graph: labels/splits size != n_nodes");
    }
    for (const double v : features.data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("build_graph: non-finite feature entry");
        }
    }
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const bool labeled = labels[i] != Label::Unlabeled;
        const bool split = splits[i] != Split::None;
        if (split && !labeled) {
            throw std::invalid_argument("build_graph: split assigned to unlabeled node");
        }
        if (labeled && !split) {
            throw std::invalid_argument("build_graph: labeled node missing a split");
        }
    }

    AttributedGraph g;
    g.n_nodes = n_nodes;
    g.n_features = features.cols;
    g.features = std::move(features);
    g.labels = std::move(labels);
    g.splits = std::move(splits);
    g.base_adj = build_adjacency(n_nodes, relation_edges[0]);
    for (std::size_t r = 1; r < relation_edges.size(); ++r) {
        g.extra_adjs.push_back(build_adjacency(n_nodes, relation_edges[r]));
    }
    return g;
}

Adjacency fuse_relations(const AttributedGraph& g) {
    if (g.extra_adjs.empty()) {
        throw std::invalid_argument("fuse_relations: graph has a single relation");
    }
    Adjacency fused;
    fused.n = g.n_nodes;
    fused.row_ptr.assign(g.n_nodes + 1, 0);

    std::vector<std::uint32_t> merged;
    std::vector<std::vector<std::uint32_t>> per_row(g.n_nodes);
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        merged.clear();
        const auto base = g.base_adj.neighbors(i);
        merged.assign(base.begin(), base.end());
        for (const Adjacency& adj : g.extra_adjs) {
            const auto nb = adj.neighbors(i);
            merged.insert(merged.end(), nb.begin(), nb.end());
        }
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        per_row[i] = merged;
        fused.row_ptr[i + 1] = fused.row_ptr[i] + merged.size();
    }
    fused.cols.reserve(fused.row_ptr.back());
    for (const auto& row : per_row) {
        fused.cols.insert(fused.cols.end(), row.begin(), row.end());
    }
    return fused;
}

Adjacency topology_adjacency(const AttributedGraph& g, Topology t) {
    return t == Topology::Base ? g.base_adj : fuse_relations(g);
}

NormalizedAdjacency row_normalize(const Adjacency& adj) {
    NormalizedAdjacency out;
    out.n = adj.n;
    out.row_ptr = adj.row_ptr;
    out.cols = adj.cols;
    out.vals.resize(adj.cols.size());
    for (std::size_t i = 0; i < adj.n; ++i) {
        const std::size_t deg = adj.degree(i);
        if (deg == 0) {
            continue;
        }
        const double w = 1.0 / static_cast<double>(deg);
        for (std::size_t k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k) {
            out.vals[k] = w;
        }
    }
    return out;
}

std::vector<std::size_t> degrees(const Adjacency& adj) {
    std::vector<std::size_t> d(adj.n);
    for (std::size_t i = 0; i < adj.n; ++i) {
        d[i] = adj.degree(i);
    }
    return d;
}

Matrix propagate(const NormalizedAdjacency& norm_adj, const Matrix& x) {
    if (x.rows != norm_adj.n) {
        throw std::invalid_argument("propagate: shape mismatch");
    }
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < norm_adj.n; ++i) {
        auto dst = out.row(i);
        for (std::size_t k = norm_adj.row_ptr[i]; k < norm_adj.row_ptr[i + 1]; ++k) {
            const double w = norm_adj.vals[k];
            const auto src = x.row(norm_adj.cols[k]);
            for (std::size_t c = 0; c < x.cols; ++c) {
                dst[c] += w * src[c];
            }
        }
    }
    return out;
}

namespace {

GraphView view_from_adjacency(const AttributedGraph& g, Topology t, Adjacency adj) {
    GraphView view;
    view.topology = t;
    view.adj = std::move(adj);
    view.degs = degrees(view.adj);
    const NormalizedAdjacency norm = row_normalize(view.adj);
    view.h1 = propagate(norm, g.features);
    view.h2 = propagate(norm, view.h1);
    return view;
}

} // namespace

GraphView make_graph_view(const AttributedGraph& g, Topology t) {
    return view_from_adjacency(g, t, topology_adjacency(g, t));
}

GraphView make_relation_view(const AttributedGraph& g, std::size_t extra_index) {
    return view_from_adjacency(g, Topology::Base, g.extra_adjs.at(extra_index));
}

const char* to_string(Topology t) {
    return t == Topology::Base ? "base" : "fused";
}

Topology topology_from_string(const std::string& name) {
    if (name == "base") {
        return Topology::Base;
    }
    if (name == "fused") {
        return Topology::Fused;
    }
    throw std::invalid_argument("unknown topology: " + name);
}

} // namespace signgad
