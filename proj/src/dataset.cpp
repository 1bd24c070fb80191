#include "signgad/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "signgad/rng.hpp"

namespace fs = std::filesystem;

namespace signgad {

std::vector<Split> stratified_splits(const std::vector<Label>& labels, double train_ratio,
                                     double val_fraction, std::uint64_t seed) {
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
        throw std::invalid_argument("stratified_splits: train_ratio must be in (0, 1)");
    }
    std::vector<Split> splits(labels.size(), Split::None);
    Rng rng(derive_seed(seed, "split-sampling"));
    for (const Label cls : {Label::Normal, Label::Anomaly}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) {
                members.push_back(i);
            }
        }
        if (members.empty()) {
            continue;
        }
        rng.shuffle(members);
        const std::size_t n_train = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(train_ratio *
                                                   static_cast<double>(members.size()))));
        const std::size_t rest = members.size() > n_train ? members.size() - n_train : 0;
        const std::size_t n_val =
            static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(rest)));
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i < n_train) {
                splits[members[i]] = Split::Train;
            } else if (i < n_train + n_val) {
                splits[members[i]] = Split::Val;
            } else {
                splits[members[i]] = Split::Test;
            }
        }
    }
    return splits;
}

namespace {

EdgeList read_edges(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_dataset: cannot open " + path.string());
    }
    EdgeList edges;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ss(line);
        std::size_t u = 0, v = 0;
        if (!(ss >> u >> v)) {
            throw std::runtime_error("load_dataset: malformed edge line in " + path.string() +
                                     ": " + line);
        }
        edges.emplace_back(u, v);
    }
    return edges;
}

Matrix read_features_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_dataset: cannot open " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error("load_dataset: ragged feature row in " + path.string());
        }
        rows.push_back(std::move(row));
    }
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

Matrix read_features_bin(const fs::path& bin_path, const fs::path& shape_path) {
    std::ifstream shape(shape_path);
    if (!shape) {
        throw std::runtime_error("load_dataset: missing shape sidecar " + shape_path.string());
    }
    std::size_t rows = 0, cols = 0;
    shape >> rows >> cols;
    Matrix m(rows, cols);
    std::ifstream bin(bin_path, std::ios::binary);
    bin.read(reinterpret_cast<char*>(m.data.data()),
             static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (bin.gcount() != static_cast<std::streamsize>(m.data.size() * sizeof(double))) {
        throw std::runtime_error("load_dataset: truncated " + bin_path.string());
    }
    return m;
}

std::vector<Label> read_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_dataset: cannot open " + path.string());
    }
    std::vector<Label> labels;
    std::string token;
    while (in >> token) {
        if (token == "0") {
            labels.push_back(Label::Normal);
        } else if (token == "1") {
            labels.push_back(Label::Anomaly);
        } else if (token == "?") {
            labels.push_back(Label::Unlabeled);
        } else {
            throw std::runtime_error("load_dataset: labels must be 0, 1 or ?, got " + token);
        }
    }
    return labels;
}

std::vector<Split> read_splits(const fs::path& path) {
    std::ifstream in(path);
    std::vector<Split> splits;
    std::string token;
    while (in >> token) {
        if (token == "train") {
            splits.push_back(Split::Train);
        } else if (token == "val") {
            splits.push_back(Split::Val);
        } else if (token == "test") {
            splits.push_back(Split::Test);
        } else if (token == "none") {
            splits.push_back(Split::None);
        } else {
            throw std::runtime_error("load_dataset: bad split token " + token);
        }
    }
    return splits;
}

} // namespace

AttributedGraph load_dataset(const std::string& dir, double train_ratio, double val_fraction,
                             std::uint64_t seed) {
    const fs::path root(dir);
    if (!fs::is_directory(root)) {
        throw std::runtime_error("load_dataset: not a directory: " + dir);
    }

    std::vector<EdgeList> relations;
    for (std::size_t r = 0;; ++r) {
        const fs::path p = root / ("relation_" + std::to_string(r) + ".edges");
        if (!fs::exists(p)) {
            break;
        }
        relations.push_back(read_edges(p));
    }
    if (relations.empty()) {
        throw std::runtime_error("load_dataset: relation_0.edges missing in " + dir);
    }

    Matrix features;
    if (fs::exists(root / "features.csv")) {
        features = read_features_csv(root / "features.csv");
    } else if (fs::exists(root / "features.bin")) {
        features = read_features_bin(root / "features.bin", root / "features.shape");
    } else {
        throw std::runtime_error("load_dataset: no features.csv or features.bin in " + dir);
    }

    const std::vector<Label> labels = read_labels(root / "labels.txt");
    if (labels.size() != features.rows) {
        throw std::runtime_error("load_dataset: labels.txt row count != feature rows");
    }

    std::vector<Split> splits;
    if (fs::exists(root / "splits.txt")) {
        splits = read_splits(root / "splits.txt");
        if (splits.size() != labels.size()) {
            throw std::runtime_error("load_dataset: splits.txt row count mismatch");
        }
    } else {
        splits = stratified_splits(labels, train_ratio, val_fraction, seed);
    }

    return build_graph(features.rows, relations, std::move(features), labels, splits);
}

void save_dataset(const std::string& dir, const AttributedGraph& g) {
    const fs::path root(dir);
    fs::create_directories(root);

    for (std::size_t r = 0; r < 1 + g.n_extra_relations(); ++r) {
        const Adjacency& adj = g.relation(r);
        std::ofstream out(root / ("relation_" + std::to_string(r) + ".edges"));
        for (std::size_t u = 0; u < adj.n; ++u) {
            for (const std::uint32_t v : adj.neighbors(u)) {
                if (u < v) {
                    out << u << " " << v << "\n";
                }
            }
        }
    }

    {
        std::ofstream out(root / "features.csv");
        char buf[40];
        for (std::size_t r = 0; r < g.n_nodes; ++r) {
            const auto row = g.features.row(r);
            for (std::size_t c = 0; c < g.n_features; ++c) {
                std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
                out << (c > 0 ? "," : "") << buf;
            }
            out << "\n";
        }
    }
    {
        std::ofstream out(root / "labels.txt");
        for (const Label l : g.labels) {
            out << (l == Label::Unlabeled ? "?" : l == Label::Anomaly ? "1" : "0") << "\n";
        }
    }
    {
        std::ofstream out(root / "splits.txt");
        for (const Split s : g.splits) {
            switch (s) {
            case Split::Train: out << "train\n"; break;
            case Split::Val: out << "val\n"; break;
            case Split::Test: out << "test\n"; break;
            case Split::None: out << "none\n"; break;
            }
        }
    }
}

AttributedGraph generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_nodes < 10) {
        throw std::invalid_argument("generate_synthetic: n_nodes must be >= 10");
    }
    if (!(spec.anomaly_rate > 0.0 && spec.anomaly_rate < 1.0)) {
        throw std::invalid_argument("generate_synthetic: anomaly_rate must be in (0, 1)");
    }
    if (spec.homophily < 0.0 || spec.homophily > 1.0 || spec.anomaly_rewire < 0.0 ||
        spec.anomaly_rewire > 1.0) {
        throw std::invalid_argument("generate_synthetic: homophily/rewire must be in [0, 1]");
    }
    const std::size_t n_anomalies = static_cast<std::size_t>(
        std::llround(spec.anomaly_rate * static_cast<double>(spec.n_nodes)));
    if (n_anomalies == 0) {
        throw std::invalid_argument("generate_synthetic: anomaly count is zero");
    }

    const std::size_t n = spec.n_nodes;
    const std::size_t d = spec.feature_dim;
    const std::size_t n_communities = 8;
    const std::size_t base_edges_per_node = 5;
    const std::size_t extra_edges_per_node = 4;

    Rng rng(derive_seed(spec.seed, "synthetic"));

    // Community assignment and feature centers.
    std::vector<std::size_t> community(n);
    std::vector<std::vector<std::size_t>> members(n_communities);
    for (std::size_t i = 0; i < n; ++i) {
        community[i] = rng.uniform_int(n_communities);
        members[community[i]].push_back(i);
    }
    Matrix centers(n_communities, d);
    for (double& v : centers.data) {
        v = 2.0 * rng.normal();
    }

    // Anomaly selection.
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = i;
    }
    rng.shuffle(ids);
    std::vector<bool> is_anomaly(n, false);
    for (std::size_t i = 0; i < n_anomalies; ++i) {
        is_anomaly[ids[i]] = true;
    }

    // Features: community center + unit noise; anomalies add a shift along a
    // per-node random direction (not linearly separable in raw space).
    Matrix features(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = features.row(i);
        const auto center = centers.row(community[i]);
        for (std::size_t c = 0; c < d; ++c) {
            row[c] = center[c] + rng.normal();
        }
        if (is_anomaly[i] && spec.anomaly_shift > 0.0) {
            std::vector<double> dir(d);
            double norm = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                dir[c] = rng.normal();
                norm += dir[c] * dir[c];
            }
            norm = std::sqrt(norm);
            if (norm > 0.0) {
                for (std::size_t c = 0; c < d; ++c) {
                    row[c] += spec.anomaly_shift * dir[c] / norm;
                }
            }
        }
    }

    const auto draw_neighbor = [&](std::size_t i) {
        const auto& same = members[community[i]];
        if (rng.uniform01() < spec.homophily && same.size() > 1) {
            return same[rng.uniform_int(same.size())];
        }
        return static_cast<std::size_t>(rng.uniform_int(n));
    };

    const auto homophilous_layer = [&](std::size_t edges_per_node) {
        EdgeList edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t e = 0; e < edges_per_node; ++e) {
                const std::size_t j = draw_neighbor(i);
                if (j != i) {
                    edges.emplace_back(i, j);
                }
            }
        }
        return edges;
    };

    std::vector<EdgeList> relations;
    EdgeList base = homophilous_layer(base_edges_per_node);
    // Anomalies violate homophily: rewire their endpoints at the configured
    // rate and attach extra random edges (degree inflation).
    for (auto& [u, v] : base) {
        if (is_anomaly[u] && rng.uniform01() < spec.anomaly_rewire) {
            const std::size_t t = rng.uniform_int(n);
            if (t != u) {
                v = t;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_anomaly[i]) {
            continue;
        }
        for (std::size_t e = 0; e < base_edges_per_node; ++e) {
            if (rng.uniform01() < spec.anomaly_rewire) {
                const std::size_t t = rng.uniform_int(n);
                if (t != i) {
                    base.emplace_back(i, t);
                }
            }
        }
    }
    relations.push_back(std::move(base));
    for (std::size_t r = 0; r < spec.n_extra_relations; ++r) {
        relations.push_back(homophilous_layer(extra_edges_per_node));
    }

    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = is_anomaly[i] ? Label::Anomaly : Label::Normal;
    }
    const std::vector<Split> splits = stratified_splits(
        labels, spec.train_ratio, spec.val_fraction, derive_seed(spec.seed, "synthetic-splits"));

    return build_graph(n, relations, std::move(features), std::move(labels), splits);
}

} // namespace signgad
