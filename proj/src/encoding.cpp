#include "signgad/encoding.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace signgad {

Matrix graph_context_encoding(const AttributedGraph& g, const GraphView& view) {
    const std::size_t d = g.n_features;
    Matrix phi(g.n_nodes, phi_width(d));
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        const auto x = g.features.row(i);
        const auto h1 = view.h1.row(i);
        const auto h2 = view.h2.row(i);
        auto dst = phi.row(i);
        std::size_t c = 0;
        for (std::size_t j = 0; j < d; ++j) {
            dst[c++] = x[j];
        }
        dst[c++] = std::log1p(static_cast<double>(view.degs[i]));
        for (std::size_t j = 0; j < d; ++j) {
            dst[c++] = h1[j];
        }
        for (std::size_t j = 0; j < d; ++j) {
            dst[c++] = h2[j];
        }
        for (std::size_t j = 0; j < d; ++j) {
            dst[c++] = std::abs(x[j] - h1[j]);
        }
        for (std::size_t j = 0; j < d; ++j) {
            dst[c++] = std::abs(h1[j] - h2[j]);
        }
    }
    return phi;
}

Matrix evidence_aware_encoding(const Matrix& phi, const EvidenceMatrix& evidence) {
    if (evidence.kinds.empty()) {
        return phi;
    }
    if (evidence.values.rows != phi.rows) {
        throw std::invalid_argument("evidence_aware_encoding: row count mismatch");
    }
    return hconcat(phi, evidence.values);
}

void export_encoding(const std::string& path, const Matrix& m,
                     std::size_t n_features, std::size_t n_evidence) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) {
        throw std::runtime_error("export_encoding: cannot open " + path);
    }
    bin.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!bin) {
        throw std::runtime_error("export_encoding: write failed for " + path);
    }

    std::ofstream layout(path + ".layout");
    layout << "rows " << m.rows << "\n";
    layout << "cols " << m.cols << "\n";
    layout << "dtype float64 row-major\n";
    layout << "block x 0 " << n_features << "\n";
    layout << "block log1p_degree " << n_features << " 1\n";
    layout << "block h1 " << (n_features + 1) << " " << n_features << "\n";
    layout << "block h2 " << (2 * n_features + 1) << " " << n_features << "\n";
    layout << "block abs_x_minus_h1 " << (3 * n_features + 1) << " " << n_features << "\n";
    layout << "block abs_h1_minus_h2 " << (4 * n_features + 1) << " " << n_features << "\n";
    if (n_evidence > 0) {
        layout << "block evidence " << (5 * n_features + 1) << " " << n_evidence << "\n";
    }
}

Matrix import_encoding(const std::string& path) {
    std::ifstream layout(path + ".layout");
    if (!layout) {
        throw std::runtime_error("import_encoding: missing layout sidecar for " + path);
    }
    std::size_t rows = 0, cols = 0;
    std::string line;
    while (std::getline(layout, line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "rows") {
            ss >> rows;
        } else if (key == "cols") {
            ss >> cols;
        }
    }
    Matrix m(rows, cols);
    std::ifstream bin(path, std::ios::binary);
    if (!bin) {
        throw std::runtime_error("import_encoding: cannot open " + path);
    }
    bin.read(reinterpret_cast<char*>(m.data.data()),
             static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (bin.gcount() != static_cast<std::streamsize>(m.data.size() * sizeof(double))) {
        throw std::runtime_error("import_encoding: truncated matrix file " + path);
    }
    return m;
}

} // namespace signgad
