#pragma once

#include <string>

#include "signgad/evidence.hpp"
#include "signgad/graph.hpp"

namespace signgad {

// Graph-context encoding phi: per node the blocks
//   [ x | log(1 + deg) | h1 | h2 | |x - h1| | |h1 - h2| ]
// giving width 5*d + 1.
Matrix graph_context_encoding(const AttributedGraph& g, const GraphView& view);

// Evidence-aware encoding z = [ phi || eta ]. K = 0 returns phi unchanged.
Matrix evidence_aware_encoding(const Matrix& phi, const EvidenceMatrix& evidence);

inline std::size_t phi_width(std::size_t n_features) { return 5 * n_features + 1; }

// Writes a headerless row-major float64 matrix to `path` and a text
// descriptor of the block layout to `path + ".layout"`. Debug/oracle surface.
void export_encoding(const std::string& path, const Matrix& m,
                     std::size_t n_features, std::size_t n_evidence);

// Reads a matrix written by export_encoding (shape from the descriptor).
Matrix import_encoding(const std::string& path);

} // namespace signgad
