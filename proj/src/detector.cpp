#include "signgad/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "signgad/rng.hpp"

namespace signgad {

const char* to_string(DetectorKind kind) {
    switch (kind) {
    case DetectorKind::Linear: return "linear";
    case DetectorKind::Tree: return "tree";
    case DetectorKind::Stacked: return "stacked";
    case DetectorKind::RelationAware: return "relation_aware";
    }
    return "unknown";
}

DetectorKind detector_kind_from_string(const std::string& name) {
    if (name == "linear") return DetectorKind::Linear;
    if (name == "tree") return DetectorKind::Tree;
    if (name == "stacked") return DetectorKind::Stacked;
    if (name == "relation_aware") return DetectorKind::RelationAware;
    throw std::invalid_argument("unknown detector kind: " + name);
}

void Standardizer::fit(const Matrix& x, double eps) {
    mean.assign(x.cols, 0.0);
    scale.assign(x.cols, 1.0);
    if (x.rows == 0) {
        return;
    }
    // Column values are sorted before accumulation so the fitted moments do
    // not depend on caller row order (bit-stable standardization).
    std::vector<double> column(x.rows);
    for (std::size_t c = 0; c < x.cols; ++c) {
        for (std::size_t r = 0; r < x.rows; ++r) {
            column[r] = x.at(r, c);
        }
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (const double v : column) {
            sum += v;
        }
        mean[c] = sum / static_cast<double>(x.rows);
        for (double& v : column) {
            const double d = v - mean[c];
            v = d * d;
        }
        std::sort(column.begin(), column.end());
        double var = 0.0;
        for (const double v : column) {
            var += v;
        }
        scale[c] = std::sqrt(var / static_cast<double>(x.rows)) + eps;
    }
}

Matrix Standardizer::transform(const Matrix& x) const {
    if (x.cols != mean.size()) {
        throw std::invalid_argument("Standardizer: width mismatch");
    }
    Matrix out(x.rows, x.cols);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto src = x.row(r);
        auto dst = out.row(r);
        for (std::size_t c = 0; c < x.cols; ++c) {
            dst[c] = (src[c] - mean[c]) / scale[c];
        }
    }
    return out;
}

LinearUnit LinearUnit::fit(const Matrix& x, const std::vector<int>& y, const DetectorConfig& cfg) {
    LinearUnit unit;
    unit.standardizer.fit(x, cfg.epsilon);
    unit.model = train_logistic(unit.standardizer.transform(x), y, cfg.logistic);
    return unit;
}

std::vector<double> LinearUnit::score(const Matrix& x) const {
    return logistic_scores(model, standardizer.transform(x));
}

TreeUnit TreeUnit::fit(const Matrix& x, const std::vector<int>& y, const DetectorConfig& cfg) {
    TreeUnit unit;
    unit.standardizer.fit(x, cfg.epsilon);
    unit.model = train_gbdt(unit.standardizer.transform(x), y, cfg.tree);
    return unit;
}

std::vector<double> TreeUnit::score(const Matrix& x) const {
    return gbdt_scores(model, standardizer.transform(x));
}

Matrix RelationProjection::project(const Matrix& rows) const {
    if (rows.cols != center.size()) {
        throw std::invalid_argument("RelationProjection: width mismatch");
    }
    const std::size_t q = basis.cols;
    Matrix out(rows.rows, q);
    for (std::size_t r = 0; r < rows.rows; ++r) {
        const auto src = rows.row(r);
        for (std::size_t k = 0; k < effective_rank; ++k) {
            double s = 0.0;
            for (std::size_t c = 0; c < rows.cols; ++c) {
                s += basis.at(c, k) * (src[c] - center[c]);
            }
            out.at(r, k) = s;
        }
    }
    return out;
}

std::vector<int> stratified_folds(const Matrix& x, const std::vector<int>& y,
                                  std::size_t n_folds, std::uint64_t seed) {
    const std::size_t n = y.size();
    std::size_t n_pos = 0;
    for (const int v : y) {
        n_pos += static_cast<std::size_t>(v);
    }
    const std::size_t min_class = std::min(n_pos, n - n_pos);
    const std::size_t k = std::max<std::size_t>(2, std::min(n_folds, min_class));

    // Canonical content order, then a seeded shuffle within each class.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ra = x.row(a);
        const auto rb = x.row(b);
        for (std::size_t c = 0; c < x.cols; ++c) {
            if (ra[c] != rb[c]) {
                return ra[c] < rb[c];
            }
        }
        return y[a] < y[b];
    });

    std::vector<int> folds(n, -1);
    Rng rng(derive_seed(seed, "stratified-folds"));
    for (const int cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (const std::size_t idx : order) {
            if (y[idx] == cls) {
                members.push_back(idx);
            }
        }
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) {
            folds[members[i]] = static_cast<int>(i % k);
        }
    }
    return folds;
}

TrainedDetector train_linear(const Matrix& z_train, const std::vector<int>& y_train,
                             std::uint64_t seed, const DetectorConfig& cfg) {
    TrainedDetector det;
    det.kind = DetectorKind::Linear;
    det.seed = seed;
    det.linear = LinearUnit::fit(z_train, y_train, cfg);
    return det;
}

TrainedDetector train_tree(const Matrix& z_train, const std::vector<int>& y_train,
                           std::uint64_t seed, const DetectorConfig& cfg) {
    TrainedDetector det;
    det.kind = DetectorKind::Tree;
    det.seed = seed;
    det.tree = TreeUnit::fit(z_train, y_train, cfg);
    return det;
}

namespace {

// Out-of-fold base-detector scores on the training rows plus the full-train
// base units. The OOF entries at row i come from models that never saw row
// i's label.
struct CrossFit {
    Matrix psi_oof; // n_train x 2 (linear, tree)
    LinearUnit base_lin;
    TreeUnit base_tree;
    std::vector<int> folds;
};

CrossFit cross_fit_bases(const Matrix& z_train, const std::vector<int>& y_train,
                         std::uint64_t seed, const DetectorConfig& cfg) {
    CrossFit out;
    out.folds = stratified_folds(z_train, y_train, cfg.n_folds, seed);
    const int k = 1 + *std::max_element(out.folds.begin(), out.folds.end());
    out.psi_oof = Matrix(z_train.rows, 2);
    for (int f = 0; f < k; ++f) {
        std::vector<std::size_t> fit_rows, held_rows;
        for (std::size_t i = 0; i < z_train.rows; ++i) {
            (out.folds[i] == f ? held_rows : fit_rows).push_back(i);
        }
        if (held_rows.empty()) {
            continue;
        }
        const Matrix z_fit = take_rows(z_train, fit_rows);
        std::vector<int> y_fit(fit_rows.size());
        for (std::size_t i = 0; i < fit_rows.size(); ++i) {
            y_fit[i] = y_train[fit_rows[i]];
        }
        const LinearUnit lin = LinearUnit::fit(z_fit, y_fit, cfg);
        const TreeUnit tree = TreeUnit::fit(z_fit, y_fit, cfg);
        const Matrix z_held = take_rows(z_train, held_rows);
        const std::vector<double> s_lin = lin.score(z_held);
        const std::vector<double> s_tree = tree.score(z_held);
        for (std::size_t i = 0; i < held_rows.size(); ++i) {
            out.psi_oof.at(held_rows[i], 0) = s_lin[i];
            out.psi_oof.at(held_rows[i], 1) = s_tree[i];
        }
    }
    out.base_lin = LinearUnit::fit(z_train, y_train, cfg);
    out.base_tree = TreeUnit::fit(z_train, y_train, cfg);
    return out;
}

Matrix stacked_psi(const LinearUnit& lin, const TreeUnit& tree, const Matrix& z) {
    const std::vector<double> s_lin = lin.score(z);
    const std::vector<double> s_tree = tree.score(z);
    Matrix psi(z.rows, 2);
    for (std::size_t i = 0; i < z.rows; ++i) {
        psi.at(i, 0) = s_lin[i];
        psi.at(i, 1) = s_tree[i];
    }
    return psi;
}

} // namespace

Matrix build_stacked_features(const Matrix& z_all, const std::vector<std::size_t>& train_ids,
                              const std::vector<int>& y_train, std::uint64_t seed,
                              const DetectorConfig& cfg, std::vector<int>* folds_out) {
    const Matrix z_train = take_rows(z_all, train_ids);
    const CrossFit fitted = cross_fit_bases(z_train, y_train, seed, cfg);
    Matrix psi = stacked_psi(fitted.base_lin, fitted.base_tree, z_all);
    for (std::size_t i = 0; i < train_ids.size(); ++i) {
        psi.at(train_ids[i], 0) = fitted.psi_oof.at(i, 0);
        psi.at(train_ids[i], 1) = fitted.psi_oof.at(i, 1);
    }
    if (folds_out != nullptr) {
        *folds_out = fitted.folds;
    }
    return psi;
}

TrainedDetector train_stacked(const Matrix& z_train, const std::vector<int>& y_train,
                              std::uint64_t seed, const DetectorConfig& cfg) {
    TrainedDetector det;
    det.kind = DetectorKind::Stacked;
    det.seed = seed;
    CrossFit fitted = cross_fit_bases(z_train, y_train, seed, cfg);
    const Matrix rho_train = hconcat(z_train, fitted.psi_oof);
    det.meta = LinearUnit::fit(rho_train, y_train, cfg);
    det.base_lin = std::move(fitted.base_lin);
    det.base_tree = std::move(fitted.base_tree);
    return det;
}

RelationProjection fit_relation_projection(const Matrix& phi_r_train, std::size_t q_dim) {
    RelationProjection proj;
    const std::size_t d = phi_r_train.cols;
    proj.center.assign(d, 0.0);
    for (std::size_t r = 0; r < phi_r_train.rows; ++r) {
        const auto row = phi_r_train.row(r);
        for (std::size_t c = 0; c < d; ++c) {
            proj.center[c] += row[c];
        }
    }
    if (phi_r_train.rows > 0) {
        for (double& v : proj.center) {
            v /= static_cast<double>(phi_r_train.rows);
        }
    }
    Matrix centered(phi_r_train.rows, d);
    for (std::size_t r = 0; r < phi_r_train.rows; ++r) {
        const auto src = phi_r_train.row(r);
        auto dst = centered.row(r);
        for (std::size_t c = 0; c < d; ++c) {
            dst[c] = src[c] - proj.center[c];
        }
    }
    const std::size_t rank = std::min({q_dim, d, phi_r_train.rows});
    std::size_t effective = 0;
    const Matrix basis = principal_basis(centered, rank, &effective);
    proj.basis = Matrix(d, q_dim); // zero-padded to the fixed output width
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < effective; ++c) {
            proj.basis.at(r, c) = basis.at(r, c);
        }
    }
    proj.effective_rank = effective;
    return proj;
}

namespace {

// chi^(r) = [ q || base linear score || base tree score ], width q_dim + 2.
Matrix relation_chi(const RelationBranch& branch, const Matrix& phi_r) {
    const Matrix q = branch.projection.project(phi_r);
    const std::vector<double> s_lin = branch.lin.score(phi_r);
    const std::vector<double> s_tree = branch.tree.score(phi_r);
    Matrix chi(phi_r.rows, q.cols + 2);
    for (std::size_t i = 0; i < phi_r.rows; ++i) {
        for (std::size_t c = 0; c < q.cols; ++c) {
            chi.at(i, c) = q.at(i, c);
        }
        chi.at(i, q.cols) = s_lin[i];
        chi.at(i, q.cols + 1) = s_tree[i];
    }
    return chi;
}

} // namespace

TrainedDetector train_relation_aware(const Matrix& z_train,
                                     const std::vector<Matrix>& relation_phi_train,
                                     const std::vector<int>& y_train, std::uint64_t seed,
                                     const DetectorConfig& cfg) {
    if (relation_phi_train.empty()) {
        throw std::invalid_argument("train_relation_aware: no extra relations (R = 0)");
    }
    TrainedDetector det;
    det.kind = DetectorKind::RelationAware;
    det.seed = seed;

    CrossFit fitted = cross_fit_bases(z_train, y_train, seed, cfg);
    Matrix xi_train = hconcat(z_train, fitted.psi_oof);

    for (std::size_t r = 0; r < relation_phi_train.size(); ++r) {
        const Matrix& phi_r = relation_phi_train[r];
        RelationBranch branch;
        branch.projection = fit_relation_projection(phi_r, cfg.q_dim);
        const CrossFit rel_fit =
            cross_fit_bases(phi_r, y_train, derive_seed(seed, "relation-branch", r), cfg);
        branch.lin = rel_fit.base_lin;
        branch.tree = rel_fit.base_tree;

        // Training-row chi uses out-of-fold base scores (leakage control).
        const Matrix q = branch.projection.project(phi_r);
        Matrix chi(phi_r.rows, q.cols + 2);
        for (std::size_t i = 0; i < phi_r.rows; ++i) {
            for (std::size_t c = 0; c < q.cols; ++c) {
                chi.at(i, c) = q.at(i, c);
            }
            chi.at(i, q.cols) = rel_fit.psi_oof.at(i, 0);
            chi.at(i, q.cols + 1) = rel_fit.psi_oof.at(i, 1);
        }
        xi_train = hconcat(xi_train, chi);
        det.branches.push_back(std::move(branch));
    }

    det.rel_final = LinearUnit::fit(xi_train, y_train, cfg);
    det.base_lin = std::move(fitted.base_lin);
    det.base_tree = std::move(fitted.base_tree);
    return det;
}

TrainedDetector train_detector(DetectorKind kind, const DetectorInputs& train_rows,
                               const std::vector<int>& y_train, std::uint64_t seed,
                               const DetectorConfig& cfg) {
    switch (kind) {
    case DetectorKind::Linear:
        return train_linear(train_rows.z, y_train, seed, cfg);
    case DetectorKind::Tree:
        return train_tree(train_rows.z, y_train, seed, cfg);
    case DetectorKind::Stacked:
        return train_stacked(train_rows.z, y_train, seed, cfg);
    case DetectorKind::RelationAware:
        return train_relation_aware(train_rows.z, train_rows.relation_phis, y_train, seed, cfg);
    }
    throw std::invalid_argument("train_detector: unknown kind");
}

std::vector<double> score_detector(const TrainedDetector& det, const DetectorInputs& rows) {
    switch (det.kind) {
    case DetectorKind::Linear:
        return det.linear.score(rows.z);
    case DetectorKind::Tree:
        return det.tree.score(rows.z);
    case DetectorKind::Stacked: {
        const Matrix rho = hconcat(rows.z, stacked_psi(det.base_lin, det.base_tree, rows.z));
        return det.meta.score(rho);
    }
    case DetectorKind::RelationAware: {
        if (rows.relation_phis.size() != det.branches.size()) {
            throw std::invalid_argument("score_detector: relation count mismatch");
        }
        Matrix xi = hconcat(rows.z, stacked_psi(det.base_lin, det.base_tree, rows.z));
        for (std::size_t r = 0; r < det.branches.size(); ++r) {
            xi = hconcat(xi, relation_chi(det.branches[r], rows.relation_phis[r]));
        }
        return det.rel_final.score(xi);
    }
    }
    throw std::invalid_argument("score_detector: unknown kind");
}

// --- binary blob serialization -------------------------------------------

namespace {

constexpr std::uint32_t kBlobMagic = 0x53474431; // "SGD1"

struct ByteWriter {
    std::vector<std::uint8_t> bytes;

    void u32(std::uint32_t v) { raw(&v, sizeof(v)); }
    void u64(std::uint64_t v) { raw(&v, sizeof(v)); }
    void f64(double v) { raw(&v, sizeof(v)); }
    void raw(const void* p, std::size_t n) {
        if (n == 0) {
            return;
        }
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), b, b + n);
    }
    void vec(const std::vector<double>& v) {
        u64(v.size());
        raw(v.data(), v.size() * sizeof(double));
    }
    void mat(const Matrix& m) {
        u64(m.rows);
        u64(m.cols);
        raw(m.data.data(), m.data.size() * sizeof(double));
    }
};

struct ByteReader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    void raw(void* p, std::size_t n) {
        if (pos + n > bytes.size()) {
            throw std::runtime_error("deserialize_detector: truncated blob");
        }
        if (n > 0) { // empty vectors carry a null data pointer
            std::memcpy(p, bytes.data() + pos, n);
        }
        pos += n;
    }
    std::uint32_t u32() { std::uint32_t v; raw(&v, sizeof(v)); return v; }
    std::uint64_t u64() { std::uint64_t v; raw(&v, sizeof(v)); return v; }
    double f64() { double v; raw(&v, sizeof(v)); return v; }
    std::vector<double> vec() {
        std::vector<double> v(u64());
        raw(v.data(), v.size() * sizeof(double));
        return v;
    }
    Matrix mat() {
        const std::size_t r = u64();
        const std::size_t c = u64();
        Matrix m(r, c);
        raw(m.data.data(), m.data.size() * sizeof(double));
        return m;
    }
};

void write_linear(ByteWriter& w, const LinearUnit& u) {
    w.vec(u.standardizer.mean);
    w.vec(u.standardizer.scale);
    w.vec(u.model.weights);
    w.f64(u.model.bias);
}

LinearUnit read_linear(ByteReader& r) {
    LinearUnit u;
    u.standardizer.mean = r.vec();
    u.standardizer.scale = r.vec();
    u.model.weights = r.vec();
    u.model.bias = r.f64();
    return u;
}

void write_tree(ByteWriter& w, const TreeUnit& u) {
    w.vec(u.standardizer.mean);
    w.vec(u.standardizer.scale);
    w.u64(u.model.config.rounds);
    w.u64(u.model.config.max_depth);
    w.f64(u.model.config.learning_rate);
    w.u64(u.model.config.min_samples_leaf);
    w.f64(u.model.config.leaf_lambda);
    w.u64(u.model.trees.size());
    for (const GbdtTree& t : u.model.trees) {
        w.u64(t.nodes.size());
        for (const GbdtNode& n : t.nodes) {
            w.u32(static_cast<std::uint32_t>(n.feature));
            w.f64(n.threshold);
            w.u32(static_cast<std::uint32_t>(n.left));
            w.u32(static_cast<std::uint32_t>(n.right));
            w.f64(n.value);
        }
    }
}

TreeUnit read_tree(ByteReader& r) {
    TreeUnit u;
    u.standardizer.mean = r.vec();
    u.standardizer.scale = r.vec();
    u.model.config.rounds = r.u64();
    u.model.config.max_depth = r.u64();
    u.model.config.learning_rate = r.f64();
    u.model.config.min_samples_leaf = r.u64();
    u.model.config.leaf_lambda = r.f64();
    u.model.trees.resize(r.u64());
    for (GbdtTree& t : u.model.trees) {
        t.nodes.resize(r.u64());
        for (GbdtNode& n : t.nodes) {
            n.feature = static_cast<std::int32_t>(r.u32());
            n.threshold = r.f64();
            n.left = static_cast<std::int32_t>(r.u32());
            n.right = static_cast<std::int32_t>(r.u32());
            n.value = r.f64();
        }
    }
    return u;
}

} // namespace

std::vector<std::uint8_t> serialize_detector(const TrainedDetector& det) {
    ByteWriter w;
    w.u32(kBlobMagic);
    w.u32(1); // format version
    w.u32(static_cast<std::uint32_t>(det.kind));
    w.u64(det.seed);
    write_linear(w, det.linear);
    write_tree(w, det.tree);
    write_linear(w, det.base_lin);
    write_tree(w, det.base_tree);
    write_linear(w, det.meta);
    w.u64(det.branches.size());
    for (const RelationBranch& b : det.branches) {
        w.vec(b.projection.center);
        w.mat(b.projection.basis);
        w.u64(b.projection.effective_rank);
        write_linear(w, b.lin);
        write_tree(w, b.tree);
    }
    write_linear(w, det.rel_final);
    return std::move(w.bytes);
}

TrainedDetector deserialize_detector(const std::vector<std::uint8_t>& blob) {
    ByteReader r{blob};
    if (r.u32() != kBlobMagic) {
        throw std::runtime_error("deserialize_detector: bad magic");
    }
    if (r.u32() != 1) {
        throw std::runtime_error("deserialize_detector: unsupported version");
    }
    TrainedDetector det;
    det.kind = static_cast<DetectorKind>(r.u32());
    det.seed = r.u64();
    det.linear = read_linear(r);
    det.tree = read_tree(r);
    det.base_lin = read_linear(r);
    det.base_tree = read_tree(r);
    det.meta = read_linear(r);
    det.branches.resize(r.u64());
    for (RelationBranch& b : det.branches) {
        b.projection.center = r.vec();
        b.projection.basis = r.mat();
        b.projection.effective_rank = r.u64();
        b.lin = read_linear(r);
        b.tree = read_tree(r);
    }
    det.rel_final = read_linear(r);
    return det;
}

} // namespace signgad
