#include "signgad/gbdt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "signgad/logistic.hpp"

namespace signgad {

namespace {

struct SplitChoice {
    bool found = false;
    double gain = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
};

double leaf_objective(double g, double h, double lambda) {
    return g * g / (h + lambda);
}

// Best exact split of `rows` by scanning every feature. The per-feature scan
// sorts (value, grad, hess) triples so the prefix sums do not depend on the
// incoming row order.
SplitChoice best_split(const Matrix& x, const std::vector<double>& grad,
                       const std::vector<double>& hess, const std::vector<std::size_t>& rows,
                       const GbdtConfig& cfg) {
    SplitChoice best;
    double g_total = 0.0, h_total = 0.0;
    for (const std::size_t r : rows) {
        g_total += grad[r];
        h_total += hess[r];
    }
    const double parent_obj = leaf_objective(g_total, h_total, cfg.leaf_lambda);

    std::vector<std::array<double, 3>> samples(rows.size());
    for (std::size_t f = 0; f < x.cols; ++f) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            samples[i] = {x.at(rows[i], f), grad[rows[i]], hess[rows[i]]};
        }
        std::sort(samples.begin(), samples.end());

        double g_left = 0.0, h_left = 0.0;
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            g_left += samples[i][1];
            h_left += samples[i][2];
            if (samples[i + 1][0] == samples[i][0]) {
                continue; // not a boundary between distinct values
            }
            const std::size_t n_left = i + 1;
            const std::size_t n_right = samples.size() - n_left;
            if (n_left < cfg.min_samples_leaf || n_right < cfg.min_samples_leaf) {
                continue;
            }
            const double g_right = g_total - g_left;
            const double h_right = h_total - h_left;
            const double gain = 0.5 * (leaf_objective(g_left, h_left, cfg.leaf_lambda) +
                                       leaf_objective(g_right, h_right, cfg.leaf_lambda) -
                                       parent_obj);
            // Strict improvement wins; exact ties keep the first candidate,
            // which is the lowest feature index and lowest threshold.
            if (!best.found || gain > best.gain) {
                best.found = true;
                best.gain = gain;
                best.feature = f;
                best.threshold = 0.5 * (samples[i][0] + samples[i + 1][0]);
            }
        }
    }
    return best;
}

struct TreeBuilder {
    const Matrix& x;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const GbdtConfig& cfg;
    GbdtTree tree;

    std::int32_t build(const std::vector<std::size_t>& rows, std::size_t depth) {
        double g = 0.0, h = 0.0;
        for (const std::size_t r : rows) {
            g += grad[r];
            h += hess[r];
        }
        const std::int32_t idx = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[idx].value = -g / (h + cfg.leaf_lambda);

        if (depth >= cfg.max_depth || rows.size() < 2 * cfg.min_samples_leaf) {
            return idx;
        }
        const SplitChoice split = best_split(x, grad, hess, rows, cfg);
        if (!split.found || split.gain <= 1e-12) {
            return idx;
        }
        std::vector<std::size_t> left, right;
        for (const std::size_t r : rows) {
            (x.at(r, split.feature) < split.threshold ? left : right).push_back(r);
        }
        tree.nodes[idx].feature = static_cast<std::int32_t>(split.feature);
        tree.nodes[idx].threshold = split.threshold;
        const std::int32_t l = build(left, depth + 1);
        const std::int32_t r = build(right, depth + 1);
        tree.nodes[idx].left = l;
        tree.nodes[idx].right = r;
        return idx;
    }
};

double tree_predict(const GbdtTree& tree, std::span<const double> row) {
    std::int32_t idx = 0;
    while (tree.nodes[idx].feature >= 0) {
        const GbdtNode& node = tree.nodes[idx];
        idx = row[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                           : node.right;
    }
    return tree.nodes[idx].value;
}

} // namespace

GbdtModel train_gbdt(const Matrix& x, const std::vector<int>& y, const GbdtConfig& cfg) {
    if (x.rows == 0 || x.rows != y.size()) {
        throw std::invalid_argument("train_gbdt: empty input or label size mismatch");
    }
    std::size_t n_pos = 0;
    for (const int v : y) {
        n_pos += static_cast<std::size_t>(v);
    }
    const std::size_t n = x.rows;
    if (n_pos == 0 || n_pos == n) {
        throw std::invalid_argument("train_gbdt: single-class training set");
    }
    const double w_pos = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
    const double w_neg = static_cast<double>(n) / (2.0 * static_cast<double>(n - n_pos));

    // Canonical row order for bit-stable accumulation.
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
    Matrix xs = take_rows(x, order);
    std::vector<double> weight(n);
    std::vector<int> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = y[order[i]];
        weight[i] = ys[i] == 1 ? w_pos : w_neg;
    }

    GbdtModel model;
    model.config = cfg;
    std::vector<double> margin(n, 0.0), grad(n), hess(n);
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);

    for (std::size_t round = 0; round < cfg.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = weight[i] * (p - static_cast<double>(ys[i]));
            hess[i] = weight[i] * p * (1.0 - p);
        }
        TreeBuilder builder{xs, grad, hess, cfg, {}};
        builder.build(all_rows, 0);
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += cfg.learning_rate * tree_predict(builder.tree, xs.row(i));
        }
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

std::vector<double> gbdt_margins(const GbdtModel& model, const Matrix& x) {
    std::vector<double> out(x.rows, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto row = x.row(i);
        double m = 0.0;
        for (const GbdtTree& tree : model.trees) {
            m += tree_predict(tree, row);
        }
        out[i] = model.config.learning_rate * m;
    }
    return out;
}

std::vector<double> gbdt_scores(const GbdtModel& model, const Matrix& x) {
    std::vector<double> out = gbdt_margins(model, x);
    for (double& v : out) {
        v = sigmoid(v);
    }
    return out;
}

} // namespace signgad
