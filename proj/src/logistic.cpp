#include "signgad/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace signgad {

double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

namespace {

double softplus(double t) {
    // log(1 + e^t) without overflow
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

std::vector<double> class_balanced_weights(const std::vector<int>& y) {
    std::size_t n_pos = 0;
    for (const int v : y) {
        n_pos += static_cast<std::size_t>(v);
    }
    const std::size_t n = y.size();
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("train_logistic: single-class training set");
    }
    const double w_pos = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
    const double w_neg = static_cast<double>(n) / (2.0 * static_cast<double>(n_neg));
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = y[i] == 1 ? w_pos : w_neg;
    }
    return w;
}

// Canonical row order (lexicographic feature vector, then label) so that
// floating-point accumulation does not depend on caller row order.
std::vector<std::size_t> canonical_order(const Matrix& x, const std::vector<int>& y) {
    std::vector<std::size_t> order(x.rows);
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
    return order;
}

} // namespace

double logistic_loss(const LogisticModel& model, const Matrix& x, const std::vector<int>& y,
                     double l2) {
    const std::vector<double> w = class_balanced_weights(y);
    double data = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto row = x.row(i);
        double m = model.bias;
        for (std::size_t c = 0; c < x.cols; ++c) {
            m += model.weights[c] * row[c];
        }
        data += w[i] * (y[i] == 1 ? softplus(-m) : softplus(m));
    }
    data /= static_cast<double>(x.rows);
    double reg = 0.0;
    for (const double v : model.weights) {
        reg += v * v;
    }
    return data + 0.5 * l2 * reg;
}

LogisticModel train_logistic(const Matrix& x, const std::vector<int>& y,
                             const LogisticConfig& cfg) {
    if (x.rows == 0 || x.rows != y.size()) {
        throw std::invalid_argument("train_logistic: empty input or label size mismatch");
    }
    const std::vector<std::size_t> order = canonical_order(x, y);
    Matrix xs = take_rows(x, order);
    std::vector<int> ys(y.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        ys[i] = y[order[i]];
    }
    const std::vector<double> w = class_balanced_weights(ys);

    const std::size_t n = xs.rows;
    const std::size_t p = xs.cols;
    const double inv_n = 1.0 / static_cast<double>(n);

    LogisticModel model;
    model.weights.assign(p, 0.0);

    std::vector<double> margins(n), probs(n), grad(p + 1), delta(p + 1);
    double loss = logistic_loss(model, xs, ys, cfg.l2);

    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = xs.row(i);
            double m = model.bias;
            for (std::size_t c = 0; c < p; ++c) {
                m += model.weights[c] * row[c];
            }
            margins[i] = m;
            probs[i] = sigmoid(m);
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = w[i] * (probs[i] - static_cast<double>(ys[i])) * inv_n;
            const auto row = xs.row(i);
            for (std::size_t c = 0; c < p; ++c) {
                grad[c] += r * row[c];
            }
            grad[p] += r;
        }
        for (std::size_t c = 0; c < p; ++c) {
            grad[c] += cfg.l2 * model.weights[c];
        }
        double gnorm = 0.0;
        for (const double gval : grad) {
            gnorm += gval * gval;
        }
        gnorm = std::sqrt(gnorm);
        if (gnorm <= cfg.grad_tol) {
            break;
        }

        // Newton direction from the (regularized) Hessian.
        Matrix hess(p + 1, p + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = w[i] * probs[i] * (1.0 - probs[i]) * inv_n;
            if (s == 0.0) {
                continue;
            }
            const auto row = xs.row(i);
            for (std::size_t a = 0; a < p; ++a) {
                const double sa = s * row[a];
                for (std::size_t b = a; b < p; ++b) {
                    hess.at(a, b) += sa * row[b];
                }
                hess.at(a, p) += sa;
            }
            hess.at(p, p) += s;
        }
        for (std::size_t a = 0; a < p; ++a) {
            hess.at(a, a) += cfg.l2;
        }
        for (std::size_t a = 0; a < p + 1; ++a) {
            hess.at(a, a) += 1e-12;
            for (std::size_t b = 0; b < a; ++b) {
                hess.at(a, b) = hess.at(b, a);
            }
        }

        std::vector<double> neg_grad(p + 1);
        for (std::size_t c = 0; c < p + 1; ++c) {
            neg_grad[c] = -grad[c];
        }
        if (!solve_spd(hess, neg_grad, delta)) {
            // Fall back to a plain gradient step.
            for (std::size_t c = 0; c < p + 1; ++c) {
                delta[c] = -grad[c];
            }
        }

        // Backtracking line search (Armijo).
        double dir_dot_grad = 0.0;
        for (std::size_t c = 0; c < p + 1; ++c) {
            dir_dot_grad += delta[c] * grad[c];
        }
        double step = 1.0;
        LogisticModel trial = model;
        bool improved = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t c = 0; c < p; ++c) {
                trial.weights[c] = model.weights[c] + step * delta[c];
            }
            trial.bias = model.bias + step * delta[p];
            const double trial_loss = logistic_loss(trial, xs, ys, cfg.l2);
            if (trial_loss <= loss + 1e-4 * step * dir_dot_grad) {
                model = trial;
                loss = trial_loss;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            break; // flat to machine precision
        }
    }
    return model;
}

std::vector<double> logistic_scores(const LogisticModel& model, const Matrix& x) {
    if (x.cols != model.weights.size()) {
        throw std::invalid_argument("logistic_scores: feature width mismatch");
    }
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto row = x.row(i);
        double m = model.bias;
        for (std::size_t c = 0; c < x.cols; ++c) {
            m += model.weights[c] * row[c];
        }
        out[i] = sigmoid(m);
    }
    return out;
}

} // namespace signgad
