#pragma once

#include <cstddef>
#include <vector>

#include "signgad/linalg.hpp"

namespace signgad {

struct LogisticConfig {
    double l2 = 1e-4;        // ridge on weights, not on the bias
    double grad_tol = 1e-6;  // L2 norm of the mean-loss gradient
    std::size_t max_iters = 1000;
};

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
};

// Class-balanced logistic regression: per-row weight n/(2*n_c) so each class
// contributes half of the (mean) data loss, plus an L2 penalty. Fitted with
// damped Newton steps. Input features are expected to be standardized by the
// caller. Requires both classes present.
//
// The optimization is invariant to input row order: rows are sorted into a
// canonical order internally so accumulated sums are bit-stable.
LogisticModel train_logistic(const Matrix& x, const std::vector<int>& y,
                             const LogisticConfig& cfg = {});

double sigmoid(double t);

std::vector<double> logistic_scores(const LogisticModel& model, const Matrix& x);

// Weighted mean log-loss plus the L2 term; exposed so tests can compare the
// fitted optimum against an independent solver on the same objective.
double logistic_loss(const LogisticModel& model, const Matrix& x, const std::vector<int>& y,
                     double l2);

} // namespace signgad
