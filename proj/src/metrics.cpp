#include "signgad/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace signgad {

AucResult auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.empty() || scores.size() != labels.size()) {
        throw std::invalid_argument("auc: empty input or size mismatch");
    }
    std::size_t n_pos = 0;
    for (const int y : labels) {
        if (y != 0 && y != 1) {
            throw std::invalid_argument("auc: labels must be binary");
        }
        n_pos += static_cast<std::size_t>(y);
    }
    const std::size_t n = scores.size();
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        return {0.5, true};
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups (1-based), then the rank-sum U statistic.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) {
            ++j;
        }
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) {
                pos_rank_sum += avg_rank;
            }
        }
        i = j + 1;
    }
    const double u = pos_rank_sum -
                     0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return {u / (static_cast<double>(n_pos) * static_cast<double>(n_neg)), false};
}

double f1_macro(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.empty() || predictions.size() != labels.size()) {
        throw std::invalid_argument("f1_macro: empty input or size mismatch");
    }
    double total = 0.0;
    for (const int cls : {0, 1}) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const bool pred_c = predictions[i] == cls;
            const bool true_c = labels[i] == cls;
            tp += static_cast<std::size_t>(pred_c && true_c);
            fp += static_cast<std::size_t>(pred_c && !true_c);
            fn += static_cast<std::size_t>(!pred_c && true_c);
        }
        const double denom = static_cast<double>(2 * tp + fp + fn);
        total += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    }
    return total / 2.0;
}

std::vector<int> predict_at(const std::vector<double>& scores, double tau) {
    std::vector<int> preds(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        preds[i] = scores[i] >= tau ? 1 : 0;
    }
    return preds;
}

Calibration calibrate_threshold(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.empty() || scores.size() != labels.size()) {
        throw std::invalid_argument("calibrate_threshold: empty input or size mismatch");
    }
    bool has_pos = false, has_neg = false;
    for (const int y : labels) {
        has_pos = has_pos || y == 1;
        has_neg = has_neg || y == 0;
    }
    if (!has_pos || !has_neg) {
        throw std::invalid_argument("calibrate_threshold: single-class validation labels");
    }

    std::vector<double> distinct = scores;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> candidates;
    candidates.reserve(distinct.size() + 1);
    candidates.push_back(0.0);
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
    }
    candidates.push_back(1.0);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    Calibration best{candidates.front(), -1.0};
    for (const double tau : candidates) {
        const double f1 = f1_macro(predict_at(scores, tau), labels);
        if (f1 > best.f1) { // strict: ties keep the smallest tau
            best = {tau, f1};
        }
    }
    return best;
}

} // namespace signgad
