#pragma once

#include <cstdint>
#include <vector>

namespace signgad {

struct AucResult {
    double value = 0.5;
    bool single_class = false; // 0.5 returned with a warning when true
};

// Mann-Whitney AUC with tied-rank handling: P(s+ > s-) + 0.5 P(s+ = s-).
// Single-class input yields 0.5 with the single_class flag set.
AucResult auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Unweighted mean of the per-class F1 over classes {0, 1}. A class whose F1
// denominator is zero contributes 0.
double f1_macro(const std::vector<int>& predictions, const std::vector<int>& labels);

struct Calibration {
    double tau = 0.5;
    double f1 = 0.0;
};

// Picks tau maximizing validation F1-macro over the candidate set made of 0,
// 1 and the midpoints between consecutive distinct sorted scores. That set
// realizes every achievable labeling of the given scores, so the returned
// threshold is the exact optimum; ties break toward the smallest tau.
// Requires both classes present.
Calibration calibrate_threshold(const std::vector<double>& scores, const std::vector<int>& labels);

// Binary predictions at a threshold: 1 iff score >= tau.
std::vector<int> predict_at(const std::vector<double>& scores, double tau);

} // namespace signgad
