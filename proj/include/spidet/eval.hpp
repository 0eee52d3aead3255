#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spidet/core.hpp"
#include "spidet/features.hpp"
#include "spidet/gbdt.hpp"

namespace spidet {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
};

ConfusionCounts confusion(const std::vector<std::uint8_t>& predicted,
                          const std::vector<std::uint8_t>& actual);

// F1 = 2TP / (2TP + FP + FN); 0 when the denominator vanishes, with the
// degenerate flag set.
double f1(const ConfusionCounts& counts, bool* degenerate = nullptr);

// unweighted mean of the positive-class and negative-class F1
double macro_f1(const ConfusionCounts& counts, bool* degenerate = nullptr);

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    double auc = 0;
};

// Threshold sweep over descending unique scores, ties grouped; AUC by the
// trapezoidal rule. Throws DataError when only one class is present.
RocCurve roc(const std::vector<double>& scores, const std::vector<std::uint8_t>& targets);

void write_roc_csv(const RocCurve& curve, const std::string& path);

// Threshold from the unique-score grid maximizing F1 (predict positive at
// score >= threshold); ties resolve to the lowest threshold.
double threshold_select(const std::vector<double>& scores,
                        const std::vector<std::uint8_t>& targets);

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct FoldEval {
    int fold = 0;
    double threshold = 0.5;
    ConfusionCounts counts;
    double f1 = 0;
    double macro_f1 = 0;
    std::optional<double> auc;  // absent when the test fold is single-class
    bool threshold_from_inner_split = true;
    std::vector<std::string> kept_features;  // when feature_top_k is active
};

struct EvalReport {
    std::vector<FoldEval> folds;
    ConfusionCounts pooled_counts;
    double pooled_f1 = 0;
    double pooled_macro_f1 = 0;
    std::optional<double> pooled_auc;

    // out-of-fold score/verdict per input row, aligned with row_keys
    std::vector<double> oof_scores;
    std::vector<std::uint8_t> oof_verdicts;
    std::vector<int> fold_of_row;
    std::vector<RowKey> row_keys;

    std::vector<BoostedModel> fold_models;  // only when CvOptions::keep_models

    std::string to_text() const;
};

struct CvOptions {
    bool stratified = true;
    bool allow_stratified_fallback = true;  // drop to unstratified when positives < k
    double inner_validation_fraction = 0.2;
    bool keep_models = false;
    unsigned jobs = 0;
};

// Five-fold style evaluation: per fold, the final model trains on the k-1
// training folds; its decision threshold comes from a secondary model fit on
// an inner 80/20 split of those folds, so the test fold never leaks into
// threshold choice. feature_top_k, when set, is re-selected inside each fold.
EvalReport cross_validate(const FeatureTable& table, const TrainConfig& config, int k = 5,
                          const CvOptions& options = {});

}  // namespace spidet
