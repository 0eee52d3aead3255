#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spidet/core.hpp"

namespace spidet {

// One node of a regression tree, arena-indexed. Split sends value < threshold
// left, >= threshold right.
struct TreeNode {
    bool is_leaf = true;
    std::int32_t feature_index = -1;
    double threshold = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double weight = 0;  // leaf output
    double gain = 0;    // realized split gain
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double eval(std::span<const double> row) const;
    int depth() const;
};

struct TrainConfig {
    int max_depth = 6;  // capped at 12
    int num_rounds = 100;
    double learning_rate = 0.1;
    double l2_leaf_reg = 1.0;      // lambda
    double min_split_gain = 0.0;   // gamma
    double min_child_hessian = 1.0;
    std::optional<double> positive_class_weight;  // nullopt = auto (N_neg / N_pos)
    std::optional<int> feature_top_k;
    double row_subsample = 1.0;
    double col_subsample = 1.0;
    // equal-frequency binned split search instead of exact enumeration;
    // faster on wide tables, not bit-equal to the exact mode
    bool histogram_mode = false;
    int histogram_bins = 256;
    std::uint64_t seed = 0;

    void validate() const;
};

struct BoostedModel {
    std::vector<Tree> trees;
    double base_score = 0;  // log-odds
    double learning_rate = 0.1;
    std::vector<std::string> feature_names;
    TrainConfig config;  // echoed into the serialized form

    // raw additive score: base_score + learning_rate * sum of tree outputs
    double score_row(std::span<const double> row) const;
};

// Second-order boosting with logistic loss and exact greedy splits. Ties break
// to the lowest feature index, then the lowest threshold, so the result does
// not depend on the worker count. Throws TrainError on a single-class target
// or a non-finite loss. loss_trace, when given, receives the weighted training
// logloss after every round (index 0 = before any tree).
BoostedModel train(const FeatureTable& table, const TrainConfig& config, unsigned jobs = 0,
                   std::vector<double>* loss_trace = nullptr);

// probabilities in (0,1); throws DataError listing column differences
std::vector<double> predict(const BoostedModel& model, const FeatureTable& table);

// total realized split gain per feature; never-split features map to 0
std::map<std::string, double> feature_importance(const BoostedModel& model);

struct TopKSelection {
    FeatureTable table;              // columns filtered, original order kept
    std::vector<std::string> kept;   // in descending-gain order
};

// Trains a probe model on everything, keeps the top feature_top_k columns by
// gain importance.
TopKSelection select_top_k_features(const FeatureTable& table, const TrainConfig& config,
                                    unsigned jobs = 0);

// self-describing text format; round-trips bit-exactly
std::string model_to_text(const BoostedModel& model);
BoostedModel model_from_text(const std::string& text);
void save_model(const BoostedModel& model, const std::string& path);
BoostedModel load_model(const std::string& path);

}  // namespace spidet
