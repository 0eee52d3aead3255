#include "spidet/gbdt.hpp"

#include "spidet/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace spidet {

double Tree::eval(std::span<const double> row) const {
    int node = 0;
    while (!nodes[static_cast<std::size_t>(node)].is_leaf) {
        const TreeNode& n = nodes[static_cast<std::size_t>(node)];
        node = row[static_cast<std::size_t>(n.feature_index)] < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].weight;
}

int Tree::depth() const {
    // iterative preorder with depth bookkeeping
    int max_depth = 0;
    std::vector<std::pair<int, int>> stack = {{0, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        max_depth = std::max(max_depth, d);
        const TreeNode& n = nodes[static_cast<std::size_t>(id)];
        if (!n.is_leaf) {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        }
    }
    return max_depth;
}

double BoostedModel::score_row(std::span<const double> row) const {
    double s = base_score;
    for (const auto& tree : trees) s += learning_rate * tree.eval(row);
    return s;
}

void TrainConfig::validate() const {
    if (max_depth < 1 || max_depth > 12) throw UsageError("max_depth must be in [1, 12]");
    if (num_rounds < 0) throw UsageError("num_rounds must be >= 0");
    if (!(learning_rate > 0)) throw UsageError("learning_rate must be positive");
    if (!(l2_leaf_reg >= 0)) throw UsageError("l2_leaf_reg must be >= 0");
    if (!(min_split_gain >= 0)) throw UsageError("min_split_gain must be >= 0");
    if (!(min_child_hessian >= 0)) throw UsageError("min_child_hessian must be >= 0");
    if (positive_class_weight && !(*positive_class_weight > 0)) {
        throw UsageError("positive_class_weight must be positive");
    }
    if (feature_top_k && *feature_top_k <= 0) throw UsageError("feature_top_k must be positive");
    if (!(row_subsample > 0 && row_subsample <= 1)) throw UsageError("row_subsample must be in (0,1]");
    if (!(col_subsample > 0 && col_subsample <= 1)) throw UsageError("col_subsample must be in (0,1]");
    if (histogram_bins < 2 || histogram_bins > 65535) {
        throw UsageError("histogram_bins must be in [2, 65535]");
    }
}

namespace {

struct SplitCandidate {
    double gain = -1;  // valid candidates have gain > 0
    int feature = -1;
    double threshold = 0;
    double g_left = 0;
    double h_left = 0;

    bool better_than(const SplitCandidate& other) const {
        if (gain != other.gain) return gain > other.gain;
        if (feature != other.feature) return feature < other.feature;
        return threshold < other.threshold;
    }
};

struct BuildNode {
    int node_id = 0;
    std::size_t begin = 0;  // segment inside every feature order array
    std::size_t end = 0;
    double sum_g = 0;
    double sum_h = 0;
};

class Trainer {
public:
    Trainer(const FeatureTable& table, const TrainConfig& config, unsigned jobs)
        : table_(table), config_(config), jobs_(jobs == 0 ? default_jobs() : jobs) {
        n_rows_ = table.rows();
        n_features_ = table.cols();
        lambda_ = config.l2_leaf_reg;
        gamma_ = config.min_split_gain;

        // column-major copy; the split scan walks one feature at a time
        columns_.resize(n_features_);
        for (std::size_t f = 0; f < n_features_; ++f) columns_[f].resize(n_rows_);
        for (std::size_t r = 0; r < n_rows_; ++r) {
            auto row = table.row(r);
            for (std::size_t f = 0; f < n_features_; ++f) columns_[f][r] = row[f];
        }

        const auto& target = *table.target;
        std::size_t n_pos = 0;
        for (std::uint8_t t : target) n_pos += t;
        std::size_t n_neg = n_rows_ - n_pos;
        if (n_pos == 0 || n_neg == 0) {
            throw TrainError("training target has a single class");
        }
        double pos_weight = config.positive_class_weight
                                ? *config.positive_class_weight
                                : static_cast<double>(n_neg) / static_cast<double>(n_pos);
        weights_.resize(n_rows_);
        double sum_w_pos = 0, sum_w_neg = 0;
        for (std::size_t r = 0; r < n_rows_; ++r) {
            weights_[r] = target[r] ? pos_weight : 1.0;
            (target[r] ? sum_w_pos : sum_w_neg) += weights_[r];
        }
        base_score_ = std::log(sum_w_pos / sum_w_neg);

        presort();
        if (config.histogram_mode) build_bins();
    }

    BoostedModel run(std::vector<double>* loss_trace) {
        BoostedModel model;
        model.base_score = base_score_;
        model.learning_rate = config_.learning_rate;
        model.feature_names = table_.column_names;
        model.config = config_;

        scores_.assign(n_rows_, base_score_);
        grad_.resize(n_rows_);
        hess_.resize(n_rows_);
        if (loss_trace) loss_trace->push_back(loss());

        Rng round_rng(mix64(config_.seed, 0x67626474ULL));  // "gbdt"
        for (int round = 0; round < config_.num_rounds; ++round) {
            const auto& target = *table_.target;
            for (std::size_t r = 0; r < n_rows_; ++r) {
                double p = sigmoid(scores_[r]);
                grad_[r] = weights_[r] * (p - static_cast<double>(target[r]));
                hess_[r] = weights_[r] * p * (1.0 - p);
            }
            Tree tree =
                config_.histogram_mode ? build_tree_hist(round_rng) : build_tree(round_rng);
            // apply: every row sits on a leaf via position_
            for (std::size_t r = 0; r < n_rows_; ++r) {
                if (row_in_tree_[r]) {
                    scores_[r] += config_.learning_rate *
                                  tree.nodes[static_cast<std::size_t>(position_[r])].weight;
                } else {
                    scores_[r] += config_.learning_rate * tree.eval(table_.row(r));
                }
            }
            model.trees.push_back(std::move(tree));
            double l = loss();
            if (!std::isfinite(l)) {
                throw TrainError(format("non-finite training loss at round %d", round));
            }
            if (loss_trace) loss_trace->push_back(l);
        }
        return model;
    }

private:
    void presort() {
        master_order_.resize(n_features_);
        parallel_for(n_features_, jobs_, [&](std::size_t f) {
            const double* col = columns_[f].data();
            std::vector<std::pair<double, std::int32_t>> keyed(n_rows_);
            for (std::size_t r = 0; r < n_rows_; ++r) {
                keyed[r] = {col[r], static_cast<std::int32_t>(r)};
            }
            // pair comparison = ascending value, row index as tiebreak
            std::sort(keyed.begin(), keyed.end());
            auto& order = master_order_[f];
            order.resize(n_rows_);
            for (std::size_t r = 0; r < n_rows_; ++r) order[r] = keyed[r].second;
        });
    }

    double loss() const {
        const auto& target = *table_.target;
        double total = 0;
        for (std::size_t r = 0; r < n_rows_; ++r) {
            double s = scores_[r];
            total += weights_[r] * (log1pexp(s) - static_cast<double>(target[r]) * s);
        }
        return total;
    }

    Tree build_tree(Rng& round_rng) {
        // per-round row/column subsampling (defaults keep everything)
        row_in_tree_.assign(n_rows_, 1);
        if (config_.row_subsample < 1.0) {
            for (std::size_t r = 0; r < n_rows_; ++r) {
                row_in_tree_[r] = round_rng.bernoulli(config_.row_subsample) ? 1 : 0;
            }
        }
        feature_in_tree_.assign(n_features_, 1);
        if (config_.col_subsample < 1.0) {
            for (std::size_t f = 0; f < n_features_; ++f) {
                feature_in_tree_[f] = round_rng.bernoulli(config_.col_subsample) ? 1 : 0;
            }
        }

        // working copies of the per-feature orders, filtered to sampled rows
        orders_.resize(n_features_);
        std::size_t n_active = 0;
        if (config_.row_subsample < 1.0) {
            for (std::size_t r = 0; r < n_rows_; ++r) n_active += row_in_tree_[r];
        } else {
            n_active = n_rows_;
        }
        parallel_for(n_features_, jobs_, [&](std::size_t f) {
            auto& order = orders_[f];
            if (config_.row_subsample >= 1.0) {
                order = master_order_[f];
            } else {
                order.clear();
                order.reserve(n_active);
                for (std::int32_t r : master_order_[f]) {
                    if (row_in_tree_[static_cast<std::size_t>(r)]) order.push_back(r);
                }
            }
        });

        Tree tree;
        position_.assign(n_rows_, 0);

        double root_g = 0, root_h = 0;
        for (std::size_t r = 0; r < n_rows_; ++r) {
            if (row_in_tree_[r]) {
                root_g += grad_[r];
                root_h += hess_[r];
            }
        }
        tree.nodes.push_back(TreeNode{});
        std::vector<BuildNode> frontier = {{0, 0, n_active, root_g, root_h}};

        for (int depth = 0; depth < config_.max_depth && !frontier.empty(); ++depth) {
            // best split per frontier node; parallel over (node, feature)
            std::vector<SplitCandidate> best(frontier.size());
            std::vector<SplitCandidate> scratch(frontier.size() * n_features_);
            parallel_for(frontier.size() * n_features_, jobs_, [&](std::size_t wi) {
                std::size_t ni = wi / n_features_;
                std::size_t f = wi % n_features_;
                if (!feature_in_tree_[f]) return;
                scratch[wi] = scan_feature(frontier[ni], f);
            });
            for (std::size_t ni = 0; ni < frontier.size(); ++ni) {
                for (std::size_t f = 0; f < n_features_; ++f) {
                    const SplitCandidate& c = scratch[ni * n_features_ + f];
                    if (c.feature >= 0 && (best[ni].feature < 0 || c.better_than(best[ni]))) {
                        best[ni] = c;
                    }
                }
            }

            std::vector<BuildNode> next;
            for (std::size_t ni = 0; ni < frontier.size(); ++ni) {
                BuildNode& nb = frontier[ni];
                const SplitCandidate& c = best[ni];
                if (c.feature < 0 || !(c.gain > 0)) {
                    finalize_leaf(tree, nb);
                    continue;
                }
                int left_id = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back(TreeNode{});
                int right_id = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back(TreeNode{});
                TreeNode& split = tree.nodes[static_cast<std::size_t>(nb.node_id)];
                split.is_leaf = false;
                split.feature_index = c.feature;
                split.threshold = c.threshold;
                split.left = left_id;
                split.right = right_id;
                split.gain = c.gain;

                // route rows, then stable-partition every feature order array
                const double* col = columns_[static_cast<std::size_t>(c.feature)].data();
                const auto& seg = orders_[0];
                std::size_t n_left = 0;
                for (std::size_t i = nb.begin; i < nb.end; ++i) {
                    std::int32_t row = seg[i];
                    bool go_left = col[row] < c.threshold;
                    position_[static_cast<std::size_t>(row)] = go_left ? left_id : right_id;
                    n_left += go_left ? 1 : 0;
                }
                parallel_for(n_features_, jobs_, [&](std::size_t f) {
                    partition_segment(orders_[f], nb.begin, nb.end, left_id);
                });

                next.push_back({left_id, nb.begin, nb.begin + n_left, c.g_left, c.h_left});
                next.push_back({right_id, nb.begin + n_left, nb.end, nb.sum_g - c.g_left,
                                nb.sum_h - c.h_left});
            }
            frontier = std::move(next);
        }
        for (BuildNode& nb : frontier) finalize_leaf(tree, nb);
        return tree;
    }

    void finalize_leaf(Tree& tree, const BuildNode& nb) {
        TreeNode& node = tree.nodes[static_cast<std::size_t>(nb.node_id)];
        node.is_leaf = true;
        node.weight = -nb.sum_g / (nb.sum_h + lambda_);
    }

    // equal-frequency bin boundaries from the presorted columns; thresholds
    // are midpoints between neighboring distinct values, like the exact mode
    void build_bins() {
        const int bins = config_.histogram_bins;
        bin_edges_.resize(n_features_);
        bin_ids_.resize(n_features_);
        parallel_for(n_features_, jobs_, [&](std::size_t f) {
            const double* col = columns_[f].data();
            const auto& order = master_order_[f];
            auto& edges = bin_edges_[f];
            edges.clear();
            for (int b = 1; b < bins; ++b) {
                std::size_t rank =
                    (n_rows_ * static_cast<std::size_t>(b)) / static_cast<std::size_t>(bins);
                if (rank == 0 || rank >= n_rows_) continue;
                double lo = col[order[rank - 1]];
                double hi = col[order[rank]];
                if (lo < hi) {
                    double mid = lo + (hi - lo) * 0.5;
                    if (lo < mid && mid <= hi && (edges.empty() || mid > edges.back())) {
                        edges.push_back(mid);
                    }
                }
            }
            auto& ids = bin_ids_[f];
            ids.resize(n_rows_);
            for (std::size_t r = 0; r < n_rows_; ++r) {
                // rows with value < edges[k] land in bins 0..k
                std::size_t b = static_cast<std::size_t>(
                    std::upper_bound(edges.begin(), edges.end(), col[r]) - edges.begin());
                ids[r] = static_cast<std::uint16_t>(b);
            }
        });
    }

    SplitCandidate scan_feature_hist(const BuildNode& nb, std::size_t f) const {
        SplitCandidate best;
        const auto& edges = bin_edges_[f];
        if (edges.empty() || nb.end - nb.begin < 2) return best;
        const auto& ids = bin_ids_[f];
        const std::size_t n_bins = edges.size() + 1;
        std::vector<double> hist_g(n_bins, 0.0), hist_h(n_bins, 0.0);
        for (std::size_t i = nb.begin; i < nb.end; ++i) {
            std::int32_t row = row_list_[i];
            std::size_t b = ids[static_cast<std::size_t>(row)];
            hist_g[b] += grad_[static_cast<std::size_t>(row)];
            hist_h[b] += hess_[static_cast<std::size_t>(row)];
        }
        const double parent_score = nb.sum_g * nb.sum_g / (nb.sum_h + lambda_);
        double g_acc = 0, h_acc = 0;
        for (std::size_t b = 0; b < edges.size(); ++b) {
            g_acc += hist_g[b];
            h_acc += hist_h[b];
            double h_left = h_acc, h_right = nb.sum_h - h_acc;
            if (h_left < config_.min_child_hessian || h_right < config_.min_child_hessian) {
                continue;
            }
            double g_left = g_acc, g_right = nb.sum_g - g_acc;
            double gain = 0.5 * (g_left * g_left / (h_left + lambda_) +
                                 g_right * g_right / (h_right + lambda_) - parent_score) -
                          gamma_;
            SplitCandidate cand{gain, static_cast<int>(f), edges[b], g_left, h_left};
            if (best.feature < 0 || cand.better_than(best)) best = cand;
        }
        return best;
    }

    Tree build_tree_hist(Rng& round_rng) {
        row_in_tree_.assign(n_rows_, 1);
        if (config_.row_subsample < 1.0) {
            for (std::size_t r = 0; r < n_rows_; ++r) {
                row_in_tree_[r] = round_rng.bernoulli(config_.row_subsample) ? 1 : 0;
            }
        }
        feature_in_tree_.assign(n_features_, 1);
        if (config_.col_subsample < 1.0) {
            for (std::size_t f = 0; f < n_features_; ++f) {
                feature_in_tree_[f] = round_rng.bernoulli(config_.col_subsample) ? 1 : 0;
            }
        }

        row_list_.clear();
        row_list_.reserve(n_rows_);
        for (std::size_t r = 0; r < n_rows_; ++r) {
            if (row_in_tree_[r]) row_list_.push_back(static_cast<std::int32_t>(r));
        }

        Tree tree;
        position_.assign(n_rows_, 0);
        double root_g = 0, root_h = 0;
        for (std::int32_t row : row_list_) {
            root_g += grad_[static_cast<std::size_t>(row)];
            root_h += hess_[static_cast<std::size_t>(row)];
        }
        tree.nodes.push_back(TreeNode{});
        std::vector<BuildNode> frontier = {{0, 0, row_list_.size(), root_g, root_h}};

        for (int depth = 0; depth < config_.max_depth && !frontier.empty(); ++depth) {
            std::vector<SplitCandidate> best(frontier.size());
            std::vector<SplitCandidate> scratch(frontier.size() * n_features_);
            parallel_for(frontier.size() * n_features_, jobs_, [&](std::size_t wi) {
                std::size_t ni = wi / n_features_;
                std::size_t f = wi % n_features_;
                if (!feature_in_tree_[f]) return;
                scratch[wi] = scan_feature_hist(frontier[ni], f);
            });
            for (std::size_t ni = 0; ni < frontier.size(); ++ni) {
                for (std::size_t f = 0; f < n_features_; ++f) {
                    const SplitCandidate& c = scratch[ni * n_features_ + f];
                    if (c.feature >= 0 && (best[ni].feature < 0 || c.better_than(best[ni]))) {
                        best[ni] = c;
                    }
                }
            }

            std::vector<BuildNode> next;
            for (std::size_t ni = 0; ni < frontier.size(); ++ni) {
                BuildNode& nb = frontier[ni];
                const SplitCandidate& c = best[ni];
                if (c.feature < 0 || !(c.gain > 0)) {
                    finalize_leaf(tree, nb);
                    continue;
                }
                int left_id = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back(TreeNode{});
                int right_id = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back(TreeNode{});
                TreeNode& split = tree.nodes[static_cast<std::size_t>(nb.node_id)];
                split.is_leaf = false;
                split.feature_index = c.feature;
                split.threshold = c.threshold;
                split.left = left_id;
                split.right = right_id;
                split.gain = c.gain;

                const double* col = columns_[static_cast<std::size_t>(c.feature)].data();
                std::size_t n_left = 0;
                for (std::size_t i = nb.begin; i < nb.end; ++i) {
                    std::int32_t row = row_list_[i];
                    bool go_left = col[row] < c.threshold;
                    position_[static_cast<std::size_t>(row)] = go_left ? left_id : right_id;
                    n_left += go_left ? 1 : 0;
                }
                partition_segment(row_list_, nb.begin, nb.end, left_id);

                next.push_back({left_id, nb.begin, nb.begin + n_left, c.g_left, c.h_left});
                next.push_back({right_id, nb.begin + n_left, nb.end, nb.sum_g - c.g_left,
                                nb.sum_h - c.h_left});
            }
            frontier = std::move(next);
        }
        for (BuildNode& nb : frontier) finalize_leaf(tree, nb);
        return tree;
    }

    SplitCandidate scan_feature(const BuildNode& nb, std::size_t f) const {
        SplitCandidate best;
        if (nb.end - nb.begin < 2) return best;
        const double* col = columns_[f].data();
        const auto& order = orders_[f];
        const double parent_score = nb.sum_g * nb.sum_g / (nb.sum_h + lambda_);

        double g_acc = 0, h_acc = 0;
        double prev = col[order[nb.begin]];
        for (std::size_t i = nb.begin; i < nb.end; ++i) {
            std::int32_t row = order[i];
            double v = col[row];
            if (v != prev) {
                double mid = prev + (v - prev) * 0.5;
                if (prev < mid && mid <= v) {
                    double h_left = h_acc, h_right = nb.sum_h - h_acc;
                    if (h_left >= config_.min_child_hessian &&
                        h_right >= config_.min_child_hessian) {
                        double g_left = g_acc, g_right = nb.sum_g - g_acc;
                        double gain = 0.5 * (g_left * g_left / (h_left + lambda_) +
                                             g_right * g_right / (h_right + lambda_) -
                                             parent_score) -
                                      gamma_;
                        SplitCandidate cand{gain, static_cast<int>(f), mid, g_left, h_left};
                        if (best.feature < 0 || cand.better_than(best)) best = cand;
                    }
                }
                prev = v;
            }
            g_acc += grad_[static_cast<std::size_t>(row)];
            h_acc += hess_[static_cast<std::size_t>(row)];
        }
        return best;
    }

    void partition_segment(std::vector<std::int32_t>& order, std::size_t begin, std::size_t end,
                           int left_id) const {
        std::vector<std::int32_t> right_rows;
        right_rows.reserve(end - begin);
        std::size_t write = begin;
        for (std::size_t i = begin; i < end; ++i) {
            std::int32_t row = order[i];
            if (position_[static_cast<std::size_t>(row)] == left_id) {
                order[write++] = row;
            } else {
                right_rows.push_back(row);
            }
        }
        std::copy(right_rows.begin(), right_rows.end(),
                  order.begin() + static_cast<std::ptrdiff_t>(write));
    }

    const FeatureTable& table_;
    const TrainConfig& config_;
    unsigned jobs_;
    std::size_t n_rows_ = 0;
    std::size_t n_features_ = 0;
    double lambda_ = 1.0;
    double gamma_ = 0.0;
    double base_score_ = 0.0;

    std::vector<std::vector<double>> columns_;
    std::vector<std::vector<std::int32_t>> master_order_;
    std::vector<std::vector<std::int32_t>> orders_;
    std::vector<double> weights_;
    std::vector<double> scores_;
    std::vector<double> grad_;
    std::vector<double> hess_;
    std::vector<std::int32_t> position_;
    std::vector<std::uint8_t> row_in_tree_;
    std::vector<std::uint8_t> feature_in_tree_;

    // histogram mode
    std::vector<std::vector<double>> bin_edges_;
    std::vector<std::vector<std::uint16_t>> bin_ids_;
    std::vector<std::int32_t> row_list_;
};

}  // namespace

BoostedModel train(const FeatureTable& table, const TrainConfig& config, unsigned jobs,
                   std::vector<double>* loss_trace) {
    config.validate();
    if (!table.has_target()) throw TrainError("training table has no target");
    if (table.rows() == 0) throw TrainError("training table is empty");
    Trainer trainer(table, config, jobs);
    return trainer.run(loss_trace);
}

std::vector<double> predict(const BoostedModel& model, const FeatureTable& table) {
    if (model.feature_names != table.column_names) {
        std::string msg = "prediction column mismatch;";
        for (const auto& name : model.feature_names) {
            if (std::find(table.column_names.begin(), table.column_names.end(), name) ==
                table.column_names.end()) {
                msg += " missing:" + name;
            }
        }
        for (const auto& name : table.column_names) {
            if (std::find(model.feature_names.begin(), model.feature_names.end(), name) ==
                model.feature_names.end()) {
                msg += " extra:" + name;
            }
        }
        if (msg == "prediction column mismatch;") msg += " column order differs";
        throw DataError(msg);
    }
    std::vector<double> out(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out[r] = sigmoid(model.score_row(table.row(r)));
    }
    return out;
}

std::map<std::string, double> feature_importance(const BoostedModel& model) {
    std::map<std::string, double> gains;
    for (const auto& name : model.feature_names) gains[name] = 0.0;
    for (const auto& tree : model.trees) {
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf) {
                gains[model.feature_names[static_cast<std::size_t>(node.feature_index)]] +=
                    node.gain;
            }
        }
    }
    return gains;
}

TopKSelection select_top_k_features(const FeatureTable& table, const TrainConfig& config,
                                    unsigned jobs) {
    if (!config.feature_top_k) throw UsageError("select_top_k_features: feature_top_k not set");
    int k = *config.feature_top_k;
    if (k <= 0) throw UsageError("feature_top_k must be positive");
    if (static_cast<std::size_t>(k) > table.cols()) {
        throw UsageError("feature_top_k exceeds the column count");
    }

    TrainConfig probe = config;
    probe.feature_top_k.reset();
    BoostedModel model = train(table, probe, jobs);
    auto gains = feature_importance(model);

    // rank: gain desc, original column position asc
    std::vector<std::size_t> idx(table.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return gains[table.column_names[a]] > gains[table.column_names[b]];
    });

    TopKSelection out;
    for (int i = 0; i < k; ++i) out.kept.push_back(table.column_names[idx[static_cast<std::size_t>(i)]]);
    out.table = select_columns(table, out.kept);
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

void write_node_preorder(std::string& out, const Tree& tree, int id) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
    if (n.is_leaf) {
        out += format("leaf %s\n", format_double_exact(n.weight).c_str());
    } else {
        out += format("split %d %s %s\n", n.feature_index,
                      format_double_exact(n.threshold).c_str(),
                      format_double_exact(n.gain).c_str());
        write_node_preorder(out, tree, n.left);
        write_node_preorder(out, tree, n.right);
    }
}

struct Parser {
    std::istringstream in;
    std::int64_t line_no = 0;

    explicit Parser(const std::string& text) : in(text) {}

    std::string next_line() {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return line;
        }
        throw DataError("model text: unexpected end of input");
    }

    [[noreturn]] void fail(const std::string& what) {
        throw DataError(format("model text line %lld: %s", static_cast<long long>(line_no),
                               what.c_str()));
    }
};

int read_node(Parser& p, Tree& tree) {
    std::string line = p.next_line();
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    if (kind == "leaf") {
        double w;
        if (!(ls >> w)) p.fail("bad leaf line");
        tree.nodes[static_cast<std::size_t>(id)].weight = w;
    } else if (kind == "split") {
        int f;
        double thr, gain;
        if (!(ls >> f >> thr >> gain)) p.fail("bad split line");
        int left = read_node(p, tree);
        int right = read_node(p, tree);
        TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
        n.is_leaf = false;
        n.feature_index = f;
        n.threshold = thr;
        n.gain = gain;
        n.left = left;
        n.right = right;
    } else {
        p.fail("expected 'leaf' or 'split', got '" + kind + "'");
    }
    return id;
}

}  // namespace

std::string model_to_text(const BoostedModel& model) {
    std::string out = "spidet-model v1\n";
    out += format("learning_rate %s\n", format_double_exact(model.learning_rate).c_str());
    out += format("base_score %s\n", format_double_exact(model.base_score).c_str());
    const TrainConfig& c = model.config;
    out += format("config max_depth %d num_rounds %d l2_leaf_reg %s min_split_gain %s "
                  "min_child_hessian %s row_subsample %s col_subsample %s histogram_mode %d "
                  "histogram_bins %d seed %llu\n",
                  c.max_depth, c.num_rounds, format_double_exact(c.l2_leaf_reg).c_str(),
                  format_double_exact(c.min_split_gain).c_str(),
                  format_double_exact(c.min_child_hessian).c_str(),
                  format_double_exact(c.row_subsample).c_str(),
                  format_double_exact(c.col_subsample).c_str(),
                  static_cast<int>(c.histogram_mode), c.histogram_bins,
                  static_cast<unsigned long long>(c.seed));
    out += format("num_features %zu\n", model.feature_names.size());
    for (std::size_t i = 0; i < model.feature_names.size(); ++i) {
        out += format("feature %zu %s\n", i, model.feature_names[i].c_str());
    }
    out += format("num_trees %zu\n", model.trees.size());
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        out += format("tree %zu num_nodes %zu\n", t, model.trees[t].nodes.size());
        write_node_preorder(out, model.trees[t], 0);
    }
    return out;
}

BoostedModel model_from_text(const std::string& text) {
    Parser p(text);
    if (p.next_line() != "spidet-model v1") throw DataError("model text: bad version tag");
    BoostedModel model;

    auto expect_key = [&](const std::string& line, const char* key) -> std::istringstream {
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k != key) p.fail(format("expected '%s'", key));
        return ls;
    };

    {
        auto ls = expect_key(p.next_line(), "learning_rate");
        if (!(ls >> model.learning_rate)) p.fail("bad learning_rate");
    }
    {
        auto ls = expect_key(p.next_line(), "base_score");
        if (!(ls >> model.base_score)) p.fail("bad base_score");
    }
    {
        auto ls = expect_key(p.next_line(), "config");
        std::string key;
        TrainConfig& c = model.config;
        c.learning_rate = model.learning_rate;
        while (ls >> key) {
            if (key == "max_depth") ls >> c.max_depth;
            else if (key == "num_rounds") ls >> c.num_rounds;
            else if (key == "l2_leaf_reg") ls >> c.l2_leaf_reg;
            else if (key == "min_split_gain") ls >> c.min_split_gain;
            else if (key == "min_child_hessian") ls >> c.min_child_hessian;
            else if (key == "row_subsample") ls >> c.row_subsample;
            else if (key == "col_subsample") ls >> c.col_subsample;
            else if (key == "histogram_mode") {
                int v = 0;
                ls >> v;
                c.histogram_mode = v != 0;
            }
            else if (key == "histogram_bins") ls >> c.histogram_bins;
            else if (key == "seed") ls >> c.seed;
            else p.fail("unknown config key '" + key + "'");
            if (ls.fail()) p.fail("bad config value for '" + key + "'");
        }
    }
    std::size_t n_features = 0;
    {
        auto ls = expect_key(p.next_line(), "num_features");
        if (!(ls >> n_features)) p.fail("bad num_features");
    }
    for (std::size_t i = 0; i < n_features; ++i) {
        std::string line = p.next_line();
        std::istringstream ls(line);
        std::string key;
        std::size_t idx;
        if (!(ls >> key >> idx) || key != "feature" || idx != i) p.fail("bad feature line");
        std::string name;
        std::getline(ls, name);
        while (!name.empty() && name.front() == ' ') name.erase(name.begin());
        if (name.empty()) p.fail("empty feature name");
        model.feature_names.push_back(name);
    }
    std::size_t n_trees = 0;
    {
        auto ls = expect_key(p.next_line(), "num_trees");
        if (!(ls >> n_trees)) p.fail("bad num_trees");
    }
    for (std::size_t t = 0; t < n_trees; ++t) {
        std::string line = p.next_line();
        std::istringstream ls(line);
        std::string key, key2;
        std::size_t idx, n_nodes;
        if (!(ls >> key >> idx >> key2 >> n_nodes) || key != "tree" || key2 != "num_nodes" ||
            idx != t) {
            p.fail("bad tree line");
        }
        Tree tree;
        read_node(p, tree);
        if (tree.nodes.size() != n_nodes) p.fail("tree node count mismatch");
        for (const TreeNode& n : tree.nodes) {
            if (!n.is_leaf &&
                (n.feature_index < 0 ||
                 static_cast<std::size_t>(n.feature_index) >= model.feature_names.size())) {
                p.fail("split references unknown feature index");
            }
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

void save_model(const BoostedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << model_to_text(model);
    if (!out) throw IoError("write failed: " + path);
}

BoostedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_text(buf.str());
}

}  // namespace spidet
