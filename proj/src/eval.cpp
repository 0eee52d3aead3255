#include "spidet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace spidet {

ConfusionCounts confusion(const std::vector<std::uint8_t>& predicted,
                          const std::vector<std::uint8_t>& actual) {
    if (predicted.size() != actual.size()) throw Error("confusion: size mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (actual[i]) {
            (predicted[i] ? c.tp : c.fn)++;
        } else {
            (predicted[i] ? c.fp : c.tn)++;
        }
    }
    return c;
}

double f1(const ConfusionCounts& counts, bool* degenerate) {
    const double denom = static_cast<double>(2 * counts.tp + counts.fp + counts.fn);
    if (degenerate) *degenerate = denom == 0;
    if (denom == 0) return 0.0;
    return 2.0 * static_cast<double>(counts.tp) / denom;
}

double macro_f1(const ConfusionCounts& counts, bool* degenerate) {
    // negative class scored as its own positive: roles of tp/tn and fp/fn swap
    ConfusionCounts neg{counts.tn, counts.fn, counts.tp, counts.fp};
    bool d1 = false, d2 = false;
    double pos = f1(counts, &d1);
    double negf = f1(neg, &d2);
    if (degenerate) *degenerate = d1 || d2;
    return 0.5 * (pos + negf);
}

RocCurve roc(const std::vector<double>& scores, const std::vector<std::uint8_t>& targets) {
    if (scores.size() != targets.size()) throw Error("roc: size mismatch");
    std::int64_t n_pos = 0;
    for (std::uint8_t t : targets) n_pos += t;
    std::int64_t n_neg = static_cast<std::int64_t>(targets.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("roc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    std::int64_t tp = 0, fp = 0;
    double auc = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        // one step per tied-score group
        double s = scores[order[i]];
        std::int64_t d_tp = 0, d_fp = 0;
        while (i < order.size() && scores[order[i]] == s) {
            (targets[order[i]] ? d_tp : d_fp)++;
            ++i;
        }
        double fpr0 = static_cast<double>(fp) / static_cast<double>(n_neg);
        double tpr0 = static_cast<double>(tp) / static_cast<double>(n_pos);
        tp += d_tp;
        fp += d_fp;
        double fpr1 = static_cast<double>(fp) / static_cast<double>(n_neg);
        double tpr1 = static_cast<double>(tp) / static_cast<double>(n_pos);
        auc += (fpr1 - fpr0) * (tpr0 + tpr1) * 0.5;
        curve.points.emplace_back(fpr1, tpr1);
    }
    curve.auc = auc;
    return curve;
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot write " + path);
    std::fputs("fpr,tpr\n", f);
    for (const auto& [fpr, tpr] : curve.points) std::fprintf(f, "%.9g,%.9g\n", fpr, tpr);
    bool bad = std::ferror(f) != 0;
    std::fclose(f);
    if (bad) throw IoError("write failed: " + path);
}

double threshold_select(const std::vector<double>& scores,
                        const std::vector<std::uint8_t>& targets) {
    if (scores.size() != targets.size()) throw Error("threshold_select: size mismatch");
    if (scores.empty()) throw DataError("threshold_select: no scores");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::int64_t total_pos = 0;
    for (std::uint8_t t : targets) total_pos += t;

    // sweep thresholds downward; at threshold = s, everything with score >= s
    // is positive
    double best_threshold = scores[order[0]];
    double best_f1 = -1;
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (targets[order[i]] ? tp : fp)++;
            ++i;
        }
        ConfusionCounts c{tp, fp, 0, total_pos - tp};
        double score = f1(c);
        // descending sweep: taking >= on ties leaves the lowest maximizer
        if (score >= best_f1) {
            best_f1 = score;
            best_threshold = s;
        }
    }
    return best_threshold;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint8_t> apply_threshold(const std::vector<double>& scores, double threshold) {
    std::vector<std::uint8_t> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
    return out;
}

bool single_class(const std::vector<std::uint8_t>& v) {
    if (v.empty()) return true;
    for (std::uint8_t x : v) {
        if (x != v[0]) return false;
    }
    return true;
}

// inner 80/20 split of the fold's training rows, honoring the same board
// grouping and stratification rules as the outer split
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> inner_split(
    const FeatureTable& train_table, double validation_fraction, std::uint64_t seed,
    bool stratified) {
    int folds = std::max(2, static_cast<int>(std::lround(1.0 / validation_fraction)));
    if (train_table.rows() < static_cast<std::size_t>(folds)) {
        return {{}, {}};
    }
    bool strat = stratified;
    if (strat) {
        std::int64_t pos = 0;
        for (std::uint8_t t : *train_table.target) pos += t;
        if (pos < folds) strat = false;
    }
    std::vector<FoldIndices> inner = kfold_split(train_table, folds, seed, strat);
    return {inner[0].train, inner[0].test};
}

}  // namespace

EvalReport cross_validate(const FeatureTable& table, const TrainConfig& config, int k,
                          const CvOptions& options) {
    if (!table.has_target()) throw TrainError("cross_validate: table has no target");
    config.validate();

    std::int64_t total_pos = 0;
    for (std::uint8_t t : *table.target) total_pos += t;

    bool stratified = options.stratified;
    if (stratified && total_pos < k && options.allow_stratified_fallback) stratified = false;

    std::vector<FoldIndices> folds = kfold_split(table, k, config.seed, stratified);

    EvalReport report;
    report.folds.resize(folds.size());
    report.oof_scores.assign(table.rows(), 0.0);
    report.oof_verdicts.assign(table.rows(), 0);
    report.fold_of_row.assign(table.rows(), -1);
    report.row_keys = table.row_keys;

    for (std::size_t f = 0; f < folds.size(); ++f) {
        FeatureTable train_tbl = subset_rows(table, folds[f].train);
        FeatureTable test_tbl = subset_rows(table, folds[f].test);

        FoldEval fe;
        fe.fold = static_cast<int>(f);

        if (config.feature_top_k) {
            TopKSelection sel = select_top_k_features(train_tbl, config, options.jobs);
            fe.kept_features = sel.kept;
            train_tbl = std::move(sel.table);
            test_tbl = select_columns(test_tbl, train_tbl.column_names);
        }

        // threshold from an inner split so the test fold stays untouched
        auto [inner_train, inner_val] =
            inner_split(train_tbl, options.inner_validation_fraction,
                        mix64(config.seed, 1000 + f), stratified);
        double threshold = 0.5;
        bool from_inner = false;
        if (!inner_train.empty() && !inner_val.empty()) {
            FeatureTable it = subset_rows(train_tbl, inner_train);
            FeatureTable iv = subset_rows(train_tbl, inner_val);
            if (!single_class(*it.target) && !single_class(*iv.target)) {
                TrainConfig inner_cfg = config;
                inner_cfg.feature_top_k.reset();
                BoostedModel inner_model = train(it, inner_cfg, options.jobs);
                threshold = threshold_select(predict(inner_model, iv), *iv.target);
                from_inner = true;
            }
        }

        TrainConfig fold_cfg = config;
        fold_cfg.feature_top_k.reset();
        BoostedModel model = train(train_tbl, fold_cfg, options.jobs);
        if (!from_inner) {
            // fallback: threshold on the training rows themselves
            threshold = threshold_select(predict(model, train_tbl), *train_tbl.target);
        }
        std::vector<double> scores = predict(model, test_tbl);

        fe.threshold = threshold;
        fe.threshold_from_inner_split = from_inner;
        std::vector<std::uint8_t> verdicts = apply_threshold(scores, threshold);
        fe.counts = confusion(verdicts, *test_tbl.target);
        fe.f1 = f1(fe.counts);
        fe.macro_f1 = macro_f1(fe.counts);
        if (!single_class(*test_tbl.target)) fe.auc = roc(scores, *test_tbl.target).auc;

        for (std::size_t i = 0; i < folds[f].test.size(); ++i) {
            std::size_t row = folds[f].test[i];
            report.oof_scores[row] = scores[i];
            report.oof_verdicts[row] = verdicts[i];
            report.fold_of_row[row] = static_cast<int>(f);
        }
        report.pooled_counts += fe.counts;
        report.folds[f] = std::move(fe);
        if (options.keep_models) report.fold_models.push_back(std::move(model));
    }

    report.pooled_f1 = f1(report.pooled_counts);
    report.pooled_macro_f1 = macro_f1(report.pooled_counts);
    if (!single_class(*table.target)) {
        report.pooled_auc = roc(report.oof_scores, *table.target).auc;
    }
    return report;
}

std::string EvalReport::to_text() const {
    std::string out;
    for (const auto& fe : folds) {
        out += format("fold %d threshold %.9g f1 %.6f macro_f1 %.6f", fe.fold, fe.threshold,
                      fe.f1, fe.macro_f1);
        if (fe.auc) {
            out += format(" auc %.6f", *fe.auc);
        } else {
            out += " auc degenerate";
        }
        out += format(" tp %lld fp %lld tn %lld fn %lld", static_cast<long long>(fe.counts.tp),
                      static_cast<long long>(fe.counts.fp), static_cast<long long>(fe.counts.tn),
                      static_cast<long long>(fe.counts.fn));
        if (!fe.threshold_from_inner_split) out += " threshold_fallback train_rows";
        out += "\n";
        if (!fe.kept_features.empty()) {
            out += format("fold %d kept_features", fe.fold);
            for (const auto& name : fe.kept_features) out += " " + name;
            out += "\n";
        }
    }
    out += format("pooled f1 %.6f macro_f1 %.6f", pooled_f1, pooled_macro_f1);
    if (pooled_auc) {
        out += format(" auc %.6f", *pooled_auc);
    } else {
        out += " auc degenerate";
    }
    out += format(" tp %lld fp %lld tn %lld fn %lld\n", static_cast<long long>(pooled_counts.tp),
                  static_cast<long long>(pooled_counts.fp),
                  static_cast<long long>(pooled_counts.tn),
                  static_cast<long long>(pooled_counts.fn));
    return out;
}

}  // namespace spidet
