#include "spidet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_map>

namespace spidet {

const char* to_string(FusionKind kind) {
    switch (kind) {
        case FusionKind::AnyPositive: return "any_positive";
        case FusionKind::MajorityVote: return "majority_vote";
        case FusionKind::MeanProbability: return "mean_probability";
    }
    return "?";
}

FusionKind parse_fusion(const std::string& text) {
    if (text == "any_positive") return FusionKind::AnyPositive;
    if (text == "majority_vote") return FusionKind::MajorityVote;
    if (text == "mean_probability") return FusionKind::MeanProbability;
    throw UsageError("unknown fusion rule '" + text +
                     "' (valid: any_positive, majority_vote, mean_probability)");
}

void RunConfig::validate() const {
    if (!level_pin && !level_component && !level_board) {
        throw UsageError("at least one level (pin, component, board) must be selected");
    }
    if (folds < 2) throw UsageError("folds must be at least 2");
    if (top_n_components && *top_n_components <= 0) {
        throw UsageError("top_n_components must be positive");
    }
    if (level_board && task != ClassificationTask::C1_AoiDefect && !allow_board_for_c23) {
        throw UsageError(
            "board level is disabled for c2/c3 (too few instances per class); "
            "set allow_board_for_c23 to override");
    }
    if (fusion.kind == FusionKind::MeanProbability &&
        !(fusion.mean_threshold >= 0 && fusion.mean_threshold <= 1)) {
        throw UsageError("fusion mean_threshold must be in [0,1]");
    }
    train.validate();
    schema.validate();
}

std::map<ComponentKey, Verdict> lift_pin_verdicts(
    const std::vector<std::pair<PinKey, Verdict>>& pin_verdicts) {
    std::map<ComponentKey, Verdict> out;
    for (const auto& [key, verdict] : pin_verdicts) {
        Verdict& v = out[component_of(key)];
        v.positive = v.positive || verdict.positive;
        v.probability = std::max(v.probability, verdict.probability);
    }
    return out;
}

std::vector<std::string> rank_components_by_defects(const std::vector<AoiRecord>& aoi) {
    if (aoi.empty()) throw DataError("rank_components_by_defects: no AOI records");
    std::map<std::string, std::int64_t> counts;
    for (const auto& rec : aoi) counts[rec.component_id]++;
    std::vector<std::string> out;
    out.reserve(counts.size());
    for (const auto& [id, n] : counts) out.push_back(id);
    std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return a < b;
    });
    return out;
}

BoardLayout derive_layout(const std::vector<PinRecord>& pins) {
    if (pins.empty()) throw DataError("derive_layout: no pin records");
    BoardLayout layout;
    layout.figures_per_panel = 1;
    std::map<std::string, std::set<std::int32_t>> pin_sets;
    std::vector<std::string> order;
    for (const auto& rec : pins) {
        auto [it, inserted] = pin_sets.try_emplace(rec.key.component_id);
        if (inserted) order.push_back(rec.key.component_id);
        it->second.insert(rec.key.pin_number);
        layout.figures_per_panel = std::max(layout.figures_per_panel, rec.key.figure_id);
    }
    for (const auto& id : order) {
        layout.components.push_back({id, static_cast<int>(pin_sets[id].size())});
    }
    return layout;
}

// ---------------------------------------------------------------------------
// run()
// ---------------------------------------------------------------------------

namespace {

// stage-tagged diagnostics, preserving the error type
template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const UsageError& e) {
        throw UsageError(format("[%s] %s", stage, e.what()));
    } catch (const DataError& e) {
        throw DataError(format("[%s] %s", stage, e.what()));
    } catch (const TrainError& e) {
        throw TrainError(format("[%s] %s", stage, e.what()));
    } catch (const IoError& e) {
        throw IoError(format("[%s] %s", stage, e.what()));
    }
}

FeatureTable attach_for_task(ClassificationTask task, const FeatureTable& table,
                             const std::vector<AoiRecord>& aoi, const EncodingConfig& encoding,
                             const std::string& board_target, JoinStats* stats) {
    switch (task) {
        case ClassificationTask::C1_AoiDefect:
            return attach_labels_c1(table, aoi, board_target, stats);
        case ClassificationTask::C2_OperatorLabel:
            return attach_labels_c2(table, aoi, encoding, board_target, stats);
        case ClassificationTask::C3_RepairLabel:
            return attach_labels_c3(table, aoi, encoding, board_target, stats);
    }
    throw UsageError("unknown task");
}

struct EntryPlan {
    std::string name;
    Level level = Level::Pin;
    std::string scope;
    std::string board_target;  // board level only
};

void evaluate_entry(ModelEntry& entry, const FeatureTable& labeled, const RunConfig& config,
                    unsigned entry_jobs) {
    entry.rows = labeled.rows();
    entry.cols = labeled.cols();
    for (std::uint8_t t : *labeled.target) entry.positives += t;

    CvOptions options;
    options.stratified = config.stratified;
    options.jobs = entry_jobs;
    options.keep_models = true;

    TrainConfig train_cfg = config.train;
    train_cfg.seed = config.seed;
    entry.eval = cross_validate(labeled, train_cfg, config.folds, options);

    // gain importance aggregated over the fold models
    std::map<std::string, double> gains;
    for (const auto& model : entry.eval.fold_models) {
        for (const auto& [name, gain] : feature_importance(model)) gains[name] += gain;
    }
    std::vector<std::pair<std::string, double>> ranked;
    for (const auto& item : gains) {
        if (item.second > 0) ranked.push_back(item);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > 10) ranked.resize(10);
    entry.top_importance = std::move(ranked);

    entry.fold_models = std::move(entry.eval.fold_models);
    entry.eval.fold_models.clear();

    bool both_classes =
        entry.positives > 0 && entry.positives < static_cast<std::int64_t>(labeled.rows());
    if (both_classes) {
        entry.pooled_roc = roc(entry.eval.oof_scores, *labeled.target);
    }
}

struct ComponentOutcome {
    ComponentKey key;
    bool truth = false;
};

// fusion population and ground truth at component granularity, per task
std::vector<ComponentOutcome> fusion_population(ClassificationTask task,
                                                const std::vector<PinRecord>& pins,
                                                const std::vector<AoiRecord>& aoi) {
    std::map<ComponentKey, bool> truth;
    switch (task) {
        case ClassificationTask::C1_AoiDefect: {
            for (const auto& rec : pins) truth.try_emplace(component_of(rec.key), false);
            for (const auto& rec : aoi) {
                auto it = truth.find(rec.component_key());
                if (it != truth.end()) it->second = true;
            }
            break;
        }
        case ClassificationTask::C2_OperatorLabel: {
            for (const auto& rec : aoi) {
                bool bad = rec.operator_label == OperatorLabel::Bad;
                auto [it, inserted] = truth.try_emplace(rec.component_key(), bad);
                if (!inserted) it->second = it->second || bad;
            }
            break;
        }
        case ClassificationTask::C3_RepairLabel: {
            for (const auto& rec : aoi) {
                if (rec.operator_label != OperatorLabel::Bad || !rec.repair_label) continue;
                bool npr = *rec.repair_label == RepairLabel::NotPossibleToRepair;
                auto [it, inserted] = truth.try_emplace(rec.component_key(), npr);
                if (!inserted) it->second = it->second || npr;
            }
            break;
        }
    }
    std::vector<ComponentOutcome> out;
    out.reserve(truth.size());
    for (const auto& [key, positive] : truth) out.push_back({key, positive});
    return out;
}

// a member's out-of-fold verdicts projected to component granularity
std::map<ComponentKey, Verdict> member_component_verdicts(const ModelEntry& entry) {
    if (entry.level == Level::Pin) {
        std::vector<std::pair<PinKey, Verdict>> pin_verdicts;
        pin_verdicts.reserve(entry.eval.oof_scores.size());
        for (std::size_t r = 0; r < entry.eval.oof_scores.size(); ++r) {
            const RowKey& k = entry.eval.row_keys[r];
            pin_verdicts.push_back({PinKey{k.panel_id, k.figure_id, k.component_id, k.pin_number},
                                    Verdict{entry.eval.oof_verdicts[r] != 0,
                                            entry.eval.oof_scores[r]}});
        }
        return lift_pin_verdicts(pin_verdicts);
    }
    std::map<ComponentKey, Verdict> out;
    for (std::size_t r = 0; r < entry.eval.oof_scores.size(); ++r) {
        const RowKey& k = entry.eval.row_keys[r];
        ComponentKey key = entry.level == Level::Board
                               ? ComponentKey{k.panel_id, k.figure_id, entry.scope}
                               : k.component_key();
        Verdict& v = out[key];
        v.positive = v.positive || entry.eval.oof_verdicts[r] != 0;
        v.probability = std::max(v.probability, entry.eval.oof_scores[r]);
    }
    return out;
}

FusedReport fuse_entries(const RunConfig& config, const std::vector<const ModelEntry*>& members,
                         const std::vector<ComponentOutcome>& population) {
    FusedReport fused;
    fused.population = population.size();
    for (const auto& item : population) fused.positives += item.truth ? 1 : 0;

    std::vector<std::map<ComponentKey, Verdict>> verdict_maps;
    for (const ModelEntry* entry : members) {
        fused.members.push_back(entry->name);
        verdict_maps.push_back(member_component_verdicts(*entry));
    }

    // deterministic board-grouped fold slices for the per-fold statistics
    std::map<BoardKey, std::vector<std::size_t>> by_board;
    for (std::size_t i = 0; i < population.size(); ++i) {
        by_board[board_of(population[i].key)].push_back(i);
    }
    std::vector<std::vector<std::size_t>> board_groups;
    for (auto& [key, rows] : by_board) board_groups.push_back(std::move(rows));
    Rng rng(mix64(config.seed, 0x66757365ULL));  // "fuse"
    std::vector<std::size_t> order(board_groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<int> fold_of(population.size(), 0);
    std::vector<std::int64_t> fold_sizes(static_cast<std::size_t>(config.folds), 0);
    for (std::size_t gi : order) {
        std::size_t f = 0;
        for (std::size_t c = 1; c < fold_sizes.size(); ++c) {
            if (fold_sizes[c] < fold_sizes[f]) f = c;
        }
        for (std::size_t row : board_groups[gi]) fold_of[row] = static_cast<int>(f);
        fold_sizes[f] += static_cast<std::int64_t>(board_groups[gi].size());
    }

    std::vector<std::uint8_t> fused_verdicts(population.size(), 0);
    std::vector<std::vector<std::uint8_t>> member_verdicts(
        members.size(), std::vector<std::uint8_t>(population.size(), 0));

    for (std::size_t i = 0; i < population.size(); ++i) {
        int defined = 0;
        int votes = 0;
        double prob_sum = 0;
        for (std::size_t m = 0; m < verdict_maps.size(); ++m) {
            auto it = verdict_maps[m].find(population[i].key);
            if (it == verdict_maps[m].end()) continue;
            ++defined;
            votes += it->second.positive ? 1 : 0;
            prob_sum += it->second.probability;
            member_verdicts[m][i] = it->second.positive ? 1 : 0;
        }
        bool positive = false;
        if (defined > 0) {
            switch (config.fusion.kind) {
                case FusionKind::AnyPositive: positive = votes > 0; break;
                case FusionKind::MajorityVote: positive = 2 * votes >= defined; break;
                case FusionKind::MeanProbability:
                    positive = prob_sum / defined >= config.fusion.mean_threshold;
                    break;
            }
        }
        fused_verdicts[i] = positive ? 1 : 0;
    }

    auto recall_of = [](const ConfusionCounts& c) {
        return c.tp + c.fn == 0 ? 0.0
                                : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    };

    std::vector<std::uint8_t> truth(population.size(), 0);
    for (std::size_t i = 0; i < population.size(); ++i) truth[i] = population[i].truth ? 1 : 0;

    fused.pooled = confusion(fused_verdicts, truth);
    fused.f1 = f1(fused.pooled);
    fused.macro_f1 = macro_f1(fused.pooled);
    fused.recall = recall_of(fused.pooled);
    fused.precision = fused.pooled.tp + fused.pooled.fp == 0
                          ? 0.0
                          : static_cast<double>(fused.pooled.tp) /
                                static_cast<double>(fused.pooled.tp + fused.pooled.fp);

    fused.folds.resize(static_cast<std::size_t>(config.folds));
    for (int f = 0; f < config.folds; ++f) {
        std::vector<std::uint8_t> fv, tv;
        for (std::size_t i = 0; i < population.size(); ++i) {
            if (fold_of[i] != f) continue;
            fv.push_back(fused_verdicts[i]);
            tv.push_back(truth[i]);
        }
        FusedFoldStat& stat = fused.folds[static_cast<std::size_t>(f)];
        stat.counts = confusion(fv, tv);
        stat.recall = recall_of(stat.counts);
        stat.f1 = f1(stat.counts);
    }

    for (std::size_t m = 0; m < members.size(); ++m) {
        FusedMemberStat stat;
        stat.name = members[m]->name;
        stat.recall_pooled = recall_of(confusion(member_verdicts[m], truth));
        for (int f = 0; f < config.folds; ++f) {
            std::vector<std::uint8_t> mv, tv;
            for (std::size_t i = 0; i < population.size(); ++i) {
                if (fold_of[i] != f) continue;
                mv.push_back(member_verdicts[m][i]);
                tv.push_back(truth[i]);
            }
            stat.recall_fold.push_back(recall_of(confusion(mv, tv)));
        }
        fused.member_stats.push_back(std::move(stat));
    }
    return fused;
}

}  // namespace

RunReport run(const RunConfig& config, const std::string& spi_path, const std::string& aoi_path) {
    auto started = std::chrono::steady_clock::now();
    config.validate();

    RunReport report;
    report.config = config;

    std::vector<PinRecord> pins;
    std::vector<AoiRecord> aoi;
    with_stage("ingest", [&] {
        auto [p, pr] = read_spi(spi_path, config.schema);
        pins = std::move(p);
        report.spi_report = std::move(pr);
        auto [a, ar] = read_aoi(aoi_path, config.schema);
        aoi = std::move(a);
        report.aoi_report = std::move(ar);
        if (pins.empty()) throw DataError("SPI file has no usable rows");
    });

    const BoardLayout layout = with_stage("layout", [&] { return derive_layout(pins); });

    if (config.level_board && config.task != ClassificationTask::C1_AoiDefect) {
        report.warnings.push_back(
            "board-level models for c2/c3 enabled by override; expect very few "
            "instances per class");
    }

    // plan entries in deterministic order
    std::vector<EntryPlan> plans;
    if (config.level_pin) plans.push_back({"pin/all", Level::Pin, "all", ""});
    if (config.level_component) {
        if (config.component_mode == ComponentMode::Combined) {
            plans.push_back({"component/combined", Level::Component, "combined", ""});
        } else {
            for (const auto& comp : layout.components) {
                plans.push_back({"component/" + comp.id, Level::Component, comp.id, ""});
            }
        }
    }
    if (config.level_board) {
        std::vector<std::string> ranked = with_stage(
            "rank_components", [&] { return rank_components_by_defects(aoi); });
        int top_n = config.top_n_components ? *config.top_n_components : 35;
        if (static_cast<std::size_t>(top_n) < ranked.size()) {
            ranked.resize(static_cast<std::size_t>(top_n));
        }
        for (const auto& id : ranked) {
            plans.push_back({"board/" + id, Level::Board, id, id});
        }
    }

    // base tables, built once and shared
    FeatureTable pin_table, combined_table, board_table;
    with_stage("features", [&] {
        if (config.level_pin) pin_table = build_pin_table(pins, config.encoding);
        if (config.level_component && config.component_mode == ComponentMode::Combined) {
            combined_table = build_combined_component_table(pins, layout, config.encoding);
        }
        if (config.level_board) board_table = build_board_table(pins, layout, config.encoding);
    });

    report.entries.resize(plans.size());
    const unsigned total_jobs = config.jobs == 0 ? default_jobs() : config.jobs;
    const unsigned outer_jobs = plans.size() > 1 ? total_jobs : 1;
    const unsigned inner_jobs = plans.size() > 1 ? 1 : total_jobs;

    parallel_for(plans.size(), outer_jobs, [&](std::size_t i) {
        const EntryPlan& plan = plans[i];
        ModelEntry& entry = report.entries[i];
        entry.name = plan.name;
        entry.level = plan.level;
        entry.scope = plan.scope;
        try {
            FeatureTable labeled;
            switch (plan.level) {
                case Level::Pin:
                    labeled = attach_for_task(config.task, pin_table, aoi, config.encoding, "",
                                              nullptr);
                    break;
                case Level::Component: {
                    if (plan.scope == "combined") {
                        labeled = attach_for_task(config.task, combined_table, aoi,
                                                  config.encoding, "", nullptr);
                    } else {
                        FeatureTable base =
                            build_component_table(pins, plan.scope, layout, config.encoding);
                        labeled = attach_for_task(config.task, base, aoi, config.encoding, "",
                                                  nullptr);
                    }
                    break;
                }
                case Level::Board:
                    labeled = attach_for_task(config.task, board_table, aoi, config.encoding,
                                              plan.board_target, nullptr);
                    break;
            }
            if (labeled.rows() == 0) {
                entry.skipped = true;
                entry.skip_reason = "no rows after label join";
                return;
            }
            evaluate_entry(entry, labeled, config, inner_jobs);
        } catch (const Error& e) {
            // a fleet member that cannot train is recorded, not fatal
            entry.skipped = true;
            entry.skip_reason = e.what();
        }
    });

    // fusion at component granularity over the trained members
    std::vector<const ModelEntry*> members;
    for (const auto& entry : report.entries) {
        if (!entry.skipped) members.push_back(&entry);
    }
    if (!members.empty()) {
        with_stage("fusion", [&] {
            std::vector<ComponentOutcome> population = fusion_population(config.task, pins, aoi);
            if (!population.empty()) {
                report.fused = fuse_entries(config, members, population);
            }
        });
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

// ---------------------------------------------------------------------------
// Report text and side files
// ---------------------------------------------------------------------------

std::string RunReport::to_text() const {
    std::string out = "run-report v1\n";
    out += format("task %s\n", to_string(config.task));
    std::string levels;
    if (config.level_pin) levels += "pin";
    if (config.level_component) levels += levels.empty() ? "component" : ",component";
    if (config.level_board) levels += levels.empty() ? "board" : ",board";
    out += format("levels %s\n", levels.c_str());
    out += format("component_mode %s\n",
                  config.component_mode == ComponentMode::Combined ? "combined" : "per_component");
    out += format("folds %d\n", config.folds);
    out += format("seed %llu\n", static_cast<unsigned long long>(config.seed));
    out += format("fusion %s", to_string(config.fusion.kind));
    if (config.fusion.kind == FusionKind::MeanProbability) {
        out += format(" threshold %.6f", config.fusion.mean_threshold);
    }
    out += "\n";
    out += format("train max_depth %d num_rounds %d learning_rate %.9g l2_leaf_reg %.9g "
                  "min_split_gain %.9g min_child_hessian %.9g",
                  config.train.max_depth, config.train.num_rounds, config.train.learning_rate,
                  config.train.l2_leaf_reg, config.train.min_split_gain,
                  config.train.min_child_hessian);
    if (config.train.positive_class_weight) {
        out += format(" positive_class_weight %.9g", *config.train.positive_class_weight);
    } else {
        out += " positive_class_weight auto";
    }
    if (config.train.feature_top_k) out += format(" feature_top_k %d", *config.train.feature_top_k);
    out += "\n";

    for (const auto& warning : warnings) out += "warning " + warning + "\n";

    out += "ingest spi\n";
    out += spi_report.to_text();
    out += "ingest aoi\n";
    out += aoi_report.to_text();

    for (const auto& entry : entries) {
        out += format("model %s level %s scope %s\n", entry.name.c_str(), to_string(entry.level),
                      entry.scope.c_str());
        if (entry.skipped) {
            out += format("  skipped: %s\n", entry.skip_reason.c_str());
            continue;
        }
        out += format("  rows %zu cols %zu positives %lld\n", entry.rows, entry.cols,
                      static_cast<long long>(entry.positives));
        std::string eval_text = entry.eval.to_text();
        // indent the eval block
        std::size_t start = 0;
        while (start < eval_text.size()) {
            std::size_t end = eval_text.find('\n', start);
            if (end == std::string::npos) end = eval_text.size();
            out += "  " + eval_text.substr(start, end - start) + "\n";
            start = end + 1;
        }
        for (const auto& [name, gain] : entry.top_importance) {
            out += format("  importance %s %.9g\n", name.c_str(), gain);
        }
    }

    if (fused) {
        out += "fused";
        for (const auto& name : fused->members) out += " " + name;
        out += "\n";
        out += format("  population %zu positives %lld\n", fused->population,
                      static_cast<long long>(fused->positives));
        out += format("  pooled f1 %.6f macro_f1 %.6f recall %.6f precision %.6f tp %lld fp %lld "
                      "tn %lld fn %lld\n",
                      fused->f1, fused->macro_f1, fused->recall, fused->precision,
                      static_cast<long long>(fused->pooled.tp),
                      static_cast<long long>(fused->pooled.fp),
                      static_cast<long long>(fused->pooled.tn),
                      static_cast<long long>(fused->pooled.fn));
        for (std::size_t f = 0; f < fused->folds.size(); ++f) {
            const auto& stat = fused->folds[f];
            out += format("  fold %zu recall %.6f f1 %.6f tp %lld fp %lld tn %lld fn %lld\n", f,
                          stat.recall, stat.f1, static_cast<long long>(stat.counts.tp),
                          static_cast<long long>(stat.counts.fp),
                          static_cast<long long>(stat.counts.tn),
                          static_cast<long long>(stat.counts.fn));
        }
        for (const auto& member : fused->member_stats) {
            out += format("  member %s recall %.6f folds", member.name.c_str(),
                          member.recall_pooled);
            for (double r : member.recall_fold) out += format(" %.6f", r);
            out += "\n";
        }
    }
    out += "end\n";
    return out;
}

namespace {

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        if (c == '/' || c == ' ') c = '_';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void write_run_outputs(const RunReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    fs::create_directories(out_dir + "/roc", ec);
    fs::create_directories(out_dir + "/models", ec);

    write_text_file(out_dir + "/report.txt", report.to_text());

    // per-model metrics table: task, level, components, then the scores
    std::string csv = "task,level,components,f1,macro_f1,auc\n";
    auto auc_text = [](const std::optional<double>& auc) {
        return auc ? format("%.6f", *auc) : std::string("");
    };
    for (const auto& entry : report.entries) {
        if (entry.skipped) {
            csv += format("%s,%s,%s,,,\n", to_string(report.config.task), to_string(entry.level),
                          entry.scope.c_str());
            continue;
        }
        csv += format("%s,%s,%s,%.6f,%.6f,%s\n", to_string(report.config.task),
                      to_string(entry.level), entry.scope.c_str(), entry.eval.pooled_f1,
                      entry.eval.pooled_macro_f1, auc_text(entry.eval.pooled_auc).c_str());
    }
    if (report.fused) {
        csv += format("%s,fused,%s,%.6f,%.6f,\n", to_string(report.config.task),
                      to_string(report.config.fusion.kind), report.fused->f1,
                      report.fused->macro_f1);
    }
    write_text_file(out_dir + "/metrics.csv", csv);

    for (const auto& entry : report.entries) {
        if (entry.skipped) continue;
        if (entry.pooled_roc) {
            write_roc_csv(*entry.pooled_roc, out_dir + "/roc/" + sanitize(entry.name) + ".csv");
        }
        for (std::size_t f = 0; f < entry.fold_models.size(); ++f) {
            save_model(entry.fold_models[f],
                       out_dir + "/models/" + sanitize(entry.name) + format("_fold%zu.txt", f));
        }
    }

    write_text_file(out_dir + "/timing.txt", format("wall_seconds %.3f\n", report.wall_seconds));
}

}  // namespace spidet
