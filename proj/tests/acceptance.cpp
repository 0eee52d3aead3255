// Acceptance suite: one check per release criterion, each printed as a
// [PASS]/[FAIL] line. Exit code 0 only when every non-informational check
// passes. Heavier end-to-end checks run on synthetic planted-signal data.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracles.hpp"
#include "spidet/cli_config.hpp"
#include "spidet/eval.hpp"
#include "spidet/features.hpp"
#include "spidet/gbdt.hpp"
#include "spidet/ingest.hpp"
#include "spidet/pipeline.hpp"
#include "spidet/synthgen.hpp"

using namespace spidet;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] %2d. %s — %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    if (!pass) ++g_failures;
    std::fflush(stdout);
}

void report_skip(int id, const std::string& what, const std::string& detail) {
    std::printf("[SKIP] %2d. %s — %s\n", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct Scratch {
    std::filesystem::path dir;
    Scratch() {
        dir = std::filesystem::temp_directory_path() /
              ("spidet_acceptance_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

// --- 1 -----------------------------------------------------------------

void criterion_layout() {
    // 15,387 boards ship on 1,924 panels (the last panel partial: 1924*8 =
    // 15,392 slots); the pin total is boards x pins-per-board
    BoardLayout layout = default_layout();
    bool pass = layout.components.size() == 128 && total_pins(layout) == 389 &&
                static_cast<std::int64_t>(15387) * total_pins(layout) == 5985543 &&
                (15387 + 7) / 8 == 1924;
    report(1, pass, "layout identities",
           format("components=%zu pins/board=%lld boards=15387 panels=%d pins=%lld",
                  layout.components.size(), static_cast<long long>(total_pins(layout)),
                  (15387 + 7) / 8, static_cast<long long>(15387LL * total_pins(layout))));
}

// --- 2 -----------------------------------------------------------------

void criterion_split_oracle() {
    Rng rng(0xACCE55);
    int checked = 0, mismatches = 0;
    for (int iter = 0; iter < 200; ++iter) {
        std::size_t n = 8 + static_cast<std::size_t>(rng.next_u64() % 57);
        std::size_t m = 1 + static_cast<std::size_t>(rng.next_u64() % 3);
        std::vector<std::vector<double>> rows(n, std::vector<double>(m));
        std::vector<std::uint8_t> target(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < m; ++c) {
                rows[r][c] = std::floor(rng.uniform(-4, 4) * 4.0) / 4.0;
            }
            target[r] = rng.bernoulli(0.5) ? 1 : 0;
        }
        target[0] = 1;
        target[n - 1] = 0;

        FeatureTable t;
        t.level = Level::Pin;
        for (std::size_t c = 0; c < m; ++c) t.column_names.push_back(format("f%zu", c));
        for (std::size_t r = 0; r < n; ++r) {
            t.values.insert(t.values.end(), rows[r].begin(), rows[r].end());
            t.row_keys.push_back(RowKey{static_cast<std::int64_t>(r + 1), 1, "C", 1});
        }
        t.target = target;

        TrainConfig config;
        config.max_depth = 1;
        config.num_rounds = 1;
        bool weighted = rng.bernoulli(0.5);
        if (!weighted) config.positive_class_weight = 1.0;
        BoostedModel model = train(t, config);

        std::int64_t n_pos = 0;
        for (std::uint8_t y : target) n_pos += y;
        double pos_weight = weighted ? static_cast<double>(n - static_cast<std::size_t>(n_pos)) /
                                           static_cast<double>(n_pos)
                                     : 1.0;
        std::vector<double> grad, hess;
        oracles::first_round_stats(target, pos_weight, grad, hess);
        auto oracle = oracles::best_split_exhaustive(rows, grad, hess, config.l2_leaf_reg,
                                                     config.min_split_gain,
                                                     config.min_child_hessian);
        const TreeNode& root = model.trees[0].nodes[0];
        if (oracle.found) {
            ++checked;
            if (root.is_leaf || root.feature_index != oracle.feature ||
                root.threshold != oracle.threshold ||
                std::abs(root.gain - oracle.gain) > 1e-9) {
                ++mismatches;
            }
        } else if (!root.is_leaf) {
            ++mismatches;
        }
    }
    report(2, mismatches == 0 && checked >= 100, "gbdt split oracle (200 random datasets)",
           format("splits_compared=%d mismatches=%d", checked, mismatches));
}

// --- 3 -----------------------------------------------------------------

void criterion_loss_monotone() {
    Rng rng(0x10551);
    int violations = 0;
    for (int iter = 0; iter < 20; ++iter) {
        std::size_t n = 40 + static_cast<std::size_t>(rng.next_u64() % 120);
        std::size_t m = 1 + static_cast<std::size_t>(rng.next_u64() % 4);
        FeatureTable t;
        t.level = Level::Pin;
        for (std::size_t c = 0; c < m; ++c) t.column_names.push_back(format("f%zu", c));
        t.target = std::vector<std::uint8_t>();
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < m; ++c) t.values.push_back(rng.uniform(-3, 3));
            t.row_keys.push_back(RowKey{static_cast<std::int64_t>(r + 1), 1, "C", 1});
            t.target->push_back(rng.bernoulli(0.3) ? 1 : 0);
        }
        (*t.target)[0] = 1;
        (*t.target)[n - 1] = 0;

        TrainConfig config;
        config.num_rounds = 50;
        config.learning_rate = 0.1;
        config.max_depth = 4;
        std::vector<double> losses;
        train(t, config, 0, &losses);
        for (std::size_t i = 1; i < losses.size(); ++i) {
            if (losses[i] > losses[i - 1] + 1e-12) ++violations;
        }
    }
    report(3, violations == 0, "loss monotonicity (20 datasets x 50 rounds)",
           format("violations=%d", violations));
}

// --- 4 -----------------------------------------------------------------

void criterion_metric_oracles() {
    bool pass = true;
    std::string detail;

    double f = f1({2, 1, 0, 3});
    if (f != 0.5) {
        pass = false;
        detail += format("f1=%.12g (want 0.5) ", f);
    }
    double auc = roc({0.9, 0.8, 0.7, 0.6}, {1, 0, 1, 0}).auc;
    if (std::abs(auc - 0.75) > 1e-15) {
        pass = false;
        detail += format("auc=%.12g (want 0.75) ", auc);
    }

    Rng rng(0xA0C);
    double worst = 0;
    for (int iter = 0; iter < 50; ++iter) {
        std::size_t n = 100 + static_cast<std::size_t>(rng.next_u64() % 9901);  // up to 10^4
        std::vector<double> scores(n);
        std::vector<std::uint8_t> targets(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = std::floor(rng.uniform(0, 1) * 200.0) / 200.0;
            targets[i] = rng.bernoulli(0.25) ? 1 : 0;
        }
        targets[0] = 1;
        targets[1] = 0;
        double lib = roc(scores, targets).auc;
        double oracle = oracles::mann_whitney_auc(scores, targets);
        worst = std::max(worst, std::abs(lib - oracle));
    }
    if (worst > 1e-9) pass = false;
    detail += format("max |auc - mann_whitney| = %.3g", worst);
    report(4, pass, "metric oracles", detail);
}

// --- 5 -----------------------------------------------------------------

void criterion_join_oracle() {
    int mismatches = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        BoardLayout layout{{{"CA", 2}, {"CB", 3}, {"CC", 1}, {"CD", 4}}, 2};
        GeneratorConfig config;
        config.seed = seed * 7919;
        config.num_panels = 1 + static_cast<std::int64_t>(seed % 5);  // up to 10 boards
        config.layout = layout;
        config.pin_defect_rate = 0.15;
        config.operator_bad_rate = 0.5;
        config.not_repairable_rate = 0.6;
        config.missing_pin_number_rate = 0.05;
        SyntheticData data = generate(config);
        EncodingConfig encoding;

        FeatureTable pin = build_pin_table(data.pins, encoding);
        FeatureTable comp = build_combined_component_table(data.pins, layout, encoding);
        FeatureTable board = build_board_table(data.pins, layout, encoding);

        for (const FeatureTable* base : {&pin, &comp}) {
            if (*attach_labels_c1(*base, data.aoi).target !=
                oracles::brute_force_c1(*base, data.aoi, "")) {
                ++mismatches;
            }
            FeatureTable c2 = attach_labels_c2(*base, data.aoi, encoding);
            auto o2 = oracles::brute_force_c2(*base, data.aoi, "");
            if (c2.rows() != o2.kept.size() || *c2.target != o2.target) ++mismatches;
            FeatureTable c3 = attach_labels_c3(*base, data.aoi, encoding);
            auto o3 = oracles::brute_force_c3(*base, data.aoi, "");
            if (c3.rows() != o3.kept.size() || *c3.target != o3.target) ++mismatches;
        }
        for (const auto& spec : layout.components) {
            if (*attach_labels_c1(board, data.aoi, spec.id).target !=
                oracles::brute_force_c1(board, data.aoi, spec.id)) {
                ++mismatches;
            }
        }
    }
    report(5, mismatches == 0, "join oracle (50 random instances, 5% blank pin numbers)",
           format("mismatches=%d", mismatches));
}

// --- 6, 7, 9, 10: shared run machinery -----------------------------------

TrainConfig acceptance_train_config() {
    TrainConfig t;
    t.num_rounds = 16;
    t.max_depth = 3;
    t.learning_rate = 0.3;
    return t;
}

void criterion_planted_signal(const Scratch& scratch) {
    auto started = std::chrono::steady_clock::now();

    GeneratorConfig gen;
    gen.seed = 7;
    gen.num_panels = 200;
    gen.pin_defect_rate = 0.01;
    gen.planted_signal_strength = 2.0;
    SyntheticData data = generate(gen);
    write_spi_csv(data.pins, scratch.file("planted_spi.csv"));
    write_aoi_csv(data.aoi, scratch.file("planted_aoi.csv"));

    RunConfig config;
    config.task = ClassificationTask::C1_AoiDefect;
    config.level_pin = true;
    config.level_component = false;
    config.level_board = false;
    config.folds = 5;
    config.seed = 7;
    config.train = acceptance_train_config();
    // the SPI result token is downstream of the planted defect draw; learn
    // from the measurements alone
    config.encoding.use_spi_result = false;

    RunReport report_run = run(config, scratch.file("planted_spi.csv"),
                               scratch.file("planted_aoi.csv"));
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    // information ceiling on this dataset: the generative signal is volume
    // alone, so ranking by raw volume with an in-sample-optimal threshold
    // bounds what any classifier can reach
    std::set<PinKey> positive;
    for (const auto& rec : data.aoi) {
        if (rec.pin_number) positive.insert(*rec.pin_key());
    }
    std::vector<double> volume;
    std::vector<std::uint8_t> truth;
    for (const auto& rec : data.pins) {
        volume.push_back(rec.volume_pct);
        truth.push_back(positive.count(rec.key) ? 1 : 0);
    }
    double ceiling_threshold = threshold_select(volume, truth);
    ConfusionCounts ceiling_counts;
    for (std::size_t i = 0; i < volume.size(); ++i) {
        bool flagged = volume[i] >= ceiling_threshold;
        if (truth[i]) (flagged ? ceiling_counts.tp : ceiling_counts.fn)++;
        else (flagged ? ceiling_counts.fp : ceiling_counts.tn)++;
    }
    double ceiling_f1 = f1(ceiling_counts);

    bool pass = false;
    std::string detail;
    if (report_run.entries.size() == 1 && !report_run.entries[0].skipped &&
        report_run.entries[0].eval.pooled_auc) {
        double auc = *report_run.entries[0].eval.pooled_auc;
        double f = report_run.entries[0].eval.pooled_f1;
        pass = data.pins.size() == 622400 && auc >= 0.85 && f >= 0.30 && elapsed < 120.0;
        detail = format("pins=%zu pooled_auc=%.4f pooled_f1=%.4f elapsed=%.1fs "
                        "[bayes-ranking ceiling f1=%.4f on this data; the stated f1>=0.30 "
                        "exceeds it, see decisions ledger]",
                        data.pins.size(), auc, f, elapsed, ceiling_f1);
    } else {
        detail = "run produced no usable pin model";
    }
    report(6, pass, "planted-signal recovery (200 panels, strength 2.0)", detail);
}

void criterion_null_signal(const Scratch& scratch) {
    GeneratorConfig gen;
    gen.seed = 7;
    gen.num_panels = 200;
    gen.pin_defect_rate = 0.01;
    gen.planted_signal_strength = 0.0;
    SyntheticData data = generate(gen);
    write_spi_csv(data.pins, scratch.file("null_spi.csv"));
    write_aoi_csv(data.aoi, scratch.file("null_aoi.csv"));

    RunConfig config;
    config.task = ClassificationTask::C1_AoiDefect;
    config.level_pin = true;
    config.folds = 5;
    config.seed = 7;
    config.train = acceptance_train_config();
    config.encoding.use_spi_result = false;

    RunReport report_run =
        run(config, scratch.file("null_spi.csv"), scratch.file("null_aoi.csv"));
    bool pass = false;
    std::string detail = "run produced no usable pin model";
    if (!report_run.entries.empty() && !report_run.entries[0].skipped &&
        report_run.entries[0].eval.pooled_auc) {
        double auc = *report_run.entries[0].eval.pooled_auc;
        pass = auc >= 0.45 && auc <= 0.55;
        detail = format("pooled_auc=%.4f", auc);
    }
    report(7, pass, "null-signal sanity (strength 0)", detail);
}

// --- 8 -----------------------------------------------------------------

void criterion_cascade_rates() {
    GeneratorConfig gen;
    gen.seed = 99;
    gen.num_panels = 100;  // 311,200 pins at the default layout
    SyntheticData data = generate(gen);

    double n_pins = static_cast<double>(data.pins.size());
    double n_aoi = static_cast<double>(data.aoi.size());
    double n_bad = 0, n_npr = 0;
    for (const auto& rec : data.aoi) {
        if (rec.operator_label == OperatorLabel::Bad) {
            n_bad += 1;
            if (rec.repair_label == RepairLabel::NotPossibleToRepair) n_npr += 1;
        }
    }
    auto within = [](double count, double trials, double p) {
        double sigma = std::sqrt(trials * p * (1 - p));
        return std::abs(count - trials * p) <= 3.0 * sigma;
    };
    bool pass = n_pins >= 1e5 && within(n_aoi, n_pins, 0.004) && within(n_bad, n_aoi, 0.040) &&
                within(n_npr, n_bad, 0.805);
    report(8, pass, "cascade rates 0.4% / 4.0% / 80.5% within 3 sigma",
           format("pins=%.0f aoi=%.0f (%.4f%%) bad=%.0f (%.2f%%) npr=%.0f (%.1f%%)", n_pins,
                  n_aoi, 100 * n_aoi / n_pins, n_bad, 100 * n_bad / n_aoi, n_npr,
                  100 * n_npr / n_bad));
}

// --- 9 -----------------------------------------------------------------

void criterion_fusion_property(const Scratch& scratch) {
    GeneratorConfig gen;
    gen.seed = 31;
    gen.num_panels = 60;
    gen.pin_defect_rate = 0.01;
    gen.planted_signal_strength = 2.0;
    SyntheticData data = generate(gen);
    write_spi_csv(data.pins, scratch.file("fuse_spi.csv"));
    write_aoi_csv(data.aoi, scratch.file("fuse_aoi.csv"));

    RunConfig config;
    config.task = ClassificationTask::C1_AoiDefect;
    config.level_pin = true;
    config.level_component = true;
    config.component_mode = ComponentMode::Combined;
    config.folds = 5;
    config.seed = 31;
    config.train = acceptance_train_config();
    config.encoding.use_spi_result = false;

    RunReport report_run = run(config, scratch.file("fuse_spi.csv"), scratch.file("fuse_aoi.csv"));
    bool pass = report_run.fused.has_value() && report_run.fused->members.size() == 2;
    std::string detail;
    if (pass) {
        const FusedReport& fused = *report_run.fused;
        for (const auto& member : fused.member_stats) {
            if (fused.recall < member.recall_pooled - 1e-12) pass = false;
            for (std::size_t f = 0; f < fused.folds.size(); ++f) {
                if (fused.folds[f].recall < member.recall_fold[f] - 1e-12) pass = false;
            }
        }
        detail = format("fused_recall=%.4f members=%zu folds=%zu", fused.recall,
                        fused.members.size(), fused.folds.size());
    } else {
        detail = "fused block missing";
    }
    report(9, pass, "any-positive fused recall dominates members on every fold", detail);
}

// --- 10 ----------------------------------------------------------------

void criterion_cli_determinism(const Scratch& scratch) {
    GeneratorConfig gen;
    gen.seed = 12;
    gen.num_panels = 20;
    gen.pin_defect_rate = 0.02;
    gen.planted_signal_strength = 1.5;
    SyntheticData data = generate(gen);
    write_spi_csv(data.pins, scratch.file("det_spi.csv"));
    write_aoi_csv(data.aoi, scratch.file("det_aoi.csv"));

    auto run_cli = [&](const std::string& out_dir, int jobs) {
        std::string cmd = std::string(SPIDET_CLI_PATH) + " run --spi " +
                          scratch.file("det_spi.csv") + " --aoi " + scratch.file("det_aoi.csv") +
                          " --task c1 --levels pin,component --seed 12 --folds 5 --rounds 8 "
                          "--depth 3 --learning-rate 0.3 --jobs " +
                          std::to_string(jobs) + " --out-dir " + out_dir + " > " +
                          scratch.file("cli_log") + " 2>&1";
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };

    bool ok1 = run_cli(scratch.file("det_j1"), 1);
    bool ok4 = run_cli(scratch.file("det_j4"), 4);
    bool pass = ok1 && ok4;
    std::string detail;
    if (pass) {
        std::string r1 = read_file(scratch.file("det_j1") + "/report.txt");
        std::string r4 = read_file(scratch.file("det_j4") + "/report.txt");
        std::string m1 = read_file(scratch.file("det_j1") + "/metrics.csv");
        std::string m4 = read_file(scratch.file("det_j4") + "/metrics.csv");
        pass = r1 == r4 && m1 == m4;
        detail = format("report_bytes=%zu identical=%s", r1.size(), pass ? "yes" : "no");
    } else {
        detail = "cli run failed";
    }
    report(10, pass, "cmd_run determinism across --jobs 1 vs 4", detail);
}

// --- 11 ----------------------------------------------------------------

void criterion_round_trips(const Scratch& scratch) {
    bool pass = true;
    std::string detail;

    // model save/load preserves predictions bit-exactly on 10^4 random rows
    Rng rng(0x5EED);
    FeatureTable train_table;
    train_table.level = Level::Pin;
    for (int c = 0; c < 8; ++c) train_table.column_names.push_back(format("f%d", c));
    train_table.target = std::vector<std::uint8_t>();
    for (int r = 0; r < 2000; ++r) {
        double z = 0;
        for (int c = 0; c < 8; ++c) {
            double v = rng.uniform(-2, 2);
            train_table.values.push_back(v);
            if (c == 0) z = v;
        }
        train_table.row_keys.push_back(RowKey{r + 1, 1, "C", 1});
        train_table.target->push_back(rng.bernoulli(sigmoid(2 * z)) ? 1 : 0);
    }
    TrainConfig config;
    config.num_rounds = 20;
    config.max_depth = 5;
    BoostedModel model = train(train_table, config);
    save_model(model, scratch.file("model.txt"));
    BoostedModel loaded = load_model(scratch.file("model.txt"));

    FeatureTable probe;
    probe.level = Level::Pin;
    probe.column_names = train_table.column_names;
    for (int r = 0; r < 10000; ++r) {
        for (int c = 0; c < 8; ++c) probe.values.push_back(rng.uniform(-3, 3));
        probe.row_keys.push_back(RowKey{r + 1, 1, "C", 1});
    }
    std::vector<double> a = predict(model, probe);
    std::vector<double> b = predict(loaded, probe);
    std::size_t model_mismatches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) ++model_mismatches;
    }
    if (model_mismatches) pass = false;
    detail += format("model_pred_mismatches=%zu/10000 ", model_mismatches);

    // generate -> write -> read within 1e-9 relative on numerics
    GeneratorConfig gen;
    gen.seed = 61;
    gen.num_panels = 20;
    gen.pin_defect_rate = 0.01;
    SyntheticData data = generate(gen);
    write_spi_csv(data.pins, scratch.file("rt_spi.csv"));
    write_aoi_csv(data.aoi, scratch.file("rt_aoi.csv"));
    auto [pins, spi_report] = read_spi(scratch.file("rt_spi.csv"));
    auto [aoi, aoi_report] = read_aoi(scratch.file("rt_aoi.csv"));
    double worst_rel = 0;
    bool structural = pins.size() == data.pins.size() && aoi.size() == data.aoi.size();
    if (structural) {
        for (std::size_t i = 0; i < pins.size(); ++i) {
            if (pins[i].key != data.pins[i].key || pins[i].spi_result != data.pins[i].spi_result) {
                structural = false;
                break;
            }
            for (int f = 0; f < kNumPinNumerics; ++f) {
                double want = data.pins[i].numeric(f);
                double got = pins[i].numeric(f);
                double rel = std::abs(got - want) / std::max(1.0, std::abs(want));
                worst_rel = std::max(worst_rel, rel);
            }
        }
    }
    if (!structural || worst_rel > 1e-9) pass = false;
    detail += format("csv_worst_rel=%.3g structural=%s", worst_rel, structural ? "ok" : "BAD");
    report(11, pass, "serialization round-trips", detail);
}

// --- 12 ----------------------------------------------------------------

void criterion_challenge_files() {
    const char* spi = std::getenv("SPIDET_CHALLENGE_SPI");
    const char* aoi = std::getenv("SPIDET_CHALLENGE_AOI");
    if (!spi || !aoi) {
        report_skip(12, "challenge-file comparison (informational)",
                    "set SPIDET_CHALLENGE_SPI / SPIDET_CHALLENGE_AOI to enable");
        return;
    }
    try {
        RunConfig config;
        config.task = ClassificationTask::C1_AoiDefect;
        config.level_pin = false;
        config.level_component = true;
        config.component_mode = ComponentMode::Combined;
        config.folds = 5;
        config.seed = 7;
        RunReport report_run = run(config, spi, aoi);
        for (const auto& entry : report_run.entries) {
            if (!entry.skipped) {
                std::printf("[INFO] 12. challenge C1 component-level pooled F1 = %.4f "
                            "(paper reports 0.55 on its own split)\n",
                            entry.eval.pooled_f1);
            }
        }
        report_skip(12, "challenge-file comparison (informational)", "reported above, no gate");
    } catch (const Error& e) {
        report_skip(12, "challenge-file comparison (informational)",
                    std::string("failed: ") + e.what());
    }
}

}  // namespace

int main() {
    Scratch scratch;
    try {
        criterion_layout();
        criterion_split_oracle();
        criterion_loss_monotone();
        criterion_metric_oracles();
        criterion_join_oracle();
        criterion_planted_signal(scratch);
        criterion_null_signal(scratch);
        criterion_cascade_rates();
        criterion_fusion_property(scratch);
        criterion_cli_determinism(scratch);
        criterion_round_trips(scratch);
        criterion_challenge_files();
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance suite aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%s (%d failure%s)\n", g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures == 0 ? 0 : 1;
}
