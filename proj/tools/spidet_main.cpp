// spidet: synthetic data generation, dataset inspection and end-to-end
// training runs for SPI-based PCB defect detection. One binary, three
// subcommands, every source of randomness behind a single --seed.

#include <cstdio>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "spidet/cli_config.hpp"
#include "spidet/ingest.hpp"
#include "spidet/pipeline.hpp"
#include "spidet/synthgen.hpp"

namespace {

using namespace spidet;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTrain = 4;
constexpr int kExitIo = 5;

// --config is resolved before the full parse so flag defaults come from the file
std::string prescan_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

int cmd_generate(const CliConfig& base, const std::string& out_spi, const std::string& out_aoi,
                 unsigned jobs) {
    GeneratorConfig config = base.generator;
    config.validate();

    std::unique_ptr<std::FILE, FileCloser> spi(std::fopen(out_spi.c_str(), "wb"));
    if (!spi) throw IoError("cannot write " + out_spi);
    std::unique_ptr<std::FILE, FileCloser> aoi(std::fopen(out_aoi.c_str(), "wb"));
    if (!aoi) throw IoError("cannot write " + out_aoi);
    write_spi_header(spi.get());
    write_aoi_header(aoi.get());

    const std::optional<double> intercept = planted_intercept(config);

    // stream panel by panel; identical bytes to a monolithic generate()
    std::int64_t pins = 0, defects = 0, bad = 0, not_repairable = 0;
    const std::size_t chunk = 64;
    for (std::int64_t first = 1; first <= config.num_panels; first += chunk) {
        std::int64_t last = std::min<std::int64_t>(config.num_panels, first + chunk - 1);
        std::vector<SyntheticData> parts(static_cast<std::size_t>(last - first + 1));
        parallel_for(parts.size(), jobs, [&](std::size_t i) {
            parts[i] = generate_panel(config, first + static_cast<std::int64_t>(i), intercept);
        });
        for (const auto& part : parts) {
            append_spi_rows(spi.get(), part.pins);
            append_aoi_rows(aoi.get(), part.aoi);
            pins += static_cast<std::int64_t>(part.pins.size());
            defects += static_cast<std::int64_t>(part.aoi.size());
            for (const auto& rec : part.aoi) {
                if (rec.operator_label == OperatorLabel::Bad) {
                    ++bad;
                    if (rec.repair_label == RepairLabel::NotPossibleToRepair) ++not_repairable;
                }
            }
        }
    }
    if (std::ferror(spi.get())) throw IoError("write failed: " + out_spi);
    if (std::ferror(aoi.get())) throw IoError("write failed: " + out_aoi);

    std::printf("pins %lld\n", static_cast<long long>(pins));
    std::printf("aoi_defects %lld rate %.6f\n", static_cast<long long>(defects),
                pins ? static_cast<double>(defects) / static_cast<double>(pins) : 0.0);
    std::printf("operator_bad %lld rate %.6f\n", static_cast<long long>(bad),
                defects ? static_cast<double>(bad) / static_cast<double>(defects) : 0.0);
    std::printf("not_repairable %lld rate %.6f\n", static_cast<long long>(not_repairable),
                bad ? static_cast<double>(not_repairable) / static_cast<double>(bad) : 0.0);
    return kExitOk;
}

int cmd_inspect(const CliConfig& base, const std::string& spi_path, const std::string& aoi_path) {
    if (spi_path.empty() == aoi_path.empty()) {
        throw UsageError("inspect needs exactly one of --spi or --aoi");
    }
    if (!spi_path.empty()) {
        auto [pins, report] = read_spi(spi_path, base.schema);
        std::printf("%s", report.to_text().c_str());
        if (pins.empty()) return kExitOk;
        BoardLayout layout = derive_layout(pins);
        std::map<BoardKey, bool> boards;
        for (const auto& rec : pins) boards[board_of(rec.key)] = true;
        std::printf("components %zu\n", layout.components.size());
        std::printf("boards %zu\n", boards.size());
        std::printf("pins_per_board %lld\n", static_cast<long long>(total_pins(layout)));
        std::map<int, int> histogram;
        for (const auto& comp : layout.components) histogram[comp.pin_count]++;
        std::printf("pin-count histogram (components x pins):\n");
        for (const auto& [pin_count, n_components] : histogram) {
            std::printf("  %d x %d\n", n_components, pin_count);
        }
        std::map<std::string, std::int64_t> results;
        for (const auto& rec : pins) results[rec.spi_result]++;
        std::printf("spi result histogram:\n");
        for (const auto& [token, n] : results) {
            std::printf("  %s %lld\n", token.c_str(), static_cast<long long>(n));
        }
    } else {
        auto [records, report] = read_aoi(aoi_path, base.schema);
        std::printf("%s", report.to_text().c_str());
        if (records.empty()) return kExitOk;
        std::map<std::string, std::int64_t> faults;
        std::int64_t bad = 0, not_repairable = 0, missing_pin = 0;
        for (const auto& rec : records) {
            faults[rec.machine_label]++;
            if (!rec.pin_number) ++missing_pin;
            if (rec.operator_label == OperatorLabel::Bad) {
                ++bad;
                if (rec.repair_label == RepairLabel::NotPossibleToRepair) ++not_repairable;
            }
        }
        std::printf("fault-type histogram:\n");
        for (const auto& [token, n] : faults) {
            std::printf("  %s %lld\n", token.c_str(), static_cast<long long>(n));
        }
        double n = static_cast<double>(records.size());
        std::printf("missing_pin_number %lld rate %.6f\n", static_cast<long long>(missing_pin),
                    static_cast<double>(missing_pin) / n);
        std::printf("operator_bad %lld rate %.6f\n", static_cast<long long>(bad),
                    static_cast<double>(bad) / n);
        std::printf("not_repairable %lld rate %.6f\n", static_cast<long long>(not_repairable),
                    bad ? static_cast<double>(not_repairable) / static_cast<double>(bad) : 0.0);
    }
    return kExitOk;
}

int cmd_run(const CliConfig& base, const std::string& spi_path, const std::string& aoi_path,
            const std::string& out_dir) {
    RunConfig config = base.to_run_config();
    RunReport report = run(config, spi_path, aoi_path);
    write_run_outputs(report, out_dir);

    for (const auto& entry : report.entries) {
        if (entry.skipped) {
            std::printf("model %s skipped (%s)\n", entry.name.c_str(), entry.skip_reason.c_str());
        } else {
            std::printf("model %s f1 %.6f macro_f1 %.6f", entry.name.c_str(),
                        entry.eval.pooled_f1, entry.eval.pooled_macro_f1);
            if (entry.eval.pooled_auc) std::printf(" auc %.6f", *entry.eval.pooled_auc);
            std::printf("\n");
        }
    }
    if (report.fused) {
        std::printf("fused f1 %.6f macro_f1 %.6f recall %.6f\n", report.fused->f1,
                    report.fused->macro_f1, report.fused->recall);
    }
    std::printf("report %s/report.txt\n", out_dir.c_str());

    bool any_trained = false;
    for (const auto& entry : report.entries) any_trained = any_trained || !entry.skipped;
    if (!any_trained) {
        std::fprintf(stderr, "error: no model in the fleet could be trained (see report)\n");
        return kExitTrain;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPI-feature PCB defect detection: synthetic data, dataset "
                 "inspection and boosted-tree training runs",
                 "spidet"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "print help for every subcommand");

    CliConfig config;
    try {
        std::string config_path = prescan_config_path(argc, argv);
        if (!config_path.empty()) config = load_cli_config(config_path);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }

    std::string config_path_opt;
    app.add_option("--config", config_path_opt, "JSON config file; flags override its values");

    // generate
    auto* gen = app.add_subcommand("generate", "write synthetic SPI and AOI CSV files");
    gen->fallthrough();
    std::string out_spi = "spi.csv", out_aoi = "aoi.csv";
    gen->add_option("--out-spi", out_spi, "output SPI CSV path")->capture_default_str();
    gen->add_option("--out-aoi", out_aoi, "output AOI CSV path")->capture_default_str();
    auto* gen_panels = gen->add_option("--panels", config.generator.num_panels,
                                       "number of panels (8 boards each by default)");
    auto* gen_seed = gen->add_option("--seed", config.seed, "generator seed");
    auto* gen_strength = gen->add_option("--planted-strength",
                                         config.generator.planted_signal_strength,
                                         "logistic signal strength on volume deviation (0 = noise)");
    auto* gen_rate = gen->add_option("--defect-rate", config.generator.pin_defect_rate,
                                     "marginal pin defect rate");
    auto* gen_jobs = gen->add_option("--jobs", config.jobs, "worker threads (0 = all cores)");

    // inspect
    auto* ins = app.add_subcommand("inspect", "summarize an SPI or AOI CSV file");
    ins->fallthrough();
    std::string ins_spi, ins_aoi;
    ins->add_option("--spi", ins_spi, "SPI CSV to summarize");
    ins->add_option("--aoi", ins_aoi, "AOI CSV to summarize");

    // run
    auto* runc = app.add_subcommand("run", "train and evaluate the model fleet end to end");
    runc->fallthrough();
    std::string run_spi, run_aoi, out_dir = "out";
    std::string task_text, levels_text, mode_text, fusion_text;
    runc->add_option("--spi", run_spi, "SPI CSV input")->required();
    runc->add_option("--aoi", run_aoi, "AOI CSV input")->required();
    runc->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    runc->add_option("--task", task_text, "classification task: c1, c2 or c3");
    runc->add_option("--levels", levels_text, "comma list of pin,component,board");
    runc->add_option("--component-mode", mode_text, "per_component or combined");
    int top_n_flag = -1;
    runc->add_option("--top-n", top_n_flag, "board-level component count (default 35)");
    auto* run_folds = runc->add_option("--folds", config.folds, "cross-validation folds");
    auto* run_seed = runc->add_option("--seed", config.seed, "run seed");
    auto* run_jobs = runc->add_option("--jobs", config.jobs, "worker threads (0 = all cores)");
    runc->add_option("--fusion", fusion_text, "any_positive, majority_vote or mean_probability");
    auto* run_rounds = runc->add_option("--rounds", config.train.num_rounds, "boosting rounds");
    auto* run_depth = runc->add_option("--depth", config.train.max_depth, "tree depth limit");
    auto* run_lr = runc->add_option("--learning-rate", config.train.learning_rate,
                                    "boosting learning rate");
    int top_k_flag = -1;
    runc->add_option("--top-k-features", top_k_flag,
                     "train on the top-k features by gain importance (10 is the usual choice)");
    auto* run_hist = runc->add_flag("--histogram", config.train.histogram_mode,
                                    "binned split search (faster on wide tables, "
                                    "not bit-equal to exact)");
    (void)run_hist;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    (void)gen_panels;
    (void)gen_seed;
    (void)gen_strength;
    (void)gen_rate;
    (void)gen_jobs;
    (void)run_folds;
    (void)run_seed;
    (void)run_jobs;
    (void)run_rounds;
    (void)run_depth;
    (void)run_lr;

    try {
        config.generator.seed = config.seed;
        if (gen->parsed()) {
            return cmd_generate(config, out_spi, out_aoi, config.jobs);
        }
        if (ins->parsed()) {
            return cmd_inspect(config, ins_spi, ins_aoi);
        }
        if (runc->parsed()) {
            if (!task_text.empty()) config.task = parse_task(task_text);
            if (!levels_text.empty()) {
                config.level_pin = config.level_component = config.level_board = false;
                std::size_t start = 0;
                while (start <= levels_text.size()) {
                    std::size_t end = levels_text.find(',', start);
                    if (end == std::string::npos) end = levels_text.size();
                    std::string level = levels_text.substr(start, end - start);
                    if (level == "pin") config.level_pin = true;
                    else if (level == "component") config.level_component = true;
                    else if (level == "board") config.level_board = true;
                    else if (!level.empty()) {
                        throw UsageError("unknown level '" + level +
                                         "' (valid: pin, component, board)");
                    }
                    start = end + 1;
                }
            }
            if (!mode_text.empty()) {
                if (mode_text == "per_component") config.component_mode = ComponentMode::PerComponent;
                else if (mode_text == "combined") config.component_mode = ComponentMode::Combined;
                else throw UsageError("unknown component mode '" + mode_text + "'");
            }
            if (!fusion_text.empty()) config.fusion.kind = parse_fusion(fusion_text);
            if (top_n_flag >= 0) config.top_n_components = top_n_flag;
            if (top_k_flag >= 0) config.train.feature_top_k = top_k_flag;
            return cmd_run(config, run_spi, run_aoi, out_dir);
        }
        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const TrainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitTrain;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
