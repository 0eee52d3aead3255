#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spidet/core.hpp"
#include "spidet/eval.hpp"
#include "spidet/features.hpp"
#include "spidet/gbdt.hpp"
#include "spidet/ingest.hpp"

namespace spidet {

enum class FusionKind : std::uint8_t { AnyPositive, MajorityVote, MeanProbability };

struct FusionRule {
    FusionKind kind = FusionKind::AnyPositive;
    double mean_threshold = 0.5;  // only for MeanProbability
};

const char* to_string(FusionKind kind);
FusionKind parse_fusion(const std::string& text);

enum class ComponentMode : std::uint8_t { PerComponent, Combined };

struct RunConfig {
    ClassificationTask task = ClassificationTask::C1_AoiDefect;
    bool level_pin = true;
    bool level_component = false;
    bool level_board = false;
    ComponentMode component_mode = ComponentMode::Combined;
    std::optional<int> top_n_components;  // board-level target set; 35 when unset
    TrainConfig train;
    int folds = 5;
    FusionRule fusion;
    std::uint64_t seed = 7;
    bool stratified = true;
    // board-level C2/C3 has too few instances per class to be useful; an
    // explicit override trains it anyway and records a warning
    bool allow_board_for_c23 = false;
    EncodingConfig encoding;
    SchemaConfig schema;
    unsigned jobs = 0;

    void validate() const;
};

struct Verdict {
    bool positive = false;
    double probability = 0;
};

// component verdict = OR over its pins, probability = max over pins
std::map<ComponentKey, Verdict> lift_pin_verdicts(
    const std::vector<std::pair<PinKey, Verdict>>& pin_verdicts);

// descending AOI defect count, ties by component_id ascending
std::vector<std::string> rank_components_by_defects(const std::vector<AoiRecord>& aoi);

// first-appearance component order; pin counts from distinct pin numbers
BoardLayout derive_layout(const std::vector<PinRecord>& pins);

struct ModelEntry {
    std::string name;  // pin/all, component/combined, component/<id>, board/<id>
    Level level = Level::Pin;
    std::string scope;  // all | combined | component id
    bool skipped = false;
    std::string skip_reason;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::int64_t positives = 0;
    EvalReport eval;
    std::vector<BoostedModel> fold_models;
    std::vector<std::pair<std::string, double>> top_importance;  // top 10 by gain
    std::optional<RocCurve> pooled_roc;
};

struct FusedFoldStat {
    ConfusionCounts counts;
    double recall = 0;
    double f1 = 0;
};

struct FusedMemberStat {
    std::string name;
    double recall_pooled = 0;
    std::vector<double> recall_fold;
};

struct FusedReport {
    std::vector<std::string> members;
    std::size_t population = 0;
    std::int64_t positives = 0;
    ConfusionCounts pooled;
    double f1 = 0;
    double macro_f1 = 0;
    double recall = 0;
    double precision = 0;
    std::vector<FusedFoldStat> folds;
    std::vector<FusedMemberStat> member_stats;
};

struct RunReport {
    RunConfig config;
    IngestReport spi_report;
    IngestReport aoi_report;
    std::vector<std::string> warnings;
    std::vector<ModelEntry> entries;
    std::optional<FusedReport> fused;
    double wall_seconds = 0;  // not part of the canonical text

    // deterministic: identical config + inputs give identical bytes,
    // regardless of the job count
    std::string to_text() const;
};

RunReport run(const RunConfig& config, const std::string& spi_path, const std::string& aoi_path);

// report.txt, metrics.csv, roc/*.csv, models/*.txt under out_dir; wall time
// goes to timing.txt so everything else stays byte-comparable
void write_run_outputs(const RunReport& report, const std::string& out_dir);

}  // namespace spidet
