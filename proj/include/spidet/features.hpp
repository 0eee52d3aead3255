#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spidet/core.hpp"

namespace spidet {

// The three cascaded binary objectives. C2 rows live inside the AOI-positive
// population, C3 rows inside the operator-Bad population.
enum class ClassificationTask : std::uint8_t { C1_AoiDefect, C2_OperatorLabel, C3_RepairLabel };

const char* to_string(ClassificationTask task);
ClassificationTask parse_task(const std::string& text);  // "c1" | "c2" | "c3"

// ---------------------------------------------------------------------------
// Table construction
// ---------------------------------------------------------------------------

FeatureTable build_pin_table(const std::vector<PinRecord>& pins, const EncodingConfig& encoding);

// One row per board; the component's pins concatenated in ascending pin_number
// order, names suffixed "@pin<k>". Every board must carry the same pin set of
// layout size, otherwise a structural error names the offending BoardKey.
FeatureTable build_component_table(const std::vector<PinRecord>& pins,
                                   const std::string& component_id, const BoardLayout& layout,
                                   const EncodingConfig& encoding);

// One row per board; all component blocks in layout order, names prefixed
// "<component_id>/".
FeatureTable build_board_table(const std::vector<PinRecord>& pins, const BoardLayout& layout,
                               const EncodingConfig& encoding);

// One row per (board, component): every component's pivot stacked into a
// single table, zero-padded to the layout's largest pin count. Backs the
// "one model for all the components combined" training mode.
FeatureTable build_combined_component_table(const std::vector<PinRecord>& pins,
                                            const BoardLayout& layout,
                                            const EncodingConfig& encoding);

// ---------------------------------------------------------------------------
// Label joins
// ---------------------------------------------------------------------------

struct JoinStats {
    std::int64_t aoi_missing_pin_skipped = 0;  // AOI rows unusable at pin level
    std::int64_t aoi_unmatched = 0;            // AOI rows matching no feature row
    std::int64_t bad_without_repair_dropped = 0;
    std::int64_t rows_dropped = 0;  // feature rows removed by an inner join
};

// Left join: every feature row kept; target 1 iff an AOI record matches the
// row's key at the table's level. Board tables need the target component.
FeatureTable attach_labels_c1(const FeatureTable& table, const std::vector<AoiRecord>& aoi,
                              const std::string& board_target_component = {},
                              JoinStats* stats = nullptr);

// Inner join onto AOI; machine label appended one-of-K (multi-hot max when
// several faults land on one component); target = operator label, any Bad -> 1.
FeatureTable attach_labels_c2(const FeatureTable& table, const std::vector<AoiRecord>& aoi,
                              const EncodingConfig& encoding,
                              const std::string& board_target_component = {},
                              JoinStats* stats = nullptr);

// Inner join restricted to operator-Bad AOI rows; machine and operator labels
// appended; target 1 = NotPossibleToRepair, 0 = FalseScrap.
FeatureTable attach_labels_c3(const FeatureTable& table, const std::vector<AoiRecord>& aoi,
                              const EncodingConfig& encoding,
                              const std::string& board_target_component = {},
                              JoinStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Fold splitting
// ---------------------------------------------------------------------------

struct FoldIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Partition of row indices into k folds (sizes within 1 for per-row groups).
// Component/Board tables split at board granularity so no board straddles a
// fold boundary; pin tables split per row. Stratified mode balances positives
// per fold and requires at least k positive rows.
std::vector<FoldIndices> kfold_split(const FeatureTable& table, int k, std::uint64_t seed,
                                     bool stratified);

// ---------------------------------------------------------------------------
// Table utilities
// ---------------------------------------------------------------------------

FeatureTable subset_rows(const FeatureTable& table, const std::vector<std::size_t>& indices);

// keeps the named columns in the table's original order; throws on unknown names
FeatureTable select_columns(const FeatureTable& table, const std::vector<std::string>& names);

// header = __key_* columns, feature columns, then __target__ when present
void write_feature_table_csv(const FeatureTable& table, const std::string& path);

}  // namespace spidet
