#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spidet/common.hpp"

namespace spidet {

// ---------------------------------------------------------------------------
// Identity keys. A panel carries figures_per_panel boards ("figures"); each
// board carries the layout's components; each component carries numbered pins.
// ---------------------------------------------------------------------------

struct PinKey {
    std::int64_t panel_id = 0;
    std::int32_t figure_id = 0;
    std::string component_id;
    std::int32_t pin_number = 0;

    auto operator<=>(const PinKey&) const = default;
};

struct ComponentKey {
    std::int64_t panel_id = 0;
    std::int32_t figure_id = 0;
    std::string component_id;

    auto operator<=>(const ComponentKey&) const = default;
};

struct BoardKey {
    std::int64_t panel_id = 0;
    std::int32_t figure_id = 0;

    auto operator<=>(const BoardKey&) const = default;
};

inline ComponentKey component_of(const PinKey& k) {
    return ComponentKey{k.panel_id, k.figure_id, k.component_id};
}
inline BoardKey board_of(const PinKey& k) { return BoardKey{k.panel_id, k.figure_id}; }
inline BoardKey board_of(const ComponentKey& k) { return BoardKey{k.panel_id, k.figure_id}; }

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

// Number of numeric solder-paste measurements carried per pin.
inline constexpr int kNumPinNumerics = 12;

// Column order of the numeric block; identical to the SPI CSV header names.
const std::vector<std::string>& pin_numeric_names();

struct PinRecord {
    PinKey key;
    std::string date;  // carried through, excluded from features by default
    std::string time;
    std::int32_t pad_id = 0;
    std::int8_t pad_type = 0;  // {0,1}

    double volume_pct = 0;
    double height_um = 0;
    double area_pct = 0;
    double offset_x_pct = 0;
    double offset_y_pct = 0;
    double size_x = 0;
    double size_y = 0;
    double volume_um3 = 0;
    double area_um2 = 0;
    double shape_um = 0;
    double pos_x_mm = 0;
    double pos_y_mm = 0;

    std::string spi_result;  // closed vocabulary; unknown tokens fall into "other"

    double numeric(int i) const;
    double& numeric(int i);
};

enum class OperatorLabel : std::uint8_t { Good = 0, Bad = 1 };
enum class RepairLabel : std::uint8_t { FalseScrap = 0, NotPossibleToRepair = 1 };

struct AoiRecord {
    std::int64_t panel_id = 0;
    std::int32_t figure_id = 0;
    std::string component_id;
    std::optional<std::int32_t> pin_number;  // missing in a fraction of real rows
    std::string machine_label;
    OperatorLabel operator_label = OperatorLabel::Good;
    std::optional<RepairLabel> repair_label;  // present only when operator_label == Bad

    ComponentKey component_key() const { return ComponentKey{panel_id, figure_id, component_id}; }
    std::optional<PinKey> pin_key() const {
        if (!pin_number) return std::nullopt;
        return PinKey{panel_id, figure_id, component_id, *pin_number};
    }
};

const char* to_string(OperatorLabel label);
const char* to_string(RepairLabel label);

// ---------------------------------------------------------------------------
// Board layout
// ---------------------------------------------------------------------------

struct ComponentSpec {
    std::string id;
    int pin_count = 0;
};

struct BoardLayout {
    std::vector<ComponentSpec> components;  // ordered; drives board-table column order
    int figures_per_panel = 8;

    const ComponentSpec* find(const std::string& id) const;
};

// The production board: 128 components, pin-count histogram
// {2:108, 3:1, 5:3, 6:7, 8:8, 49:1}, 389 pins per board, 8 boards per panel.
BoardLayout default_layout();

std::int64_t total_pins(const BoardLayout& layout);

// ---------------------------------------------------------------------------
// Feature encoding
// ---------------------------------------------------------------------------

struct EncodingConfig {
    bool use_spi_result = true;
    std::vector<std::string> spi_result_vocabulary = {"Good", "W.Insufficient", "E.shape",
                                                      "E.Position"};
    // vocabulary for the AOI machine label appended by the C2/C3 joins
    std::vector<std::string> aoi_fault_vocabulary = {"lean soldering", "translated", "misaligned",
                                                     "other"};
    bool include_pad_id = false;
    bool include_date_time = false;

    int per_pin_width() const;
};

std::vector<std::string> per_pin_feature_names(const EncodingConfig& encoding);

// Fills out[0 .. per_pin_width). Throws DataError naming the field on a
// non-finite numeric. Unknown spi_result tokens set the vocabulary's "other"
// column when one is configured, otherwise the whole one-hot block stays zero.
void per_pin_feature_values(const PinRecord& record, const EncodingConfig& encoding,
                            std::span<double> out);

std::pair<std::vector<std::string>, std::vector<double>> per_pin_feature_vector(
    const PinRecord& record, const EncodingConfig& encoding);

// one-hot position of a token, honoring the reserved "other" fallback; -1 if
// the token is unknown and the vocabulary has no "other" entry
int vocabulary_index(const std::vector<std::string>& vocabulary, const std::string& token);

// ---------------------------------------------------------------------------
// FeatureTable: the dense numeric unit passed between aggregation, training
// and evaluation. Immutable once built; shared freely across threads.
// ---------------------------------------------------------------------------

enum class Level : std::uint8_t { Pin, Component, Board };

const char* to_string(Level level);

// Compact homogeneous row key; the table's level says which fields apply.
struct RowKey {
    std::int64_t panel_id = 0;
    std::int32_t figure_id = 0;
    std::string component_id;  // empty at board level
    std::int32_t pin_number = 0;  // 0 unless pin level

    auto operator<=>(const RowKey&) const = default;

    static RowKey from(const PinKey& k) { return {k.panel_id, k.figure_id, k.component_id, k.pin_number}; }
    static RowKey from(const ComponentKey& k) { return {k.panel_id, k.figure_id, k.component_id, 0}; }
    static RowKey from(const BoardKey& k) { return {k.panel_id, k.figure_id, "", 0}; }

    ComponentKey component_key() const { return {panel_id, figure_id, component_id}; }
    BoardKey board_key() const { return {panel_id, figure_id}; }
};

struct FeatureTable {
    Level level = Level::Pin;
    std::vector<std::string> column_names;
    std::vector<double> values;  // row-major, rows() x cols()
    std::vector<RowKey> row_keys;
    std::optional<std::vector<std::uint8_t>> target;  // {0,1}, aligned with rows

    std::size_t rows() const { return row_keys.size(); }
    std::size_t cols() const { return column_names.size(); }

    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values.data() + r * cols(), cols());
    }

    bool has_target() const { return target.has_value(); }

    // checks row/target alignment, finiteness and column-name uniqueness
    void validate() const;
};

}  // namespace spidet
