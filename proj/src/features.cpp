#include "spidet/features.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

namespace spidet {

const char* to_string(ClassificationTask task) {
    switch (task) {
        case ClassificationTask::C1_AoiDefect: return "c1";
        case ClassificationTask::C2_OperatorLabel: return "c2";
        case ClassificationTask::C3_RepairLabel: return "c3";
    }
    return "?";
}

ClassificationTask parse_task(const std::string& text) {
    if (text == "c1") return ClassificationTask::C1_AoiDefect;
    if (text == "c2") return ClassificationTask::C2_OperatorLabel;
    if (text == "c3") return ClassificationTask::C3_RepairLabel;
    throw UsageError("unknown task '" + text + "' (valid: c1, c2, c3)");
}

FeatureTable build_pin_table(const std::vector<PinRecord>& pins, const EncodingConfig& encoding) {
    if (pins.empty()) throw DataError("build_pin_table: no pin records");
    FeatureTable t;
    t.level = Level::Pin;
    t.column_names = per_pin_feature_names(encoding);
    const std::size_t width = t.column_names.size();
    t.values.resize(pins.size() * width);
    t.row_keys.reserve(pins.size());
    for (std::size_t i = 0; i < pins.size(); ++i) {
        per_pin_feature_values(pins[i], encoding,
                               std::span<double>(t.values.data() + i * width, width));
        t.row_keys.push_back(RowKey::from(pins[i].key));
    }
    return t;
}

namespace {

// boards in first-appearance order -> deterministic row order independent of
// how the input was concatenated, as long as the input order is fixed
struct BoardIndex {
    std::vector<BoardKey> boards;
    std::unordered_map<std::int64_t, std::size_t> lookup;  // packed key -> index

    static std::int64_t pack(const BoardKey& b) { return b.panel_id * 1000003 + b.figure_id; }

    std::size_t get_or_add(const BoardKey& b) {
        auto [it, inserted] = lookup.try_emplace(pack(b), boards.size());
        if (inserted) boards.push_back(b);
        return it->second;
    }
    const std::size_t* find(const BoardKey& b) const {
        auto it = lookup.find(pack(b));
        return it == lookup.end() ? nullptr : &it->second;
    }
};

std::string board_name(const BoardKey& b) {
    return format("panel %lld figure %d", static_cast<long long>(b.panel_id), b.figure_id);
}

// rows of one component pivot in board order; pin_slots maps pin_number ->
// block position
struct ComponentPivot {
    std::vector<BoardKey> boards;
    std::vector<std::int32_t> pin_numbers;           // ascending, the shared pin set
    std::vector<std::vector<const PinRecord*>> rows;  // [board][slot]
};

ComponentPivot pivot_component(const std::vector<PinRecord>& pins, const std::string& component_id,
                               int expected_pin_count) {
    BoardIndex boards;
    std::set<std::int32_t> pin_set;
    std::vector<std::vector<const PinRecord*>> by_board;

    for (const auto& rec : pins) {
        if (rec.key.component_id != component_id) continue;
        pin_set.insert(rec.key.pin_number);
        std::size_t b = boards.get_or_add(board_of(rec.key));
        if (b == by_board.size()) by_board.emplace_back();
        by_board[b].push_back(&rec);
    }
    if (by_board.empty()) {
        throw DataError("no pin records for component " + component_id);
    }
    if (static_cast<int>(pin_set.size()) != expected_pin_count) {
        throw DataError(format("component %s: observed %zu distinct pins, layout expects %d",
                               component_id.c_str(), pin_set.size(), expected_pin_count));
    }

    ComponentPivot out;
    out.boards = boards.boards;
    out.pin_numbers.assign(pin_set.begin(), pin_set.end());
    std::unordered_map<std::int32_t, std::size_t> slot;
    for (std::size_t i = 0; i < out.pin_numbers.size(); ++i) slot[out.pin_numbers[i]] = i;

    out.rows.resize(out.boards.size());
    for (std::size_t b = 0; b < by_board.size(); ++b) {
        auto& row = out.rows[b];
        row.assign(out.pin_numbers.size(), nullptr);
        for (const PinRecord* rec : by_board[b]) {
            std::size_t s = slot[rec->key.pin_number];
            if (row[s] != nullptr) {
                throw DataError(format("component %s: duplicate pin %d on %s",
                                       component_id.c_str(), rec->key.pin_number,
                                       board_name(out.boards[b]).c_str()));
            }
            row[s] = rec;
        }
        for (std::size_t s = 0; s < row.size(); ++s) {
            if (row[s] == nullptr) {
                throw DataError(format("component %s: missing pin %d on %s",
                                       component_id.c_str(), out.pin_numbers[s],
                                       board_name(out.boards[b]).c_str()));
            }
        }
    }
    return out;
}

}  // namespace

FeatureTable build_component_table(const std::vector<PinRecord>& pins,
                                   const std::string& component_id, const BoardLayout& layout,
                                   const EncodingConfig& encoding) {
    const ComponentSpec* spec = layout.find(component_id);
    if (!spec) throw DataError("component " + component_id + " not in layout");
    ComponentPivot pivot = pivot_component(pins, component_id, spec->pin_count);

    const std::vector<std::string> pin_names = per_pin_feature_names(encoding);
    const std::size_t pin_width = pin_names.size();

    FeatureTable t;
    t.level = Level::Component;
    for (std::int32_t pin : pivot.pin_numbers) {
        for (const auto& name : pin_names) t.column_names.push_back(name + format("@pin%d", pin));
    }
    const std::size_t width = t.column_names.size();
    t.values.resize(pivot.boards.size() * width);
    t.row_keys.reserve(pivot.boards.size());
    for (std::size_t b = 0; b < pivot.boards.size(); ++b) {
        for (std::size_t s = 0; s < pivot.pin_numbers.size(); ++s) {
            per_pin_feature_values(
                *pivot.rows[b][s], encoding,
                std::span<double>(t.values.data() + b * width + s * pin_width, pin_width));
        }
        t.row_keys.push_back(
            RowKey::from(ComponentKey{pivot.boards[b].panel_id, pivot.boards[b].figure_id,
                                      component_id}));
    }
    return t;
}

FeatureTable build_board_table(const std::vector<PinRecord>& pins, const BoardLayout& layout,
                               const EncodingConfig& encoding) {
    if (layout.components.empty()) throw UsageError("board layout has no components");

    FeatureTable t;
    t.level = Level::Board;

    std::vector<FeatureTable> parts;
    parts.reserve(layout.components.size());
    for (const auto& comp : layout.components) {
        parts.push_back(build_component_table(pins, comp.id, layout, encoding));
        for (const auto& name : parts.back().column_names) {
            t.column_names.push_back(comp.id + "/" + name);
        }
    }

    // all parts must cover the same boards; order by the first part
    const std::size_t n_boards = parts.front().rows();
    for (std::size_t p = 1; p < parts.size(); ++p) {
        if (parts[p].rows() != n_boards) {
            throw DataError(format("component %s covers %zu boards, %s covers %zu",
                                   layout.components[p].id.c_str(), parts[p].rows(),
                                   layout.components[0].id.c_str(), n_boards));
        }
    }
    std::vector<std::vector<std::size_t>> row_of_board(parts.size());
    {
        std::map<BoardKey, std::size_t> first_order;
        for (std::size_t b = 0; b < n_boards; ++b) {
            first_order[parts[0].row_keys[b].board_key()] = b;
        }
        for (std::size_t p = 0; p < parts.size(); ++p) {
            row_of_board[p].resize(n_boards);
            std::size_t matched = 0;
            for (std::size_t r = 0; r < parts[p].rows(); ++r) {
                auto it = first_order.find(parts[p].row_keys[r].board_key());
                if (it == first_order.end()) {
                    throw DataError(format("component %s has board %s unknown to %s",
                                           layout.components[p].id.c_str(),
                                           board_name(parts[p].row_keys[r].board_key()).c_str(),
                                           layout.components[0].id.c_str()));
                }
                row_of_board[p][it->second] = r;
                ++matched;
            }
            (void)matched;
        }
    }

    const std::size_t width = t.column_names.size();
    t.values.resize(n_boards * width);
    t.row_keys.reserve(n_boards);
    for (std::size_t b = 0; b < n_boards; ++b) {
        double* dst = t.values.data() + b * width;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            auto src = parts[p].row(row_of_board[p][b]);
            std::copy(src.begin(), src.end(), dst);
            dst += src.size();
        }
        t.row_keys.push_back(RowKey::from(parts.front().row_keys[b].board_key()));
    }
    return t;
}

FeatureTable build_combined_component_table(const std::vector<PinRecord>& pins,
                                            const BoardLayout& layout,
                                            const EncodingConfig& encoding) {
    if (layout.components.empty()) throw UsageError("board layout has no components");
    int max_pins = 0;
    for (const auto& c : layout.components) max_pins = std::max(max_pins, c.pin_count);

    const std::vector<std::string> pin_names = per_pin_feature_names(encoding);
    const std::size_t pin_width = pin_names.size();

    FeatureTable t;
    t.level = Level::Component;
    for (int p = 1; p <= max_pins; ++p) {
        for (const auto& name : pin_names) t.column_names.push_back(name + format("@pin%d", p));
    }
    const std::size_t width = t.column_names.size();

    // stack per-component pivots; pins land by ordinal within the component's
    // sorted pin set, remaining slots stay zero
    std::size_t total_rows = 0;
    std::vector<ComponentPivot> pivots;
    pivots.reserve(layout.components.size());
    for (const auto& comp : layout.components) {
        pivots.push_back(pivot_component(pins, comp.id, comp.pin_count));
        total_rows += pivots.back().boards.size();
    }
    t.values.assign(total_rows * width, 0.0);
    t.row_keys.reserve(total_rows);
    std::size_t row = 0;
    for (std::size_t ci = 0; ci < pivots.size(); ++ci) {
        const auto& pivot = pivots[ci];
        for (std::size_t b = 0; b < pivot.boards.size(); ++b, ++row) {
            for (std::size_t s = 0; s < pivot.pin_numbers.size(); ++s) {
                per_pin_feature_values(
                    *pivot.rows[b][s], encoding,
                    std::span<double>(t.values.data() + row * width + s * pin_width, pin_width));
            }
            t.row_keys.push_back(RowKey::from(ComponentKey{
                pivot.boards[b].panel_id, pivot.boards[b].figure_id, layout.components[ci].id}));
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Label joins
// ---------------------------------------------------------------------------

namespace {

struct PinKeyHash {
    std::size_t operator()(const PinKey& k) const {
        std::uint64_t h = mix64(static_cast<std::uint64_t>(k.panel_id),
                                static_cast<std::uint64_t>(k.figure_id) << 32 |
                                    static_cast<std::uint32_t>(k.pin_number));
        return static_cast<std::size_t>(h ^ std::hash<std::string>{}(k.component_id));
    }
};

struct ComponentKeyHash {
    std::size_t operator()(const ComponentKey& k) const {
        std::uint64_t h = mix64(static_cast<std::uint64_t>(k.panel_id),
                                static_cast<std::uint64_t>(k.figure_id));
        return static_cast<std::size_t>(h ^ std::hash<std::string>{}(k.component_id));
    }
};

void require_board_target(const FeatureTable& table, const std::string& board_target_component) {
    if (table.level == Level::Board && board_target_component.empty()) {
        throw UsageError("board-level label join needs a target component");
    }
}

ComponentKey row_component_key(const RowKey& key, Level level,
                               const std::string& board_target_component) {
    if (level == Level::Board) {
        return ComponentKey{key.panel_id, key.figure_id, board_target_component};
    }
    return key.component_key();
}

}  // namespace

FeatureTable attach_labels_c1(const FeatureTable& table, const std::vector<AoiRecord>& aoi,
                              const std::string& board_target_component, JoinStats* stats) {
    require_board_target(table, board_target_component);
    JoinStats local;

    FeatureTable out = table;
    out.target = std::vector<std::uint8_t>(table.rows(), 0);

    if (table.level == Level::Pin) {
        std::unordered_map<PinKey, std::size_t, PinKeyHash> positive;
        for (const auto& rec : aoi) {
            auto key = rec.pin_key();
            if (!key) {
                ++local.aoi_missing_pin_skipped;
                continue;
            }
            positive.try_emplace(*key, 0);
        }
        std::size_t matched_records = 0;
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const RowKey& k = table.row_keys[r];
            PinKey pk{k.panel_id, k.figure_id, k.component_id, k.pin_number};
            auto it = positive.find(pk);
            if (it != positive.end()) {
                (*out.target)[r] = 1;
                ++it->second;
                ++matched_records;
            }
        }
        for (const auto& [key, hits] : positive) {
            if (hits == 0) ++local.aoi_unmatched;
        }
        (void)matched_records;
    } else {
        std::unordered_map<ComponentKey, std::size_t, ComponentKeyHash> positive;
        for (const auto& rec : aoi) positive.try_emplace(rec.component_key(), 0);
        for (std::size_t r = 0; r < table.rows(); ++r) {
            ComponentKey ck =
                row_component_key(table.row_keys[r], table.level, board_target_component);
            auto it = positive.find(ck);
            if (it != positive.end()) {
                (*out.target)[r] = 1;
                ++it->second;
            }
        }
        if (table.level == Level::Component) {
            for (const auto& [key, hits] : positive) {
                if (hits == 0) ++local.aoi_unmatched;
            }
        }
    }
    if (stats) *stats = local;
    return out;
}

namespace {

// shared inner-join machinery for C2/C3: collect matching AOI rows per feature
// row, then aggregate (multi-hot max for the fault one-hot, max for targets)
struct InnerJoinResult {
    std::vector<std::size_t> kept_rows;
    std::vector<std::vector<const AoiRecord*>> matches;  // aligned with kept_rows
};

InnerJoinResult inner_join(const FeatureTable& table, const std::vector<const AoiRecord*>& usable,
                           const std::string& board_target_component, JoinStats& stats) {
    InnerJoinResult out;
    if (table.level == Level::Pin) {
        std::unordered_map<PinKey, std::vector<const AoiRecord*>, PinKeyHash> by_pin;
        for (const AoiRecord* rec : usable) {
            auto key = rec->pin_key();
            if (!key) {
                ++stats.aoi_missing_pin_skipped;
                continue;
            }
            by_pin[*key].push_back(rec);
        }
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const RowKey& k = table.row_keys[r];
            auto it = by_pin.find(PinKey{k.panel_id, k.figure_id, k.component_id, k.pin_number});
            if (it != by_pin.end()) {
                out.kept_rows.push_back(r);
                out.matches.push_back(it->second);
                it->second.clear();  // mark as matched
                by_pin.erase(it);
            }
        }
        stats.aoi_unmatched += static_cast<std::int64_t>(by_pin.size());
    } else {
        std::unordered_map<ComponentKey, std::vector<const AoiRecord*>, ComponentKeyHash> by_comp;
        for (const AoiRecord* rec : usable) by_comp[rec->component_key()].push_back(rec);
        for (std::size_t r = 0; r < table.rows(); ++r) {
            ComponentKey ck =
                row_component_key(table.row_keys[r], table.level, board_target_component);
            auto it = by_comp.find(ck);
            if (it != by_comp.end()) {
                out.kept_rows.push_back(r);
                out.matches.push_back(it->second);
                by_comp.erase(it);
            }
        }
        if (table.level == Level::Component) {
            stats.aoi_unmatched += static_cast<std::int64_t>(by_comp.size());
        }
    }
    stats.rows_dropped += static_cast<std::int64_t>(table.rows() - out.kept_rows.size());
    return out;
}

FeatureTable assemble_joined(const FeatureTable& table, const InnerJoinResult& join,
                             const EncodingConfig& encoding, bool add_operator_column,
                             const std::function<std::uint8_t(const AoiRecord&)>& target_of) {
    const auto& vocab = encoding.aoi_fault_vocabulary;
    FeatureTable out;
    out.level = table.level;
    out.column_names = table.column_names;
    for (const auto& token : vocab) out.column_names.push_back("AoiLabel=" + token);
    if (add_operator_column) out.column_names.push_back("OperatorLabel");

    const std::size_t in_width = table.cols();
    const std::size_t width = out.column_names.size();
    out.values.assign(join.kept_rows.size() * width, 0.0);
    out.row_keys.reserve(join.kept_rows.size());
    out.target = std::vector<std::uint8_t>(join.kept_rows.size(), 0);

    for (std::size_t i = 0; i < join.kept_rows.size(); ++i) {
        const std::size_t src = join.kept_rows[i];
        double* dst = out.values.data() + i * width;
        auto row = table.row(src);
        std::copy(row.begin(), row.end(), dst);
        std::uint8_t target = 0;
        std::uint8_t any_bad = 0;
        for (const AoiRecord* rec : join.matches[i]) {
            int idx = vocabulary_index(vocab, rec->machine_label);
            if (idx >= 0) dst[in_width + static_cast<std::size_t>(idx)] = 1.0;
            target = std::max(target, target_of(*rec));
            if (rec->operator_label == OperatorLabel::Bad) any_bad = 1;
        }
        if (add_operator_column) dst[width - 1] = static_cast<double>(any_bad);
        out.row_keys.push_back(table.row_keys[src]);
        (*out.target)[i] = target;
    }
    return out;
}

}  // namespace

FeatureTable attach_labels_c2(const FeatureTable& table, const std::vector<AoiRecord>& aoi,
                              const EncodingConfig& encoding,
                              const std::string& board_target_component, JoinStats* stats) {
    require_board_target(table, board_target_component);
    JoinStats local;
    std::vector<const AoiRecord*> usable;
    usable.reserve(aoi.size());
    for (const auto& rec : aoi) usable.push_back(&rec);
    InnerJoinResult join = inner_join(table, usable, board_target_component, local);
    FeatureTable out = assemble_joined(table, join, encoding, /*add_operator_column=*/false,
                                       [](const AoiRecord& rec) -> std::uint8_t {
                                           return rec.operator_label == OperatorLabel::Bad ? 1 : 0;
                                       });
    if (stats) *stats = local;
    return out;
}

FeatureTable attach_labels_c3(const FeatureTable& table, const std::vector<AoiRecord>& aoi,
                              const EncodingConfig& encoding,
                              const std::string& board_target_component, JoinStats* stats) {
    require_board_target(table, board_target_component);
    JoinStats local;
    std::vector<const AoiRecord*> usable;
    for (const auto& rec : aoi) {
        if (rec.operator_label != OperatorLabel::Bad) continue;
        if (!rec.repair_label) {
            ++local.bad_without_repair_dropped;
            continue;
        }
        usable.push_back(&rec);
    }
    InnerJoinResult join = inner_join(table, usable, board_target_component, local);
    FeatureTable out = assemble_joined(table, join, encoding, /*add_operator_column=*/true,
                                       [](const AoiRecord& rec) -> std::uint8_t {
                                           return *rec.repair_label ==
                                                          RepairLabel::NotPossibleToRepair
                                                      ? 1
                                                      : 0;
                                       });
    if (stats) *stats = local;
    return out;
}

// ---------------------------------------------------------------------------
// Fold splitting
// ---------------------------------------------------------------------------

std::vector<FoldIndices> kfold_split(const FeatureTable& table, int k, std::uint64_t seed,
                                     bool stratified) {
    if (k < 2) throw UsageError("kfold_split: k must be at least 2");
    const std::size_t n = table.rows();
    if (n < static_cast<std::size_t>(k)) throw UsageError("kfold_split: fewer rows than folds");
    if (stratified && !table.has_target()) {
        throw UsageError("kfold_split: stratified mode needs a target");
    }

    // group rows; a group is one row at pin level, one board otherwise
    std::vector<std::vector<std::size_t>> groups;
    if (table.level == Level::Pin) {
        groups.resize(n);
        for (std::size_t i = 0; i < n; ++i) groups[i] = {i};
    } else {
        std::map<BoardKey, std::size_t> index;  // ordered for determinism
        for (std::size_t i = 0; i < n; ++i) {
            BoardKey b = table.row_keys[i].board_key();
            auto [it, inserted] = index.try_emplace(b, groups.size());
            if (inserted) groups.emplace_back();
            groups[it->second].push_back(i);
        }
    }

    Rng rng(mix64(seed, 0x6b666f6c64ULL));  // "kfold"
    std::vector<std::size_t> order(groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> fold_rows(static_cast<std::size_t>(k));
    std::vector<std::int64_t> fold_sizes(static_cast<std::size_t>(k), 0);

    auto smallest_fold = [&](const std::vector<std::int64_t>& metric) {
        std::size_t best = 0;
        for (std::size_t f = 1; f < metric.size(); ++f) {
            if (metric[f] < metric[best]) best = f;
        }
        return best;
    };

    if (!stratified) {
        for (std::size_t gi : order) {
            std::size_t f = smallest_fold(fold_sizes);
            for (std::size_t row : groups[gi]) fold_rows[f].push_back(row);
            fold_sizes[f] += static_cast<std::int64_t>(groups[gi].size());
        }
    } else {
        const auto& target = *table.target;
        std::vector<std::int64_t> group_pos(groups.size(), 0);
        std::int64_t total_pos = 0;
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            for (std::size_t row : groups[gi]) group_pos[gi] += target[row];
            total_pos += group_pos[gi];
        }
        if (total_pos < k) {
            throw DataError(format(
                "kfold_split: stratified mode needs at least %d positive rows (have %lld); "
                "use unstratified splitting",
                k, static_cast<long long>(total_pos)));
        }
        // positive-bearing groups first (shuffled order within equal counts),
        // each to the fold with the fewest positives, then size as tiebreak
        std::vector<std::size_t> by_pos = order;
        std::stable_sort(by_pos.begin(), by_pos.end(), [&](std::size_t a, std::size_t b) {
            return group_pos[a] > group_pos[b];
        });
        std::vector<std::int64_t> fold_pos(static_cast<std::size_t>(k), 0);
        for (std::size_t gi : by_pos) {
            std::size_t f;
            if (group_pos[gi] > 0) {
                f = 0;
                for (std::size_t c = 1; c < fold_pos.size(); ++c) {
                    if (fold_pos[c] < fold_pos[f] ||
                        (fold_pos[c] == fold_pos[f] && fold_sizes[c] < fold_sizes[f])) {
                        f = c;
                    }
                }
            } else {
                f = smallest_fold(fold_sizes);
            }
            for (std::size_t row : groups[gi]) fold_rows[f].push_back(row);
            fold_sizes[f] += static_cast<std::int64_t>(groups[gi].size());
            fold_pos[f] += group_pos[gi];
        }
    }

    std::vector<FoldIndices> out(static_cast<std::size_t>(k));
    for (std::size_t f = 0; f < fold_rows.size(); ++f) {
        std::sort(fold_rows[f].begin(), fold_rows[f].end());
        out[f].test = fold_rows[f];
        for (std::size_t g = 0; g < fold_rows.size(); ++g) {
            if (g == f) continue;
            out[f].train.insert(out[f].train.end(), fold_rows[g].begin(), fold_rows[g].end());
        }
        std::sort(out[f].train.begin(), out[f].train.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Table utilities
// ---------------------------------------------------------------------------

FeatureTable subset_rows(const FeatureTable& table, const std::vector<std::size_t>& indices) {
    FeatureTable out;
    out.level = table.level;
    out.column_names = table.column_names;
    const std::size_t width = table.cols();
    out.values.resize(indices.size() * width);
    out.row_keys.reserve(indices.size());
    if (table.target) out.target = std::vector<std::uint8_t>();
    for (std::size_t i = 0; i < indices.size(); ++i) {
        std::size_t src = indices[i];
        if (src >= table.rows()) throw Error("subset_rows: index out of range");
        auto row = table.row(src);
        std::copy(row.begin(), row.end(), out.values.data() + i * width);
        out.row_keys.push_back(table.row_keys[src]);
        if (table.target) out.target->push_back((*table.target)[src]);
    }
    return out;
}

FeatureTable select_columns(const FeatureTable& table, const std::vector<std::string>& names) {
    std::set<std::string> wanted(names.begin(), names.end());
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < table.cols(); ++c) {
        if (wanted.count(table.column_names[c])) {
            keep.push_back(c);
            wanted.erase(table.column_names[c]);
        }
    }
    if (!wanted.empty()) {
        std::string msg = "select_columns: unknown columns:";
        for (const auto& s : wanted) msg += " " + s;
        throw DataError(msg);
    }
    FeatureTable out;
    out.level = table.level;
    out.row_keys = table.row_keys;
    out.target = table.target;
    for (std::size_t c : keep) out.column_names.push_back(table.column_names[c]);
    out.values.resize(table.rows() * keep.size());
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t i = 0; i < keep.size(); ++i) {
            out.values[r * keep.size() + i] = table.at(r, keep[i]);
        }
    }
    return out;
}

void write_feature_table_csv(const FeatureTable& table, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot write " + path);
    std::fputs("__key_panel,__key_figure", f);
    if (table.level != Level::Board) std::fputs(",__key_component", f);
    if (table.level == Level::Pin) std::fputs(",__key_pin", f);
    for (const auto& name : table.column_names) std::fprintf(f, ",%s", name.c_str());
    if (table.has_target()) std::fputs(",__target__", f);
    std::fputc('\n', f);
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const RowKey& k = table.row_keys[r];
        std::fprintf(f, "%lld,%d", static_cast<long long>(k.panel_id), k.figure_id);
        if (table.level != Level::Board) std::fprintf(f, ",%s", k.component_id.c_str());
        if (table.level == Level::Pin) std::fprintf(f, ",%d", k.pin_number);
        for (std::size_t c = 0; c < table.cols(); ++c) std::fprintf(f, ",%.9g", table.at(r, c));
        if (table.has_target()) std::fprintf(f, ",%d", static_cast<int>((*table.target)[r]));
        std::fputc('\n', f);
    }
    bool bad = std::ferror(f) != 0;
    std::fclose(f);
    if (bad) throw IoError("write failed: " + path);
}

}  // namespace spidet
