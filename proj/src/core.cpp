#include "spidet/core.hpp"

#include <cmath>
#include <set>

namespace spidet {

const std::vector<std::string>& pin_numeric_names() {
    static const std::vector<std::string> names = {
        "Volume(%)", "Height(um)", "Area(%)",  "OffsetX(%)",  "OffsetY(%)", "SizeX",
        "SizeY",     "Volume(um3)", "Area(um2)", "Shape(um)", "PosX(mm)",   "PosY(mm)"};
    return names;
}

double PinRecord::numeric(int i) const {
    switch (i) {
        case 0: return volume_pct;
        case 1: return height_um;
        case 2: return area_pct;
        case 3: return offset_x_pct;
        case 4: return offset_y_pct;
        case 5: return size_x;
        case 6: return size_y;
        case 7: return volume_um3;
        case 8: return area_um2;
        case 9: return shape_um;
        case 10: return pos_x_mm;
        case 11: return pos_y_mm;
        default: throw Error("numeric index out of range");
    }
}

double& PinRecord::numeric(int i) {
    switch (i) {
        case 0: return volume_pct;
        case 1: return height_um;
        case 2: return area_pct;
        case 3: return offset_x_pct;
        case 4: return offset_y_pct;
        case 5: return size_x;
        case 6: return size_y;
        case 7: return volume_um3;
        case 8: return area_um2;
        case 9: return shape_um;
        case 10: return pos_x_mm;
        case 11: return pos_y_mm;
        default: throw Error("numeric index out of range");
    }
}

const char* to_string(OperatorLabel label) {
    return label == OperatorLabel::Good ? "Good" : "Bad";
}

const char* to_string(RepairLabel label) {
    return label == RepairLabel::FalseScrap ? "FalseScrap" : "NotPossibleToRepair";
}

const char* to_string(Level level) {
    switch (level) {
        case Level::Pin: return "pin";
        case Level::Component: return "component";
        case Level::Board: return "board";
    }
    return "?";
}

const ComponentSpec* BoardLayout::find(const std::string& id) const {
    for (const auto& c : components) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

BoardLayout default_layout() {
    BoardLayout layout;
    layout.figures_per_panel = 8;
    layout.components.reserve(128);
    auto add = [&](int count, int pins) {
        for (int i = 0; i < count; ++i) {
            int idx = static_cast<int>(layout.components.size()) + 1;
            layout.components.push_back({format("C%03d", idx), pins});
        }
    };
    add(108, 2);
    add(1, 3);
    add(3, 5);
    add(7, 6);
    add(8, 8);
    add(1, 49);
    return layout;
}

std::int64_t total_pins(const BoardLayout& layout) {
    if (layout.components.empty()) throw UsageError("board layout has no components");
    std::int64_t total = 0;
    for (const auto& c : layout.components) total += c.pin_count;
    return total;
}

int EncodingConfig::per_pin_width() const {
    int w = kNumPinNumerics + 1;  // numerics + PadType
    if (use_spi_result) w += static_cast<int>(spi_result_vocabulary.size());
    if (include_pad_id) w += 1;
    if (include_date_time) w += 2;
    return w;
}

std::vector<std::string> per_pin_feature_names(const EncodingConfig& encoding) {
    std::vector<std::string> names = pin_numeric_names();
    names.push_back("PadType");
    if (encoding.use_spi_result) {
        for (const auto& token : encoding.spi_result_vocabulary) names.push_back("Result=" + token);
    }
    if (encoding.include_pad_id) names.push_back("PadID");
    if (encoding.include_date_time) {
        names.push_back("DateOrdinal");
        names.push_back("TimeSeconds");
    }
    return names;
}

int vocabulary_index(const std::vector<std::string>& vocabulary, const std::string& token) {
    int other = -1;
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        if (vocabulary[i] == token) return static_cast<int>(i);
        if (vocabulary[i] == "other") other = static_cast<int>(i);
    }
    return other;
}

namespace {

// "2019-06-29" -> 20190629; non-conforming text -> 0
double date_ordinal(const std::string& date) {
    long v = 0;
    for (char ch : date) {
        if (ch >= '0' && ch <= '9') v = v * 10 + (ch - '0');
    }
    return static_cast<double>(v);
}

// "07:30:01" -> seconds of day; non-conforming text -> 0
double time_seconds(const std::string& time) {
    int parts[3] = {0, 0, 0};
    int p = 0;
    int cur = 0;
    for (char ch : time) {
        if (ch >= '0' && ch <= '9') {
            cur = cur * 10 + (ch - '0');
        } else if (ch == ':' && p < 2) {
            parts[p++] = cur;
            cur = 0;
        }
    }
    parts[p] = cur;
    return static_cast<double>(parts[0] * 3600 + parts[1] * 60 + parts[2]);
}

}  // namespace

void per_pin_feature_values(const PinRecord& record, const EncodingConfig& encoding,
                            std::span<double> out) {
    const std::size_t width = static_cast<std::size_t>(encoding.per_pin_width());
    if (out.size() != width) throw Error("per_pin_feature_values: output span size mismatch");
    for (int i = 0; i < kNumPinNumerics; ++i) {
        double v = record.numeric(i);
        if (!std::isfinite(v)) {
            throw DataError("non-finite value in field " + pin_numeric_names()[i]);
        }
        out[static_cast<std::size_t>(i)] = v;
    }
    std::size_t pos = kNumPinNumerics;
    out[pos++] = static_cast<double>(record.pad_type);
    if (encoding.use_spi_result) {
        const auto& vocab = encoding.spi_result_vocabulary;
        for (std::size_t i = 0; i < vocab.size(); ++i) out[pos + i] = 0.0;
        int idx = vocabulary_index(vocab, record.spi_result);
        if (idx >= 0) out[pos + static_cast<std::size_t>(idx)] = 1.0;
        pos += vocab.size();
    }
    if (encoding.include_pad_id) out[pos++] = static_cast<double>(record.pad_id);
    if (encoding.include_date_time) {
        out[pos++] = date_ordinal(record.date);
        out[pos++] = time_seconds(record.time);
    }
}

std::pair<std::vector<std::string>, std::vector<double>> per_pin_feature_vector(
    const PinRecord& record, const EncodingConfig& encoding) {
    std::vector<double> values(static_cast<std::size_t>(encoding.per_pin_width()));
    per_pin_feature_values(record, encoding, values);
    return {per_pin_feature_names(encoding), std::move(values)};
}

void FeatureTable::validate() const {
    if (values.size() != rows() * cols()) throw Error("feature table: values/shape mismatch");
    if (target && target->size() != rows()) throw Error("feature table: target/rows mismatch");
    std::set<std::string> seen;
    for (const auto& name : column_names) {
        if (!seen.insert(name).second) throw Error("feature table: duplicate column " + name);
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw Error("feature table: non-finite value");
    }
    if (target) {
        for (std::uint8_t t : *target) {
            if (t > 1) throw Error("feature table: target not in {0,1}");
        }
    }
}

}  // namespace spidet
