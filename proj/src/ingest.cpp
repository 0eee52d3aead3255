#include "spidet/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace spidet {

std::string SchemaConfig::spi_column(const std::string& logical) const {
    auto it = spi_columns.find(logical);
    return it == spi_columns.end() ? logical : it->second;
}

std::string SchemaConfig::aoi_column(const std::string& logical) const {
    auto it = aoi_columns.find(logical);
    return it == aoi_columns.end() ? logical : it->second;
}

void SchemaConfig::validate() const {
    if (decimal_comma && delimiter == ',') {
        throw UsageError("decimal_comma requires a delimiter other than ','");
    }
}

void ColumnStats::add(double v) {
    if (count == 0) {
        min = max = v;
        mean = v;
    } else {
        min = std::min(min, v);
        max = std::max(max, v);
        mean += (v - mean) / static_cast<double>(count + 1);
    }
    ++count;
}

void ColumnStats::merge(const ColumnStats& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    min = std::min(min, other.min);
    max = std::max(max, other.max);
    double total = static_cast<double>(count + other.count);
    mean = (mean * static_cast<double>(count) + other.mean * static_cast<double>(other.count)) / total;
    count += other.count;
}

void IngestReport::note_drop(std::int64_t line, bool nan, std::string reason) {
    if (nan) {
        ++rows_dropped_nan;
    } else {
        ++rows_dropped_malformed;
    }
    if (dropped_lines.size() < kMaxDroppedLines) {
        dropped_lines.emplace_back(line, std::move(reason));
    } else {
        ++dropped_lines_truncated;
    }
}

std::string IngestReport::to_text() const {
    std::string out;
    out += format("rows_read %lld\n", static_cast<long long>(rows_read));
    out += format("rows_kept %lld\n", static_cast<long long>(rows_kept));
    out += format("rows_dropped_nan %lld\n", static_cast<long long>(rows_dropped_nan));
    out += format("rows_dropped_malformed %lld\n", static_cast<long long>(rows_dropped_malformed));
    for (const auto& c : columns) {
        out += format("column %s count %lld min %.9g max %.9g mean %.9g\n", c.name.c_str(),
                      static_cast<long long>(c.count), c.min, c.max, c.mean);
    }
    for (const auto& [line, reason] : dropped_lines) {
        out += format("dropped line %lld: %s\n", static_cast<long long>(line), reason.c_str());
    }
    if (dropped_lines_truncated > 0) {
        out += format("dropped_lines_truncated %lld\n", static_cast<long long>(dropped_lines_truncated));
    }
    return out;
}

const std::vector<std::string>& spi_header() {
    static const std::vector<std::string> h = {
        "PanelID",    "FigureID", "Date",       "Time",       "ComponentID", "PinNumber",
        "PadID",      "PadType",  "Volume(%)",  "Height(um)", "Area(%)",     "OffsetX(%)",
        "OffsetY(%)", "SizeX",    "SizeY",      "Volume(um3)", "Area(um2)",  "Shape(um)",
        "PosX(mm)",   "PosY(mm)", "Result"};
    return h;
}

const std::vector<std::string>& aoi_header() {
    static const std::vector<std::string> h = {"PanelID",     "FigureID",      "ComponentID",
                                               "PinNumber",   "MachineLabel",  "OperatorLabel",
                                               "RepairLabel"};
    return h;
}

namespace {

std::string strip_cr(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            out.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// case-insensitive, space/underscore-insensitive token normalization for the
// operator/repair vocabularies
std::string squash(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' || c == '_' || c == '-' || c == '\t') continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool parse_double(std::string cell, bool decimal_comma, double& out) {
    if (decimal_comma) {
        std::replace(cell.begin(), cell.end(), ',', '.');
    }
    const char* begin = cell.c_str();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        // from_chars rejects "nan"/"inf" spellings in some libms; accept them
        // explicitly so they can be counted as nan drops
        std::string t = lower(std::string(begin, end));
        if (t == "nan" || t == "-nan" || t == "+nan") {
            out = std::numeric_limits<double>::quiet_NaN();
            return true;
        }
        if (t == "inf" || t == "+inf" || t == "-inf" || t == "infinity" || t == "-infinity") {
            out = t[0] == '-' ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
            return true;
        }
        return false;
    }
    return true;
}

bool parse_int(const std::string& cell, std::int64_t& out) {
    const char* begin = cell.c_str();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

struct HeaderMap {
    std::vector<int> index;  // logical position -> file column index
};

HeaderMap map_header(const std::vector<std::string>& file_header,
                     const std::vector<std::string>& wanted, const char* what) {
    HeaderMap m;
    m.index.resize(wanted.size(), -1);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < wanted.size(); ++i) {
        for (std::size_t j = 0; j < file_header.size(); ++j) {
            if (file_header[j] == wanted[i]) {
                m.index[i] = static_cast<int>(j);
                break;
            }
        }
        if (m.index[i] < 0) missing.push_back(wanted[i]);
    }
    if (!missing.empty()) {
        std::string msg = std::string(what) + " header missing columns:";
        for (const auto& s : missing) msg += " " + s;
        throw DataError(msg);
    }
    return m;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

}  // namespace

std::pair<std::vector<PinRecord>, IngestReport> read_spi(const std::string& path,
                                                         const SchemaConfig& schema) {
    schema.validate();
    std::ifstream in = open_input(path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input file: " + path);
    line = strip_cr(line);

    std::vector<std::string> wanted;
    for (const auto& name : spi_header()) wanted.push_back(schema.spi_column(name));
    HeaderMap hdr = map_header(split_line(line, schema.delimiter), wanted, "SPI");

    // logical positions in spi_header()
    constexpr int kPanel = 0, kFigure = 1, kDate = 2, kTime = 3, kComponent = 4, kPin = 5,
                  kPadId = 6, kPadType = 7, kFirstNumeric = 8, kResult = 20;

    IngestReport report;
    for (const auto& name : pin_numeric_names()) report.columns.push_back({name});

    std::vector<PinRecord> records;
    std::int64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        ++report.rows_read;
        std::vector<std::string> cells = split_line(line, schema.delimiter);

        auto cell = [&](int logical) -> const std::string* {
            int idx = hdr.index[static_cast<std::size_t>(logical)];
            if (idx < 0 || static_cast<std::size_t>(idx) >= cells.size()) return nullptr;
            return &cells[static_cast<std::size_t>(idx)];
        };

        PinRecord rec;
        bool ok = true;
        bool nan_drop = false;
        std::string reason;

        std::int64_t panel = 0, figure = 0, pin = 0, pad_id = 0, pad_type = 0;
        const std::string* c;
        if (!(c = cell(kPanel)) || !parse_int(*c, panel) || panel <= 0) {
            ok = false;
            reason = "bad PanelID";
        } else if (!(c = cell(kFigure)) || !parse_int(*c, figure) || figure <= 0) {
            ok = false;
            reason = "bad FigureID";
        } else if (!(c = cell(kComponent)) || c->empty()) {
            ok = false;
            reason = "bad ComponentID";
        } else {
            rec.key.panel_id = panel;
            rec.key.figure_id = static_cast<std::int32_t>(figure);
            rec.key.component_id = *c;
        }
        if (ok && (!(c = cell(kPin)) || !parse_int(*c, pin) || pin <= 0)) {
            ok = false;
            reason = "bad PinNumber";
        }
        if (ok && (!(c = cell(kPadId)) || !parse_int(*c, pad_id))) {
            ok = false;
            reason = "bad PadID";
        }
        if (ok && (!(c = cell(kPadType)) || !parse_int(*c, pad_type) ||
                   (pad_type != 0 && pad_type != 1))) {
            ok = false;
            reason = "bad PadType";
        }
        if (ok) {
            rec.key.pin_number = static_cast<std::int32_t>(pin);
            rec.pad_id = static_cast<std::int32_t>(pad_id);
            rec.pad_type = static_cast<std::int8_t>(pad_type);
            if ((c = cell(kDate))) rec.date = *c;
            if ((c = cell(kTime))) rec.time = *c;
            for (int i = 0; i < kNumPinNumerics && ok; ++i) {
                double v = 0;
                if (!(c = cell(kFirstNumeric + i)) || !parse_double(*c, schema.decimal_comma, v)) {
                    ok = false;
                    reason = "unparseable " + pin_numeric_names()[static_cast<std::size_t>(i)];
                } else if (!std::isfinite(v)) {
                    ok = false;
                    nan_drop = true;
                    reason = "non-finite " + pin_numeric_names()[static_cast<std::size_t>(i)];
                } else {
                    rec.numeric(i) = v;
                }
            }
        }
        if (ok) {
            if ((c = cell(kResult))) rec.spi_result = *c;
            for (int i = 0; i < kNumPinNumerics; ++i) {
                report.columns[static_cast<std::size_t>(i)].add(rec.numeric(i));
            }
            records.push_back(std::move(rec));
            ++report.rows_kept;
        } else {
            report.note_drop(line_no, nan_drop, reason);
        }
    }
    return {std::move(records), std::move(report)};
}

std::pair<std::vector<AoiRecord>, IngestReport> read_aoi(const std::string& path,
                                                         const SchemaConfig& schema) {
    schema.validate();
    std::ifstream in = open_input(path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input file: " + path);
    line = strip_cr(line);

    std::vector<std::string> wanted;
    for (const auto& name : aoi_header()) wanted.push_back(schema.aoi_column(name));
    HeaderMap hdr = map_header(split_line(line, schema.delimiter), wanted, "AOI");

    constexpr int kPanel = 0, kFigure = 1, kComponent = 2, kPin = 3, kMachine = 4, kOperator = 5,
                  kRepair = 6;

    IngestReport report;
    std::vector<AoiRecord> records;
    std::int64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        ++report.rows_read;
        std::vector<std::string> cells = split_line(line, schema.delimiter);
        auto cell = [&](int logical) -> const std::string* {
            int idx = hdr.index[static_cast<std::size_t>(logical)];
            if (idx < 0 || static_cast<std::size_t>(idx) >= cells.size()) return nullptr;
            return &cells[static_cast<std::size_t>(idx)];
        };

        AoiRecord rec;
        bool ok = true;
        std::string reason;
        std::int64_t panel = 0, figure = 0, pin = 0;
        const std::string* c;
        if (!(c = cell(kPanel)) || !parse_int(*c, panel) || panel <= 0) {
            ok = false;
            reason = "bad PanelID";
        } else if (!(c = cell(kFigure)) || !parse_int(*c, figure) || figure <= 0) {
            ok = false;
            reason = "bad FigureID";
        } else if (!(c = cell(kComponent)) || c->empty()) {
            ok = false;
            reason = "bad ComponentID";
        } else {
            rec.panel_id = panel;
            rec.figure_id = static_cast<std::int32_t>(figure);
            rec.component_id = *c;
        }
        if (ok) {
            c = cell(kPin);
            if (c && !c->empty()) {
                if (!parse_int(*c, pin) || pin <= 0) {
                    ok = false;
                    reason = "bad PinNumber";
                } else {
                    rec.pin_number = static_cast<std::int32_t>(pin);
                }
            }
        }
        if (ok) {
            if ((c = cell(kMachine))) rec.machine_label = *c;
            c = cell(kOperator);
            std::string op = c ? squash(*c) : "";
            if (op == "good") {
                rec.operator_label = OperatorLabel::Good;
            } else if (op == "bad") {
                rec.operator_label = OperatorLabel::Bad;
            } else {
                ok = false;
                reason = "unknown OperatorLabel '" + (c ? *c : std::string()) + "'";
            }
        }
        if (ok) {
            c = cell(kRepair);
            std::string rep = c ? squash(*c) : "";
            if (rec.operator_label == OperatorLabel::Bad) {
                if (rep == "falsescrap") {
                    rec.repair_label = RepairLabel::FalseScrap;
                } else if (rep == "notpossibletorepair") {
                    rec.repair_label = RepairLabel::NotPossibleToRepair;
                } else if (!rep.empty()) {
                    ok = false;
                    reason = "unknown RepairLabel '" + (c ? *c : std::string()) + "'";
                }
            } else if (!rep.empty() && rep != "falsescrap" && rep != "notpossibletorepair") {
                ok = false;
                reason = "unknown RepairLabel '" + (c ? *c : std::string()) + "'";
            }
            // repair text on Good rows is dropped: the label only exists downstream of Bad
        }
        if (ok) {
            records.push_back(std::move(rec));
            ++report.rows_kept;
        } else {
            report.note_drop(line_no, false, reason);
        }
    }
    return {std::move(records), std::move(report)};
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_output(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot write " + path);
    return FilePtr(f);
}

void put_header(std::FILE* out, const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) std::fputc(',', out);
        std::fputs(header[i].c_str(), out);
    }
    std::fputc('\n', out);
}

}  // namespace

void write_spi_header(std::FILE* out) { put_header(out, spi_header()); }
void write_aoi_header(std::FILE* out) { put_header(out, aoi_header()); }

void append_spi_rows(std::FILE* out, const std::vector<PinRecord>& records) {
    for (const auto& r : records) {
        std::fprintf(out, "%lld,%d,%s,%s,%s,%d,%d,%d", static_cast<long long>(r.key.panel_id),
                     r.key.figure_id, r.date.c_str(), r.time.c_str(), r.key.component_id.c_str(),
                     r.key.pin_number, r.pad_id, static_cast<int>(r.pad_type));
        for (int i = 0; i < kNumPinNumerics; ++i) std::fprintf(out, ",%.6g", r.numeric(i));
        std::fprintf(out, ",%s\n", r.spi_result.c_str());
    }
}

void append_aoi_rows(std::FILE* out, const std::vector<AoiRecord>& records) {
    for (const auto& r : records) {
        std::fprintf(out, "%lld,%d,%s,", static_cast<long long>(r.panel_id), r.figure_id,
                     r.component_id.c_str());
        if (r.pin_number) std::fprintf(out, "%d", *r.pin_number);
        std::fprintf(out, ",%s,%s,", r.machine_label.c_str(), to_string(r.operator_label));
        if (r.repair_label) std::fputs(to_string(*r.repair_label), out);
        std::fputc('\n', out);
    }
}

void write_spi_csv(const std::vector<PinRecord>& records, const std::string& path) {
    FilePtr f = open_output(path);
    write_spi_header(f.get());
    append_spi_rows(f.get(), records);
    if (std::ferror(f.get())) throw IoError("write failed: " + path);
}

void write_aoi_csv(const std::vector<AoiRecord>& records, const std::string& path) {
    FilePtr f = open_output(path);
    write_aoi_header(f.get());
    append_aoi_rows(f.get(), records);
    if (std::ferror(f.get())) throw IoError("write failed: " + path);
}

}  // namespace spidet
