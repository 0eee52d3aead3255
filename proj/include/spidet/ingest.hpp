#pragma once

#include <map>
#include <string>
#include <vector>

#include "spidet/core.hpp"

namespace spidet {

// Column-name overrides (logical name -> header name in the file) plus
// delimiter/decimal conventions, for challenge files whose exact headers are
// not under our control.
struct SchemaConfig {
    char delimiter = ',';
    bool decimal_comma = false;  // requires a non-comma delimiter
    std::map<std::string, std::string> spi_columns;
    std::map<std::string, std::string> aoi_columns;

    std::string spi_column(const std::string& logical) const;
    std::string aoi_column(const std::string& logical) const;
    void validate() const;
};

struct ColumnStats {
    std::string name;
    std::int64_t count = 0;
    double min = 0;
    double max = 0;
    double mean = 0;  // running mean

    void add(double v);
    void merge(const ColumnStats& other);
};

struct IngestReport {
    std::int64_t rows_read = 0;
    std::int64_t rows_kept = 0;
    std::int64_t rows_dropped_nan = 0;
    std::int64_t rows_dropped_malformed = 0;
    std::vector<ColumnStats> columns;
    // sidecar log of dropped rows (line number, reason); capped
    std::vector<std::pair<std::int64_t, std::string>> dropped_lines;
    std::int64_t dropped_lines_truncated = 0;

    static constexpr std::size_t kMaxDroppedLines = 10000;

    void note_drop(std::int64_t line, bool nan, std::string reason);
    std::string to_text() const;
};

// canonical headers, also emitted by the writers
const std::vector<std::string>& spi_header();
const std::vector<std::string>& aoi_header();

std::pair<std::vector<PinRecord>, IngestReport> read_spi(const std::string& path,
                                                         const SchemaConfig& schema = {});
std::pair<std::vector<AoiRecord>, IngestReport> read_aoi(const std::string& path,
                                                         const SchemaConfig& schema = {});

void write_spi_csv(const std::vector<PinRecord>& records, const std::string& path);
void write_aoi_csv(const std::vector<AoiRecord>& records, const std::string& path);

// append rows to an already-open stream; used by the CLI to stream panels
void append_spi_rows(std::FILE* out, const std::vector<PinRecord>& records);
void append_aoi_rows(std::FILE* out, const std::vector<AoiRecord>& records);
void write_spi_header(std::FILE* out);
void write_aoi_header(std::FILE* out);

}  // namespace spidet
