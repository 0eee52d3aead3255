#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spidet/core.hpp"

namespace spidet {

// Token -> probability, kept sorted by token so the sampling stream does not
// depend on how the config was assembled.
using CategoricalMix = std::vector<std::pair<std::string, double>>;

CategoricalMix normalize_mix(CategoricalMix mix);

struct ColumnGaussian {
    double mean = 0;
    double stddev = 1;
};

struct GeneratorConfig {
    std::uint64_t seed = 1;
    std::int64_t num_panels = 1;
    BoardLayout layout = default_layout();

    double pin_defect_rate = 0.004;       // fraction of all pins appearing in the AOI table
    double operator_bad_rate = 0.040;     // among AOI defects
    double not_repairable_rate = 0.805;   // among operator-Bad
    double missing_pin_number_rate = 0.05;
    double planted_signal_strength = 0.0;  // 0 = pure noise

    CategoricalMix spi_result_defect_mix = normalize_mix({{"W.Insufficient", 0.98},
                                                          {"E.shape", 0.008},
                                                          {"E.Position", 0.008},
                                                          {"other", 0.004}});
    CategoricalMix aoi_fault_mix = normalize_mix({{"lean soldering", 0.25},
                                                  {"translated", 0.25},
                                                  {"misaligned", 0.25},
                                                  {"other", 0.25}});

    // indexed as PinRecord::numeric(); positive-truncated draws
    std::vector<ColumnGaussian> feature_columns = default_feature_columns();

    static std::vector<ColumnGaussian> default_feature_columns();

    void validate() const;  // throws UsageError
};

// Logistic intercept b with E_z~N(0,1)[sigmoid(b + strength*z)] = pin_defect_rate
// within 1e-4, solved by bisection (expectation by fixed quadrature).
double calibrate_signal(const GeneratorConfig& config);

struct SyntheticData {
    std::vector<PinRecord> pins;
    std::vector<AoiRecord> aoi;
};

// One panel's records; generate() is the deterministic concatenation over
// panels 1..num_panels. Exposed so callers can stream panel by panel. The
// intercept is present iff the planted logistic link is active.
SyntheticData generate_panel(const GeneratorConfig& config, std::int64_t panel_id,
                             std::optional<double> logistic_intercept);

// nullopt unless planted_signal_strength > 0 and pin_defect_rate is inside (0,1)
std::optional<double> planted_intercept(const GeneratorConfig& config);

SyntheticData generate(const GeneratorConfig& config, unsigned jobs = 0);

}  // namespace spidet
