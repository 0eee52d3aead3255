#include "spidet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iterator>

namespace spidet {

CategoricalMix normalize_mix(CategoricalMix mix) {
    std::sort(mix.begin(), mix.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return mix;
}

std::vector<ColumnGaussian> GeneratorConfig::default_feature_columns() {
    // percentage columns at (100, 5); the rest are plausible instrument scales
    return {
        {100.0, 5.0},    // Volume(%)
        {150.0, 8.0},    // Height(um)
        {100.0, 5.0},    // Area(%)
        {100.0, 5.0},    // OffsetX(%)
        {100.0, 5.0},    // OffsetY(%)
        {500.0, 25.0},   // SizeX
        {500.0, 25.0},   // SizeY
        {12000.0, 600.0},  // Volume(um3)
        {9000.0, 450.0},   // Area(um2)
        {120.0, 6.0},    // Shape(um)
        {50.0, 20.0},    // PosX(mm)
        {50.0, 20.0},    // PosY(mm)
    };
}

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw UsageError(std::string(name) + " must be a probability in [0,1]");
    }
}

void check_mix(const CategoricalMix& mix, const char* name) {
    if (mix.empty()) throw UsageError(std::string(name) + " must not be empty");
    double sum = 0;
    for (const auto& [token, p] : mix) {
        check_probability(p, name);
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw UsageError(std::string(name) + " must sum to 1 (got " + format("%.12g", sum) + ")");
    }
}

// measurement precision: 6 significant decimal digits, so the CSV round trip
// reproduces records exactly
double round6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::strtod(buf, nullptr);
}

double truncated_normal_positive(Rng& rng, const ColumnGaussian& g) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double v = g.mean + g.stddev * rng.normal();
        if (v > 0) return v;
    }
    // mean far below zero; clamp rather than spin
    return g.stddev > 0 ? g.stddev * 1e-3 : 1e-3;
}

std::vector<double> mix_weights(const CategoricalMix& mix) {
    std::vector<double> w;
    w.reserve(mix.size());
    for (const auto& [token, p] : mix) w.push_back(p);
    return w;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (num_panels <= 0) throw UsageError("num_panels must be positive");
    if (layout.components.empty()) throw UsageError("board layout has no components");
    if (layout.figures_per_panel <= 0) throw UsageError("figures_per_panel must be positive");
    for (const auto& c : layout.components) {
        if (c.pin_count <= 0) throw UsageError("component " + c.id + " has non-positive pin count");
        if (c.id.empty()) throw UsageError("component with empty id in layout");
    }
    check_probability(pin_defect_rate, "pin_defect_rate");
    check_probability(operator_bad_rate, "operator_bad_rate");
    check_probability(not_repairable_rate, "not_repairable_rate");
    check_probability(missing_pin_number_rate, "missing_pin_number_rate");
    if (planted_signal_strength < 0) throw UsageError("planted_signal_strength must be >= 0");
    check_mix(spi_result_defect_mix, "spi_result_defect_mix");
    check_mix(aoi_fault_mix, "aoi_fault_mix");
    if (feature_columns.size() != static_cast<std::size_t>(kNumPinNumerics)) {
        throw UsageError("feature_columns must have one entry per numeric column");
    }
    for (const auto& g : feature_columns) {
        if (!(g.stddev > 0) || !std::isfinite(g.mean) || !std::isfinite(g.stddev)) {
            throw UsageError("feature_columns entries need finite mean and positive stddev");
        }
    }
}

double calibrate_signal(const GeneratorConfig& config) {
    const double p = config.pin_defect_rate;
    const double s = config.planted_signal_strength;
    if (p <= 0.0 || p >= 1.0) {
        throw UsageError("calibrate_signal needs pin_defect_rate strictly inside (0,1)");
    }
    if (s == 0.0) return std::log(p / (1.0 - p));

    // E[sigmoid(b + s z)] over z~N(0,1) via Simpson on [-10,10]
    auto expected_rate = [&](double b) {
        constexpr int n = 2000;  // even
        constexpr double lo = -10.0, hi = 10.0;
        const double h = (hi - lo) / n;
        const double inv_sqrt_2pi = 0.39894228040143267794;
        double sum = 0;
        for (int i = 0; i <= n; ++i) {
            double z = lo + h * i;
            double f = sigmoid(b + s * z) * inv_sqrt_2pi * std::exp(-0.5 * z * z);
            double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            sum += w * f;
        }
        return sum * h / 3.0;
    };

    double lo = std::log(p / (1.0 - p)) - 50.0;
    double hi = std::log(p / (1.0 - p)) + 50.0;
    double b = 0;
    for (int step = 0; step < 200; ++step) {
        b = 0.5 * (lo + hi);
        double e = expected_rate(b);
        if (std::abs(e - p) <= 1e-4) return b;
        if (e < p) {
            lo = b;
        } else {
            hi = b;
        }
    }
    throw DataError("calibrate_signal: bisection failed to converge after 200 steps");
}

std::optional<double> planted_intercept(const GeneratorConfig& config) {
    if (config.planted_signal_strength > 0 && config.pin_defect_rate > 0 &&
        config.pin_defect_rate < 1) {
        return calibrate_signal(config);
    }
    return std::nullopt;
}

SyntheticData generate_panel(const GeneratorConfig& config, std::int64_t panel_id,
                             std::optional<double> logistic_intercept) {
    const auto& layout = config.layout;
    const double strength = config.planted_signal_strength;
    const ColumnGaussian volume = config.feature_columns[0];
    const auto defect_mix_w = mix_weights(config.spi_result_defect_mix);
    const auto fault_mix_w = mix_weights(config.aoi_fault_mix);

    Rng rng(mix64(config.seed, static_cast<std::uint64_t>(panel_id)));

    SyntheticData out;
    const std::int64_t pins_per_board = total_pins(layout);
    out.pins.reserve(static_cast<std::size_t>(pins_per_board * layout.figures_per_panel));

    // data spans nine days; time-of-day is a fixed function of position
    const int day = 21 + static_cast<int>((panel_id - 1) % 9);
    const std::string date = format("2019-06-%02d", day);

    for (int figure = 1; figure <= layout.figures_per_panel; ++figure) {
        std::int32_t pad_index = 0;
        for (const auto& comp : layout.components) {
            for (int pin = 1; pin <= comp.pin_count; ++pin) {
                ++pad_index;
                PinRecord rec;
                rec.key = PinKey{panel_id, figure, comp.id, pin};
                rec.date = date;
                std::int32_t pad = static_cast<std::int32_t>((figure - 1) * pins_per_board) + pad_index;
                rec.pad_id = pad;
                int secs = static_cast<int>((panel_id * 131 + figure * 17 + pad) % 86400);
                rec.time = format("%02d:%02d:%02d", secs / 3600, (secs / 60) % 60, secs % 60);
                rec.pad_type = rng.bernoulli(0.5) ? 1 : 0;

                for (int i = 0; i < kNumPinNumerics; ++i) {
                    rec.numeric(i) = round6(truncated_normal_positive(rng, config.feature_columns[i]));
                }

                double p_defect = config.pin_defect_rate;
                if (logistic_intercept) {
                    double z = (rec.volume_pct - volume.mean) / volume.stddev;
                    p_defect = sigmoid(*logistic_intercept + strength * z);
                }
                bool defect = rng.bernoulli(p_defect);

                if (defect) {
                    rec.spi_result =
                        config.spi_result_defect_mix[rng.categorical(defect_mix_w)].first;
                    AoiRecord aoi;
                    aoi.panel_id = panel_id;
                    aoi.figure_id = figure;
                    aoi.component_id = comp.id;
                    aoi.pin_number = pin;
                    aoi.machine_label = config.aoi_fault_mix[rng.categorical(fault_mix_w)].first;
                    if (rng.bernoulli(config.operator_bad_rate)) {
                        aoi.operator_label = OperatorLabel::Bad;
                        aoi.repair_label = rng.bernoulli(config.not_repairable_rate)
                                               ? RepairLabel::NotPossibleToRepair
                                               : RepairLabel::FalseScrap;
                    }
                    if (rng.bernoulli(config.missing_pin_number_rate)) aoi.pin_number.reset();
                    out.aoi.push_back(std::move(aoi));
                } else {
                    rec.spi_result = "Good";
                }
                out.pins.push_back(std::move(rec));
            }
        }
    }
    return out;
}

SyntheticData generate(const GeneratorConfig& config, unsigned jobs) {
    config.validate();
    const std::optional<double> intercept = planted_intercept(config);

    const std::size_t n_panels = static_cast<std::size_t>(config.num_panels);
    std::vector<SyntheticData> per_panel(n_panels);
    parallel_for(n_panels, jobs, [&](std::size_t i) {
        per_panel[i] = generate_panel(config, static_cast<std::int64_t>(i) + 1, intercept);
    });

    SyntheticData out;
    std::size_t total_pins_n = 0, total_aoi = 0;
    for (const auto& p : per_panel) {
        total_pins_n += p.pins.size();
        total_aoi += p.aoi.size();
    }
    out.pins.reserve(total_pins_n);
    out.aoi.reserve(total_aoi);
    for (auto& p : per_panel) {
        out.pins.insert(out.pins.end(), std::make_move_iterator(p.pins.begin()),
                        std::make_move_iterator(p.pins.end()));
        out.aoi.insert(out.aoi.end(), std::make_move_iterator(p.aoi.begin()),
                       std::make_move_iterator(p.aoi.end()));
        p.pins.clear();
        p.pins.shrink_to_fit();
        p.aoi.clear();
        p.aoi.shrink_to_fit();
    }
    return out;
}

}  // namespace spidet
