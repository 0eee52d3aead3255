#include "spidet/cli_config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace spidet {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& origin, const std::string& path) {
    throw UsageError("config " + origin + ": unknown key '" + path + "'");
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& origin,
                const std::string& prefix) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) bad_key(origin, prefix.empty() ? key : prefix + "." + key);
    }
}

template <typename T>
void get_to(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) obj.at(key).get_to(out);
}

CategoricalMix parse_mix(const json& obj, const std::string& origin, const std::string& what) {
    CategoricalMix mix;
    for (const auto& [token, p] : obj.items()) {
        if (!p.is_number()) {
            throw UsageError("config " + origin + ": " + what + "." + token + " must be a number");
        }
        mix.emplace_back(token, p.get<double>());
    }
    return normalize_mix(std::move(mix));
}

void parse_generator(const json& g, GeneratorConfig& out, const std::string& origin) {
    check_keys(g,
               {"num_panels", "pin_defect_rate", "operator_bad_rate", "not_repairable_rate",
                "missing_pin_number_rate", "planted_signal_strength", "spi_result_defect_mix",
                "aoi_fault_mix", "feature_means", "feature_stddevs", "layout"},
               origin, "generator");
    get_to(g, "num_panels", out.num_panels);
    get_to(g, "pin_defect_rate", out.pin_defect_rate);
    get_to(g, "operator_bad_rate", out.operator_bad_rate);
    get_to(g, "not_repairable_rate", out.not_repairable_rate);
    get_to(g, "missing_pin_number_rate", out.missing_pin_number_rate);
    get_to(g, "planted_signal_strength", out.planted_signal_strength);
    if (g.contains("spi_result_defect_mix")) {
        out.spi_result_defect_mix = parse_mix(g.at("spi_result_defect_mix"), origin,
                                              "generator.spi_result_defect_mix");
    }
    if (g.contains("aoi_fault_mix")) {
        out.aoi_fault_mix = parse_mix(g.at("aoi_fault_mix"), origin, "generator.aoi_fault_mix");
    }
    auto column_index = [&](const std::string& name) {
        const auto& names = pin_numeric_names();
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return static_cast<int>(i);
        }
        throw UsageError("config " + origin + ": unknown numeric column '" + name + "'");
    };
    if (g.contains("feature_means")) {
        for (const auto& [name, v] : g.at("feature_means").items()) {
            out.feature_columns[static_cast<std::size_t>(column_index(name))].mean =
                v.get<double>();
        }
    }
    if (g.contains("feature_stddevs")) {
        for (const auto& [name, v] : g.at("feature_stddevs").items()) {
            out.feature_columns[static_cast<std::size_t>(column_index(name))].stddev =
                v.get<double>();
        }
    }
    if (g.contains("layout")) {
        const json& l = g.at("layout");
        check_keys(l, {"figures_per_panel", "components"}, origin, "generator.layout");
        get_to(l, "figures_per_panel", out.layout.figures_per_panel);
        if (l.contains("components") && !l.at("components").is_null()) {
            out.layout.components.clear();
            for (const auto& item : l.at("components")) {
                if (!item.is_array() || item.size() != 2) {
                    throw UsageError("config " + origin +
                                     ": layout.components entries must be [id, pin_count]");
                }
                out.layout.components.push_back(
                    {item.at(0).get<std::string>(), item.at(1).get<int>()});
            }
        }
    }
}

void parse_train(const json& t, TrainConfig& out, const std::string& origin) {
    check_keys(t,
               {"max_depth", "num_rounds", "learning_rate", "l2_leaf_reg", "min_split_gain",
                "min_child_hessian", "positive_class_weight", "feature_top_k", "row_subsample",
                "col_subsample", "histogram_mode", "histogram_bins"},
               origin, "train");
    get_to(t, "max_depth", out.max_depth);
    get_to(t, "num_rounds", out.num_rounds);
    get_to(t, "learning_rate", out.learning_rate);
    get_to(t, "l2_leaf_reg", out.l2_leaf_reg);
    get_to(t, "min_split_gain", out.min_split_gain);
    get_to(t, "min_child_hessian", out.min_child_hessian);
    get_to(t, "row_subsample", out.row_subsample);
    get_to(t, "col_subsample", out.col_subsample);
    get_to(t, "histogram_mode", out.histogram_mode);
    get_to(t, "histogram_bins", out.histogram_bins);
    if (t.contains("positive_class_weight")) {
        const json& w = t.at("positive_class_weight");
        if (w.is_string() && w.get<std::string>() == "auto") {
            out.positive_class_weight.reset();
        } else if (w.is_number()) {
            out.positive_class_weight = w.get<double>();
        } else {
            throw UsageError("config " + origin +
                             ": train.positive_class_weight must be a number or \"auto\"");
        }
    }
    if (t.contains("feature_top_k")) {
        const json& k = t.at("feature_top_k");
        if (k.is_null()) {
            out.feature_top_k.reset();
        } else {
            out.feature_top_k = k.get<int>();
        }
    }
}

void parse_encoding(const json& e, EncodingConfig& out, const std::string& origin) {
    check_keys(e,
               {"use_spi_result", "spi_result_vocabulary", "aoi_fault_vocabulary",
                "include_pad_id", "include_date_time"},
               origin, "encoding");
    get_to(e, "use_spi_result", out.use_spi_result);
    get_to(e, "spi_result_vocabulary", out.spi_result_vocabulary);
    get_to(e, "aoi_fault_vocabulary", out.aoi_fault_vocabulary);
    get_to(e, "include_pad_id", out.include_pad_id);
    get_to(e, "include_date_time", out.include_date_time);
}

void parse_schema(const json& s, SchemaConfig& out, const std::string& origin) {
    check_keys(s, {"delimiter", "decimal_comma", "spi_columns", "aoi_columns"}, origin, "schema");
    if (s.contains("delimiter")) {
        std::string d = s.at("delimiter").get<std::string>();
        if (d.size() != 1) {
            throw UsageError("config " + origin + ": schema.delimiter must be one character");
        }
        out.delimiter = d[0];
    }
    get_to(s, "decimal_comma", out.decimal_comma);
    if (s.contains("spi_columns")) {
        for (const auto& [k, v] : s.at("spi_columns").items()) {
            out.spi_columns[k] = v.get<std::string>();
        }
    }
    if (s.contains("aoi_columns")) {
        for (const auto& [k, v] : s.at("aoi_columns").items()) {
            out.aoi_columns[k] = v.get<std::string>();
        }
    }
}

void parse_run(const json& r, CliConfig& out, const std::string& origin) {
    check_keys(r,
               {"task", "levels", "component_mode", "top_n_components", "folds", "stratified",
                "fusion", "fusion_mean_threshold", "allow_board_for_c23"},
               origin, "run");
    if (r.contains("task")) out.task = parse_task(r.at("task").get<std::string>());
    if (r.contains("levels")) {
        out.level_pin = out.level_component = out.level_board = false;
        for (const auto& level : r.at("levels")) {
            std::string name = level.get<std::string>();
            if (name == "pin") out.level_pin = true;
            else if (name == "component") out.level_component = true;
            else if (name == "board") out.level_board = true;
            else throw UsageError("config " + origin + ": unknown level '" + name + "'");
        }
    }
    if (r.contains("component_mode")) {
        std::string mode = r.at("component_mode").get<std::string>();
        if (mode == "per_component") out.component_mode = ComponentMode::PerComponent;
        else if (mode == "combined") out.component_mode = ComponentMode::Combined;
        else throw UsageError("config " + origin + ": unknown component_mode '" + mode + "'");
    }
    if (r.contains("top_n_components")) {
        const json& n = r.at("top_n_components");
        if (n.is_null()) {
            out.top_n_components.reset();
        } else {
            out.top_n_components = n.get<int>();
        }
    }
    get_to(r, "folds", out.folds);
    get_to(r, "stratified", out.stratified);
    if (r.contains("fusion")) out.fusion.kind = parse_fusion(r.at("fusion").get<std::string>());
    get_to(r, "fusion_mean_threshold", out.fusion.mean_threshold);
    get_to(r, "allow_board_for_c23", out.allow_board_for_c23);
}

}  // namespace

RunConfig CliConfig::to_run_config() const {
    RunConfig run;
    run.task = task;
    run.level_pin = level_pin;
    run.level_component = level_component;
    run.level_board = level_board;
    run.component_mode = component_mode;
    run.top_n_components = top_n_components;
    run.train = train;
    run.folds = folds;
    run.fusion = fusion;
    run.seed = seed;
    run.stratified = stratified;
    run.allow_board_for_c23 = allow_board_for_c23;
    run.encoding = encoding;
    run.schema = schema;
    run.jobs = jobs;
    run.train.seed = seed;
    return run;
}

CliConfig parse_cli_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw UsageError("config " + origin + ": " + e.what());
    }
    if (!root.is_object()) throw UsageError("config " + origin + ": top level must be an object");
    check_keys(root, {"seed", "jobs", "generator", "train", "encoding", "schema", "run"}, origin,
               "");

    CliConfig out;
    try {
        get_to(root, "seed", out.seed);
        get_to(root, "jobs", out.jobs);
        if (root.contains("generator")) parse_generator(root.at("generator"), out.generator, origin);
        if (root.contains("train")) parse_train(root.at("train"), out.train, origin);
        if (root.contains("encoding")) parse_encoding(root.at("encoding"), out.encoding, origin);
        if (root.contains("schema")) parse_schema(root.at("schema"), out.schema, origin);
        if (root.contains("run")) parse_run(root.at("run"), out, origin);
    } catch (const json::exception& e) {
        throw UsageError("config " + origin + ": " + e.what());
    }
    out.generator.seed = out.seed;
    return out;
}

CliConfig load_cli_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_cli_config(text, path);
}

}  // namespace spidet
