#pragma once

#include <string>

#include "spidet/pipeline.hpp"
#include "spidet/synthgen.hpp"

namespace spidet {

// Everything a run needs, in one human-editable JSON document. Command-line
// flags override file values. Unknown keys anywhere are a hard error.
struct CliConfig {
    std::uint64_t seed = 7;
    unsigned jobs = 0;  // 0 = available parallelism
    GeneratorConfig generator;
    TrainConfig train;
    EncodingConfig encoding;
    SchemaConfig schema;

    // run-section fields (task/levels are usually given as flags)
    ClassificationTask task = ClassificationTask::C1_AoiDefect;
    bool level_pin = true;
    bool level_component = false;
    bool level_board = false;
    ComponentMode component_mode = ComponentMode::Combined;
    std::optional<int> top_n_components;
    int folds = 5;
    bool stratified = true;
    FusionRule fusion;
    bool allow_board_for_c23 = false;

    RunConfig to_run_config() const;
};

CliConfig load_cli_config(const std::string& path);
CliConfig parse_cli_config(const std::string& json_text, const std::string& origin);

}  // namespace spidet
