#pragma once

#include <string>

#include "acofi/harness.hpp"

namespace acofi {

// Sectioned key-value plain text configuration; '#' starts a comment.
// Sections: [world] [dynamics] [grid] [solver] [filter] [pid] [experiment].
// One file drives the whole pipeline. Unknown keys are an error.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

// Canonical rendering of the effective configuration (echoed into output
// directories so a run is reproducible from its artifacts alone).
std::string render_experiment_config(const ExperimentConfig& cfg);

}  // namespace acofi
