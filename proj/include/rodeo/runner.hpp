#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rodeo/config.hpp"
#include "rodeo/observables.hpp"

namespace rodeo {

struct RunOutcome {
  int exit_code = 0;
  std::string status;  // ok | compare_failed | breakdown | step_too_large | negative_rate
  nlohmann::json summary;
};

// Executes one configured run and writes trajectory.csv, plot.svg,
// summary.json (and populations.csv when the ensemble engine ran) into
// cfg.out_dir. Numerical guard failures are converted into the exit-code /
// summary taxonomy instead of escaping; schema problems throw before this
// point.
RunOutcome run(const RunConfig& cfg);

// Two-panel plot: state components on top, class populations (or standard
// errors when `populations` is empty) below.
void write_plot_svg(const std::string& path, const BlochSeries& exact,
                    const BlochSeries& mc,
                    const std::vector<std::vector<std::pair<int, long>>>& populations,
                    long n_members);

}  // namespace rodeo
