#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rodeo/config.hpp"
#include "rodeo/errors.hpp"
#include "rodeo/numeric_policy.hpp"
#include "rodeo/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rodeo: open quantum system trajectory simulator"};
  std::string config_path;
  std::string mode_override;
  std::string out_override;
  long long seed_override = -1;
  int threads_override = 0;
  app.add_option("-c,--config", config_path, "JSON run configuration")->required();
  app.add_option("--mode", mode_override, "override mode (exact|jump|nmqj|witness|compare)");
  app.add_option("--seed", seed_override, "override RNG seed");
  app.add_option("--threads", threads_override, "override worker thread count");
  app.add_option("--out", out_override, "override output directory");
  CLI11_PARSE(app, argc, argv);

  if (const char* policy = std::getenv("RODEO_NUMERIC_POLICY")) {
    std::string p = policy;
    if (p == "strict") {
      rodeo::set_numeric_policy(rodeo::NumericPolicy::strict());
    } else if (p != "default" && !p.empty()) {
      std::cerr << "RODEO_NUMERIC_POLICY must be \"strict\" or \"default\", got \"" << p
                << "\"\n";
      return 2;
    }
  }

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config file \"" << config_path << "\"\n";
      return 2;
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      std::cerr << "config file is not valid JSON: " << e.what() << "\n";
      return 2;
    }
    if (!mode_override.empty()) j["mode"] = mode_override;
    if (seed_override >= 0) j["seed"] = seed_override;
    if (threads_override >= 1) j["threads"] = threads_override;
    if (!out_override.empty()) j["out_dir"] = out_override;

    rodeo::RunConfig cfg = rodeo::parse_config(j);
    rodeo::RunOutcome outcome = rodeo::run(cfg);
    std::cout << "status: " << outcome.status << "\n";
    if (outcome.summary.contains("comparison")) {
      const auto& c = outcome.summary["comparison"];
      std::cout << "comparison: " << (c["pass"].get<bool>() ? "pass" : "FAIL")
                << " (max deviation " << c["max_deviation"].get<double>() << " in "
                << c["max_deviation_component"].get<std::string>() << " at t = "
                << c["max_deviation_time"].get<double>() << ")\n";
    }
    if (outcome.summary.contains("breakdown")) {
      const auto& b = outcome.summary["breakdown"];
      std::cout << "breakdown at t = " << b["time"].get<double>() << " (rate "
                << b["rate"].get<double>() << ")\n";
    }
    std::cout << "outputs in " << cfg.out_dir << "\n";
    return outcome.exit_code;
  } catch (const rodeo::SchemaError& e) {
    std::cerr << "configuration rejected:\n" << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
