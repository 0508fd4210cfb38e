#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relaxstab/config.hpp"
#include "relaxstab/error.hpp"
#include "relaxstab/pipeline.hpp"

namespace rs = relaxstab;

int main(int argc, char** argv) {
  CLI::App app{"Stability certificates for relaxation-system traveling waves"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rs::kToolVersion);

  std::string config_path, pipeline, out_dir;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run a pipeline and write summary.json plus CSV artifacts");
  run->add_option("--config", config_path, "JSON config (defaults to the Jin-Xin Burgers front)");
  run->add_option("--pipeline", pipeline, "hypotheses, profile, resolvent-sweep, dichotomy, symmetrizer, simulate or full");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Seed for randomized trials");
  run->add_flag("--verbose,-v", verbose, "Progress on stderr");

  std::vector<std::string> report_paths;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Merge run summaries into one certificate table");
  report->add_option("paths", report_paths, "summary.json files or run directories");
  report->add_option("--out", report_out, "Write the merged table here instead of stdout");

  auto* defaults = app.add_subcommand("defaults", "Print the default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rs::exit_code::usage;
  }

  try {
    if (*defaults) {
      std::cout << rs::dump_json(rs::to_json(rs::default_config()));
      return rs::exit_code::ok;
    }
    if (*report) {
      std::vector<std::filesystem::path> paths(report_paths.begin(), report_paths.end());
      const std::string text = rs::dump_json(rs::merge_reports(paths));
      if (report_out.empty())
        std::cout << text;
      else
        rs::write_atomic(report_out, text);
      return rs::exit_code::ok;
    }

    rs::RunConfig cfg = config_path.empty() ? rs::default_config() : rs::load_config(config_path);
    if (!pipeline.empty()) {
      nlohmann::json doc = rs::to_json(cfg);
      doc["pipeline"] = pipeline;
      cfg = rs::parse_config(doc);
    }
    if (!out_dir.empty()) cfg.output = out_dir;
    if (seed) cfg.seed = *seed;
    const rs::RunResult result = rs::run(cfg, verbose ? &std::cerr : nullptr);
    std::cout << (cfg.output / "summary.json").string() << ": "
              << (result.exit_status == 0 ? "pass" : "exit " + std::to_string(result.exit_status)) << '\n';
    return result.exit_status;
  } catch (const rs::Error& e) {
    std::cerr << "relaxstab: " << rs::to_string(e.kind()) << " error: " << e.what() << '\n';
    return rs::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "relaxstab: " << e.what() << '\n';
    return rs::exit_code::numeric;
  }
}
