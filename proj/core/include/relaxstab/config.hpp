#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relaxstab/linalg.hpp"
#include "relaxstab/timedomain.hpp"

namespace relaxstab {

inline constexpr int kSchemaVersion = 1;

struct ProfileSettings {
  /// "auto" (closed form for Jin-Xin, shooting otherwise), "closed-form", "shooting", "constant".
  std::string method = "auto";
  Vec w_minus, w_plus;
  std::optional<double> speed;
  double L = 40.0;
  std::size_t nodes = 4001;
  double tol = 1e-6;
};

struct HypothesisSettings {
  double eta_min = 10.0;
  double eta_max = 1000.0;
  std::size_t radii = 40;
  std::size_t directions = 16;
  double theta_req = 1e-6;
};

struct SweepSettings {
  std::vector<double> gammas{-0.08, -0.04, 0.0, 0.05};
  double r_min = 0.1, r_max = 100.0;
  std::size_t radii = 25;
  Vec eta;  // transverse frequency, d - 1 entries
  std::optional<double> gamma_star;
  std::optional<double> C;
  double L = 40.0;
  double h_max = 0.05;
  int trials = 16;
  int power_iterations = 4;
};

struct DichotomySettings {
  std::vector<std::complex<double>> lambdas{{2.0, 0.0}, {0.05, 3.0}};
  std::size_t pairs = 50;
  double commutator_tol = 1e-6;
  double gap_tolerance = 0.25;  // relative deviation of fitted θ from the endstate gap
  /// Rays (η_2, .., η_d, τ) along which turning points are searched.
  std::vector<Vec> turning_rays;
  double turning_spacing = 0.05;
};

struct SymmetrizerSettings {
  std::optional<double> theta_req;
  std::size_t energy_trials = 100;
};

struct SimulateSettings {
  SimConfig sim;
  Vec direction;
  double amplitude = 1e-2;
  double width = 2.0;
  double tau_c = 2.0;
  std::optional<double> gamma;
  bool refinement_check = true;
  double refinement_tolerance = 0.2;
};

/// Everything a run needs; reproducible from this plus the seed.
struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string system_name = "jin-xin";
  nlohmann::json system_params = {{"a", 2.0}};
  ProfileSettings profile;
  HypothesisSettings hypotheses;
  SweepSettings sweep;
  int s = 1;
  double alpha = 0.0;
  DichotomySettings dichotomy;
  SymmetrizerSettings symmetrizer;
  SimulateSettings simulate;
  std::string pipeline = "full";
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;
};

/// Parses and validates a config document; schema violations raise usage errors naming the field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// The Jin-Xin Burgers front a = 2, u- = 1, u+ = 0.
RunConfig default_config();

const std::vector<std::string>& pipeline_names();

}  // namespace relaxstab
