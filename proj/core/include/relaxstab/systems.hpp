#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relaxstab/system.hpp"

namespace relaxstab {

/// Scalar equilibrium flux with its derivative.
struct ScalarFlux {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

ScalarFlux burgers_flux();

/// Jin-Xin relaxation of  u_t + f(u)_x (+ g(u)_y) = 0.
///   d = 1: w = (u, v),    u_t + v_x = 0,        v_t + a^2 u_x = f(u) - v
///   d = 2: w = (u, v, q), u_t + v_x + q_y = 0,  v_t + a^2 u_x = f(u) - v,  q_t + a^2 u_y = g(u) - q
SystemSpec jin_xin(double a, int d = 1, ScalarFlux f = burgers_flux(), ScalarFlux g = burgers_flux());

/// Saint-Venant shallow water with Chezy friction (depth h, discharges q, p), Froude number F:
///   h_t + q_x + p_y = 0
///   q_t + (q^2/h + h^2/(2F^2))_x + (qp/h)_y = h - q|m|/h^2
///   p_t + (qp/h)_x + (p^2/h + h^2/(2F^2))_y = -p|m|/h^2,   |m| = sqrt(q^2 + p^2)
/// d = 1 drops p.
SystemSpec saint_venant(double froude, int d = 1);

/// Linear system  w_t + sum_j A_j w_{x_j} = B w.
SystemSpec linear_system(std::string name, std::vector<Mat> flux_matrices, Mat relaxation);

/// Builds a named system ("jin-xin", "saint-venant", "linear") from a parameter map.
SystemSpec make_system(const std::string& name, const nlohmann::json& params);

/// Named (system, equilibrium state) pairs used to compare the structural checks.
struct CorpusEntry {
  std::string label;
  SystemSpec system;
  Vec state;
};

/// 3x3 system whose third characteristic field is undamped (A = diag(1,-1,2)).
CorpusEntry partially_damped_3x3();
/// 2x2 system with non-normal relaxation coupling: the identity is not a dissipative
/// symmetrizer, but a diagonal one is.
CorpusEntry non_normal_damped_2x2();
std::vector<CorpusEntry> structural_corpus();

}  // namespace relaxstab
