#pragma once

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace rpd {

/// 2D placement of points from a pairwise distance matrix.
struct LayoutMap {
  std::vector<std::string> names;
  std::vector<std::array<double, 2>> coords;
  std::array<std::string, 2> anchors;
  /// sqrt(mean over pairs of ((realized - target) / target)^2). Targets below
  /// 1e-6 of the largest distance are divided by that floor instead.
  double stress = 0.0;
  /// Stress before refinement and after each refinement iteration.
  std::vector<double> stress_trace;
  /// A circle intersection was empty and a projection was used instead.
  bool inconsistent_distances = false;
};

inline constexpr int kRefinementIterations = 500;

/// Places anchor_a at the origin and anchor_b at (dist(a, b), 0). The first
/// other point (in input order) goes to the circle intersection with y >= 0;
/// each later point is trilaterated by least squares against every point
/// already placed. A fixed-length gradient descent with backtracking then
/// lowers the stress while the anchors stay fixed.
LayoutMap layout_from_distances(const Eigen::MatrixXd& dist, const std::vector<std::string>& names,
                                const std::string& anchor_a, const std::string& anchor_b);

/// Stress of given coordinates against target distances.
double layout_stress(const Eigen::MatrixXd& dist, const std::vector<std::array<double, 2>>& coords);

}  // namespace rpd
