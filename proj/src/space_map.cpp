#include "rpd/space_map.hpp"

#include "rpd/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace rpd {

namespace {

using Coords = std::vector<std::array<double, 2>>;

double distance(const std::array<double, 2>& p, const std::array<double, 2>& q) {
  return std::hypot(p[0] - q[0], p[1] - q[1]);
}

// Targets below this fraction of the largest distance count as coincident
// points and are measured against the floor instead of their own length.
constexpr double kRelativeFloor = 1e-6;

double residual_scale(const Eigen::MatrixXd& dist, double target) {
  return std::max(target, kRelativeFloor * dist.maxCoeff());
}

// Sum over pairs of the weighted squared residual; stress = sqrt(objective / pairs).
double objective(const Eigen::MatrixXd& dist, const Coords& x) {
  double f = 0.0;
  const auto n = static_cast<Eigen::Index>(x.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double target = dist(i, j);
      const double r = distance(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
      const double e = (r - target) / residual_scale(dist, target);
      f += e * e;
    }
  }
  return f;
}

double pair_count(std::size_t n) { return static_cast<double>(n * (n - 1) / 2); }

Coords gradient(const Eigen::MatrixXd& dist, const Coords& x) {
  Coords g(x.size(), {0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double target = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double r = distance(x[i], x[j]);
      if (r < 1e-300) continue;
      const double scale = residual_scale(dist, target);
      const double w = 1.0 / (scale * scale);
      const double coef = 2.0 * w * (r - target) / r;
      for (int k = 0; k < 2; ++k) {
        const double gk = coef * (x[i][static_cast<std::size_t>(k)] - x[j][static_cast<std::size_t>(k)]);
        g[i][static_cast<std::size_t>(k)] += gk;
        g[j][static_cast<std::size_t>(k)] -= gk;
      }
    }
  }
  return g;
}

}  // namespace

double layout_stress(const Eigen::MatrixXd& dist, const Coords& coords) {
  if (coords.size() < 2) return 0.0;
  return std::sqrt(objective(dist, coords) / pair_count(coords.size()));
}

LayoutMap layout_from_distances(const Eigen::MatrixXd& dist, const std::vector<std::string>& names,
                                const std::string& anchor_a, const std::string& anchor_b) {
  const auto n = dist.rows();
  if (n < 2 || dist.cols() != n) throw DimensionError("layout needs a square matrix of at least 2 points");
  if (static_cast<Eigen::Index>(names.size()) != n) throw DimensionError("names do not match the matrix");
  if (!dist.allFinite()) throw PreconditionError("distance matrix has non-finite entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) throw PreconditionError("distance matrix diagonal must be zero");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (dist(i, j) < 0.0) throw PreconditionError("distances must be nonnegative");
      if (std::abs(dist(i, j) - dist(j, i)) > 1e-12 * std::max(1.0, std::abs(dist(i, j)))) {
        throw PreconditionError("distance matrix must be symmetric");
      }
    }
  }
  const auto find = [&](const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw PreconditionError("unknown anchor '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
  };
  const std::size_t ia = find(anchor_a);
  const std::size_t ib = find(anchor_b);
  if (ia == ib) throw PreconditionError("anchors must be distinct");
  const double base = dist(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ib));
  if (!(base > 0.0)) throw PreconditionError("anchors must be at a positive distance");

  LayoutMap out;
  out.names = names;
  out.anchors = {anchor_a, anchor_b};
  Coords x(names.size(), {0.0, 0.0});
  x[ib] = {base, 0.0};

  std::vector<std::size_t> placed{ia, ib};
  const auto d = [&](std::size_t i, std::size_t j) {
    return dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  for (std::size_t p = 0; p < names.size(); ++p) {
    if (p == ia || p == ib) continue;
    if (placed.size() == 2) {
      const double ra = d(p, ia);
      const double rb = d(p, ib);
      const double px = (ra * ra - rb * rb + base * base) / (2.0 * base);
      const double y2 = ra * ra - px * px;
      if (y2 < 0.0) {
        out.inconsistent_distances = true;
        x[p] = {px, 0.0};
      } else {
        x[p] = {px, std::sqrt(y2)};
      }
    } else {
      // |p|^2 = d_a^2 against anchor a at the origin; subtracting the other
      // circle equations gives q_j . p = (d_a^2 - d_j^2 + |q_j|^2) / 2.
      const auto rows = static_cast<Eigen::Index>(placed.size() - 1);
      Eigen::MatrixXd a(rows, 2);
      Eigen::VectorXd rhs(rows);
      const double da = d(p, ia);
      Eigen::Index r = 0;
      for (std::size_t q : placed) {
        if (q == ia) continue;
        a(r, 0) = x[q][0];
        a(r, 1) = x[q][1];
        const double dq = d(p, q);
        rhs(r) = 0.5 * (da * da - dq * dq + x[q][0] * x[q][0] + x[q][1] * x[q][1]);
        ++r;
      }
      const Eigen::Vector2d sol = a.completeOrthogonalDecomposition().solve(rhs);
      x[p] = {sol(0), sol(1)};
    }
    placed.push_back(p);
  }

  const double pairs = pair_count(names.size());
  double f = objective(dist, x);
  out.stress_trace.push_back(std::sqrt(f / pairs));
  double step = 1.0;
  for (int it = 0; it < kRefinementIterations; ++it) {
    auto g = gradient(dist, x);
    g[ia] = {0.0, 0.0};
    g[ib] = {0.0, 0.0};
    double gnorm2 = 0.0;
    for (const auto& gi : g) gnorm2 += gi[0] * gi[0] + gi[1] * gi[1];
    if (gnorm2 > 0.0) {
      // Armijo backtracking; a rejected step leaves x unchanged.
      step = std::min(1.0, step * 2.0);
      while (step > 1e-20) {
        Coords trial = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
          trial[i][0] -= step * g[i][0];
          trial[i][1] -= step * g[i][1];
        }
        const double ft = objective(dist, trial);
        if (ft <= f - 1e-4 * step * gnorm2) {
          x = std::move(trial);
          f = ft;
          break;
        }
        step *= 0.5;
      }
    }
    out.stress_trace.push_back(std::sqrt(f / pairs));
  }

  out.coords = std::move(x);
  out.stress = std::sqrt(f / pairs);
  return out;
}

}  // namespace rpd
