#pragma once

#include "rpd/embedding_store.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace rpd {

/// Monte Carlo estimate of the RPD distribution between independent
/// standard-normal embeddings of a given shape.
struct NullDistribution {
  Index n = 0;
  Index d_left = 0;
  Index d_right = 0;
  Index replicates = 0;
  double mu = 0.0;
  double sigma = 0.0;  // sample standard deviation (N - 1)
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::uint64_t seed = 0;
  /// Set when fewer than kRecommendedReplicates were drawn.
  bool low_replicates = false;
  std::optional<std::vector<double>> samples;
};

inline constexpr Index kRecommendedReplicates = 30;
inline constexpr Index kDefaultReplicates = 1000;

/// Replicate r draws its two matrices from seeds derive_seed(seed, r, 0) and
/// derive_seed(seed, r, 1), computes the standardized RPD and stores it in
/// slot r. Moments are accumulated in replicate order, so the result is
/// identical for any thread count.
NullDistribution monte_carlo_null(Index n, Index d_left, Index d_right, Index replicates,
                                  std::uint64_t seed, bool keep_samples = true,
                                  std::size_t threads = 0);

/// First-order expectation 1 - d/n of the RPD between independent isotropic
/// embeddings of equal dimension. Sanity reference only.
double analytic_null_mean(Index n, Index d);

enum class Tail { TwoSided, Lower, Upper };

struct ZTestResult {
  double z = 0.0;
  double p_value = 0.0;
  Tail tail = Tail::TwoSided;
  bool reject_at_0_01 = false;
};

inline constexpr double kSignificanceLevel = 0.01;

ZTestResult z_test(double observed_rpd, double mu, double sigma, Tail tail = Tail::TwoSided);
ZTestResult z_test(double observed_rpd, const NullDistribution& null, Tail tail = Tail::TwoSided);

struct NormalityDiagnostics {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  bool normal_plausible = false;
};

inline constexpr double kMaxAbsSkewness = 0.3;
inline constexpr double kMaxAbsExcessKurtosis = 0.6;
inline constexpr std::size_t kMinNormalitySamples = 100;

/// Sample skewness g1 and excess kurtosis g2. Needs at least 100 samples
/// with nonzero spread.
NormalityDiagnostics normality_diagnostics(std::span<const double> samples);
NormalityDiagnostics normality_diagnostics(const NullDistribution& null);

/// One value per line, 17 significant digits.
void save_samples(const NullDistribution& null, const std::filesystem::path& path);

}  // namespace rpd
