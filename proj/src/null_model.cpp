#include "rpd/null_model.hpp"

#include "rpd/errors.hpp"
#include "rpd/parallel.hpp"
#include "rpd/random.hpp"
#include "rpd/rpd_core.hpp"
#include "rpd/summation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace rpd {

namespace {

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;  // central moments, divided by N
  double m3 = 0.0;
  double m4 = 0.0;
};

Moments central_moments(std::span<const double> xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  m.mean = compensated_sum(xs) / n;
  CompensatedSum s2, s3, s4;
  for (double x : xs) {
    const double d = x - m.mean;
    const double d2 = d * d;
    s2.add(d2);
    s3.add(d2 * d);
    s4.add(d2 * d2);
  }
  m.m2 = s2.value() / n;
  m.m3 = s3.value() / n;
  m.m4 = s4.value() / n;
  return m;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

NullDistribution monte_carlo_null(Index n, Index d_left, Index d_right, Index replicates,
                                  std::uint64_t seed, bool keep_samples, std::size_t threads) {
  if (replicates < 2) throw PreconditionError("null model needs at least 2 replicates");
  if (d_left < 1 || d_right < 1) throw PreconditionError("dimensions must be positive");
  if (n <= std::max(d_left, d_right)) {
    throw PreconditionError("null model needs n > max(d_left, d_right)");
  }

  std::vector<double> draws(static_cast<std::size_t>(replicates));
  parallel_for(
      draws.size(),
      [&](std::size_t r) {
        const auto left = random_gaussian_matrix(n, d_left, derive_seed(seed, r, 0));
        const auto right = random_gaussian_matrix(n, d_right, derive_seed(seed, r, 1));
        draws[r] = rpd(left, right, true).rpd;
      },
      threads);

  NullDistribution out;
  out.n = n;
  out.d_left = d_left;
  out.d_right = d_right;
  out.replicates = replicates;
  out.seed = seed;
  out.low_replicates = replicates < kRecommendedReplicates;

  const auto m = central_moments(draws);
  const double count = static_cast<double>(replicates);
  out.mu = m.mean;
  out.sigma = std::sqrt(m.m2 * count / (count - 1.0));
  if (m.m2 > 0.0) {
    out.skewness = m.m3 / std::pow(m.m2, 1.5);
    out.excess_kurtosis = m.m4 / (m.m2 * m.m2) - 3.0;
  } else {
    out.skewness = std::nan("");
    out.excess_kurtosis = std::nan("");
  }
  if (keep_samples) out.samples = std::move(draws);
  return out;
}

double analytic_null_mean(Index n, Index d) {
  if (d < 1 || n <= d) throw PreconditionError("analytic null mean needs n > d >= 1");
  return 1.0 - static_cast<double>(d) / static_cast<double>(n);
}

ZTestResult z_test(double observed_rpd, double mu, double sigma, Tail tail) {
  if (!(sigma > 0.0)) throw DegenerateInputError("null distribution has zero spread");
  ZTestResult r;
  r.tail = tail;
  r.z = (observed_rpd - mu) / sigma;
  switch (tail) {
    case Tail::TwoSided:
      r.p_value = std::min(1.0, 2.0 * normal_upper_tail(std::abs(r.z)));
      break;
    case Tail::Lower:
      r.p_value = normal_upper_tail(-r.z);
      break;
    case Tail::Upper:
      r.p_value = normal_upper_tail(r.z);
      break;
  }
  r.reject_at_0_01 = r.p_value < kSignificanceLevel;
  return r;
}

ZTestResult z_test(double observed_rpd, const NullDistribution& null, Tail tail) {
  return z_test(observed_rpd, null.mu, null.sigma, tail);
}

NormalityDiagnostics normality_diagnostics(std::span<const double> samples) {
  if (samples.size() < kMinNormalitySamples) {
    throw PreconditionError("normality diagnostics need at least " +
                            std::to_string(kMinNormalitySamples) + " samples");
  }
  const auto m = central_moments(samples);
  if (!(m.m2 > 0.0)) throw DegenerateInputError("samples have zero spread; skewness undefined");
  NormalityDiagnostics d;
  d.skewness = m.m3 / std::pow(m.m2, 1.5);
  d.excess_kurtosis = m.m4 / (m.m2 * m.m2) - 3.0;
  d.normal_plausible =
      std::abs(d.skewness) < kMaxAbsSkewness && std::abs(d.excess_kurtosis) < kMaxAbsExcessKurtosis;
  return d;
}

NormalityDiagnostics normality_diagnostics(const NullDistribution& null) {
  if (!null.samples) throw PreconditionError("null distribution was built without samples");
  return normality_diagnostics(*null.samples);
}

void save_samples(const NullDistribution& null, const std::filesystem::path& path) {
  if (!null.samples) throw PreconditionError("null distribution was built without samples");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  for (double x : *null.samples) out << x << '\n';
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace rpd
