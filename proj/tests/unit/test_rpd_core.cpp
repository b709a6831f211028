#include <doctest.h>

#include "rpd/errors.hpp"
#include "rpd/rpd_core.hpp"
#include "test_support.hpp"

#include <numeric>

using namespace rpd;
using rpd::testing::gaussian;
using rpd::testing::make_embedding;
using rpd::testing::rel_diff;

namespace {

AlignedPair pair_of(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return AlignedPair(make_embedding(a), make_embedding(b));
}

void check_report_invariants(const RpdReport& r) {
  CHECK(r.rpd >= 0.0);
  CHECK(r.ratio_term >= 1.0 - 1e-15);
  CHECK(r.cosine_term >= 0.0);
  CHECK(r.cosine_term <= r.ratio_term + 1e-12);
  CHECK(std::abs(r.rpd - (r.ratio_term - r.cosine_term)) < 1e-10);
}

}  // namespace

TEST_CASE("identity and rotation") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd e = gaussian(300, 20, rng);
  CHECK(rpd::rpd(e, e).rpd < 1e-12);
  for (int k = 0; k < 5; ++k) {
    const Eigen::MatrixXd q = rpd::testing::random_orthogonal(20, rng);
    CHECK(rpd::rpd(e, e * q).rpd < 1e-10);
  }
}

TEST_CASE("matches the naive definition on random pairs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 199);
    const Eigen::MatrixXd a = gaussian(n, 1 + static_cast<Index>(rng() % 30), rng);
    const Eigen::MatrixXd b = gaussian(n, 1 + static_cast<Index>(rng() % 30), rng);
    const auto r = rpd::rpd(a, b);
    CHECK(rel_diff(r.rpd, rpd::testing::naive_rpd(a, b)) < 1e-10);
    check_report_invariants(r);
    const auto raw = rpd::rpd(a, 3.0 * b, false);
    CHECK(rel_diff(raw.rpd, rpd::testing::naive_rpd(a, 3.0 * b, false)) < 1e-10);
  }
}

TEST_CASE("independent Gaussian embeddings sit near 1 - d/n") {
  const auto a = random_gaussian_matrix(2000, 50, 101);
  const auto b = random_gaussian_matrix(2000, 50, 202);
  const auto r = rpd::rpd(a, b);
  CHECK(std::abs(r.rpd - 0.975) < 0.01);
  check_report_invariants(r);
}

TEST_CASE("symmetry, scale and permutation invariance") {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd a = gaussian(120, 8, rng);
  const Eigen::MatrixXd b = a * rpd::testing::random_orthogonal(8, rng) + 0.7 * gaussian(120, 8, rng);
  const double base = rpd::rpd(a, b).rpd;
  CHECK(std::abs(rpd::rpd(b, a).rpd - base) < 1e-12);
  for (double c : {-3.0, 0.01, 7.0}) {
    CHECK(std::abs(rpd::rpd(c * a, b).rpd - base) < 1e-12);
  }
  std::vector<int> idx(120);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  Eigen::MatrixXd pa(120, 8), pb(120, 8);
  for (int i = 0; i < 120; ++i) {
    pa.row(i) = a.row(idx[static_cast<std::size_t>(i)]);
    pb.row(i) = b.row(idx[static_cast<std::size_t>(i)]);
  }
  CHECK(std::abs(rpd::rpd(pa, pb).rpd - base) < 1e-12);
}

TEST_CASE("unitary invariance on both sides") {
  std::mt19937_64 rng(19);
  const Eigen::MatrixXd a = gaussian(90, 6, rng);
  const Eigen::MatrixXd b = gaussian(90, 11, rng);
  const double base = rpd::rpd(a, b).rpd;
  const Eigen::MatrixXd q1 = rpd::testing::random_orthogonal(6, rng);
  const Eigen::MatrixXd q2 = rpd::testing::random_orthogonal(11, rng);
  CHECK(std::abs(rpd::rpd(a * q1, b * q2).rpd - base) < 1e-10);
}

TEST_CASE("degenerate inputs") {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 3);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(5, 3);
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd g = gaussian(5, 3, rng);
  CHECK_THROWS_AS(rpd::rpd(zero, g, false), DegenerateInputError);
  CHECK_THROWS_AS(rpd::rpd(zero, g, true), DegenerateInputError);
  CHECK_THROWS_AS(rpd::rpd(ones, g, true), DegenerateInputError);
  CHECK_THROWS_AS(rpd::rpd(g, gaussian(6, 3, rng)), DimensionError);
}

TEST_CASE("upper bound check") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd a = gaussian(40, 5, rng);
  SUBCASE("equal norms give bound 1") {
    const auto c = rpd_upper_bound_check(pair_of(a, a * rpd::testing::random_orthogonal(5, rng)));
    CHECK(c.bound == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("a = 2b gives bound 1.25") {
    // Scaling entries by sqrt(2) doubles every Gram entry.
    const auto c = rpd_upper_bound_check(pair_of(std::sqrt(2.0) * a, a), false);
    CHECK(c.bound == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(c.rpd <= c.bound);
  }
  SUBCASE("random pairs respect the bound") {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd b = gaussian(40, 1 + static_cast<Index>(rng() % 9), rng) * (0.1 + static_cast<double>(trial));
      const auto c = rpd_upper_bound_check(pair_of(a, b), trial % 2 == 0);
      CHECK(c.rpd <= c.bound + 1e-12);
    }
  }
}

TEST_CASE("per-word decomposition") {
  std::mt19937_64 rng(23);
  SUBCASE("identical pair has unit cosines") {
    const Eigen::MatrixXd a = gaussian(30, 4, rng);
    const auto r = decompose_per_word(pair_of(a, a));
    REQUIRE(r.per_word);
    for (const auto& w : *r.per_word) {
      REQUIRE(w.cos_theta);
      CHECK(std::abs(*w.cos_theta - 1.0) < 1e-12);
    }
  }
  SUBCASE("weighted cosines reproduce the cosine term") {
    const Eigen::MatrixXd a = gaussian(100, 10, rng);
    const Eigen::MatrixXd b = gaussian(100, 6, rng);
    const auto r = decompose_per_word(pair_of(a, b));
    REQUIRE(r.per_word);
    double weighted = 0.0, weights = 0.0;
    for (const auto& w : *r.per_word) {
      REQUIRE(w.cos_theta);
      CHECK(*w.cos_theta >= -1.0);
      CHECK(*w.cos_theta <= 1.0);
      weighted += w.weight * *w.cos_theta;
      weights += w.weight;
    }
    CHECK(std::abs(weighted - r.cosine_term) < 1e-9);
    CHECK(weights <= 1.0 + 1e-12);
    for (std::size_t i = 1; i < r.per_word->size(); ++i) {
      CHECK(*(*r.per_word)[i - 1].cos_theta <= *(*r.per_word)[i].cos_theta);
    }
    // Cosines computed from materialized Gram rows.
    const Eigen::MatrixXd sa = a / rpd::testing::naive_scale(a);
    const Eigen::MatrixXd sb = b / rpd::testing::naive_scale(b);
    const Eigen::MatrixXd ga = sa * sa.transpose();
    const Eigen::MatrixXd gb = sb * sb.transpose();
    for (const auto& w : *r.per_word) {
      const Index i = std::stoi(w.word.substr(1));
      const double expected = ga.row(i).dot(gb.row(i)) / (ga.row(i).norm() * gb.row(i).norm());
      CHECK(std::abs(*w.cos_theta - expected) < 1e-10);
    }
  }
  SUBCASE("independent Gaussians: RPD close to one minus mean cosine") {
    const auto a = random_gaussian_matrix(2000, 50, 5);
    const auto b = random_gaussian_matrix(2000, 50, 6);
    const auto r = decompose_per_word(pair_of(a, b));
    double mean_cos = 0.0, weights = 0.0;
    for (const auto& w : *r.per_word) {
      mean_cos += *w.cos_theta;
      weights += w.weight;
    }
    mean_cos /= static_cast<double>(r.per_word->size());
    CHECK(std::abs(r.rpd - (1.0 - mean_cos)) < 0.02);
    CHECK(std::abs(weights - 1.0) < 0.02);
  }
  SUBCASE("zero word rows are flagged, not fatal") {
    Eigen::MatrixXd a = gaussian(6, 3, rng);
    a.row(2).setZero();
    const Eigen::MatrixXd b = gaussian(6, 3, rng);
    const auto r = decompose_per_word(pair_of(a, b));
    REQUIRE(r.per_word);
    CHECK_FALSE(r.per_word->back().cos_theta.has_value());
    CHECK(r.per_word->back().word == "w2");
    CHECK(r.per_word->back().weight == 0.0);
    double weighted = 0.0;
    for (const auto& w : *r.per_word) {
      if (w.cos_theta) weighted += w.weight * *w.cos_theta;
    }
    CHECK(std::abs(weighted - r.cosine_term) < 1e-9);
  }
}

TEST_CASE("pairwise matrix") {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd e = gaussian(2000, 50, rng);
  SUBCASE("three copies give zeros") {
    std::vector<NamedEmbedding> embs{{"a", make_embedding(e)}, {"b", make_embedding(e)}, {"c", make_embedding(e)}};
    const auto m = rpd_pairwise_matrix(embs);
    CHECK(m.values.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rotation and independent copy") {
    const Eigen::MatrixXd q = rpd::testing::random_orthogonal(50, rng);
    std::vector<NamedEmbedding> embs{{"e", make_embedding(e)},
                                     {"eq", make_embedding(e * q)},
                                     {"g", make_embedding(gaussian(2000, 50, rng))}};
    const auto m = rpd_pairwise_matrix(embs, false, true, 2);
    CHECK(m.values(0, 1) < 1e-10);
    CHECK(std::abs(m.values(0, 2) - 0.975) < 0.01);
    CHECK(std::abs(m.values(1, 2) - 0.975) < 0.01);
    CHECK(m.values == m.values.transpose());
    CHECK(m.values.diagonal().isZero(0.0));

    std::vector<NamedEmbedding> permuted{embs[2], embs[0], embs[1]};
    const auto pm = rpd_pairwise_matrix(permuted, false, true, 1);
    const int map[3] = {2, 0, 1};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) CHECK(std::abs(pm.values(i, j) - m.values(map[i], map[j])) < 1e-12);
    }
  }
}

TEST_CASE("pairwise matrix vocabulary handling") {
  std::mt19937_64 rng(13);
  const EmbeddingMatrix a({"x", "y", "z", "u"}, gaussian(4, 2, rng));
  const EmbeddingMatrix b({"y", "z", "u", "v"}, gaussian(4, 3, rng));
  const EmbeddingMatrix c({"z", "u", "v", "x"}, gaussian(4, 2, rng));
  const EmbeddingMatrix lonely({"q", "r"}, gaussian(2, 2, rng));

  const auto per_pair = rpd_pairwise_matrix({{"a", a}, {"b", b}, {"c", c}});
  const auto common = rpd_pairwise_matrix({{"a", a}, {"b", b}, {"c", c}}, true);
  CHECK(common.common_vocab_size == 2);
  CHECK(std::abs(per_pair.values(0, 1) - rpd::rpd(align_vocabularies(a, b)).rpd) < 1e-15);
  const auto ab_common = rpd::rpd(AlignedPair(select_rows(a, {"u", "z"}), select_rows(b, {"u", "z"}))).rpd;
  CHECK(std::abs(common.values(0, 1) - ab_common) < 1e-15);

  try {
    rpd_pairwise_matrix({{"a", a}, {"lonely", lonely}});
    FAIL("expected AlignmentError");
  } catch (const AlignmentError& e) {
    CHECK(std::string(e.what()).find("lonely") != std::string::npos);
  }
  CHECK_THROWS_AS(rpd_pairwise_matrix({{"a", a}}), PreconditionError);
}
