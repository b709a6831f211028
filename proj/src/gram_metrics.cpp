#include "rpd/gram_metrics.hpp"

#include "rpd/errors.hpp"
#include "rpd/summation.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace rpd {

namespace {

void require_same_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("row counts differ: " + std::to_string(a.rows()) + " vs " +
                         std::to_string(b.rows()));
  }
}

// E^T E, filled on both triangles.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& e) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(e.cols(), e.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(e.transpose());
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

double squared_norm(const Eigen::MatrixXd& m) {
  return compensated_sum_squares(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

}  // namespace

double gram_frobenius_norm(const Eigen::MatrixXd& e) {
  return std::sqrt(squared_norm(covariance(e)));
}

double gram_frobenius_norm(const EmbeddingMatrix& emb) { return gram_frobenius_norm(emb.matrix()); }

double cross_gram_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require_same_rows(a, b);
  const Eigen::MatrixXd c = a.transpose() * b;
  return squared_norm(c);
}

double cross_gram_inner(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  return cross_gram_inner(a.matrix(), b.matrix());
}

GramStats gram_stats(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require_same_rows(a, b);
  return {gram_frobenius_norm(a), gram_frobenius_norm(b), cross_gram_inner(a, b)};
}

GramStats naive_gram_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require_same_rows(a, b);
  if (a.rows() > kNaiveOracleMaxRows) {
    throw RefusalError("naive Gram oracle refuses n = " + std::to_string(a.rows()) + " > " +
                       std::to_string(kNaiveOracleMaxRows));
  }
  const Eigen::MatrixXd ga = a * a.transpose();
  const Eigen::MatrixXd gb = b * b.transpose();
  CompensatedSum na, nb, inner;
  for (Index j = 0; j < ga.cols(); ++j) {
    for (Index i = 0; i < ga.rows(); ++i) {
      na.add(ga(i, j) * ga(i, j));
      nb.add(gb(i, j) * gb(i, j));
      inner.add(ga(i, j) * gb(i, j));
    }
  }
  return {std::sqrt(na.value()), std::sqrt(nb.value()), inner.value()};
}

GramStats naive_gram_oracle(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  return naive_gram_oracle(a.matrix(), b.matrix());
}

std::vector<WordGramStats> per_word_gram_stats(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require_same_rows(a, b);
  const Eigen::MatrixXd ga = covariance(a);
  const Eigen::MatrixXd gb = covariance(b);
  const Eigen::MatrixXd cab = a.transpose() * b;

  // Row-wise quadratic forms: dot_i = a_i C b_i^T, |row_i(G1)|^2 = a_i (A^T A) a_i^T.
  const Eigen::VectorXd dots = ((a * cab).cwiseProduct(b)).rowwise().sum();
  const Eigen::VectorXd sq_a = ((a * ga).cwiseProduct(a)).rowwise().sum();
  const Eigen::VectorXd sq_b = ((b * gb).cwiseProduct(b)).rowwise().sum();

  std::vector<WordGramStats> out(static_cast<std::size_t>(a.rows()));
  for (Index i = 0; i < a.rows(); ++i) {
    auto& s = out[static_cast<std::size_t>(i)];
    s.dot = dots(i);
    s.norm_a = std::sqrt(std::max(0.0, sq_a(i)));
    s.norm_b = std::sqrt(std::max(0.0, sq_b(i)));
  }
  return out;
}

std::vector<WordGramStats> per_word_gram_stats(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  return per_word_gram_stats(a.matrix(), b.matrix());
}

}  // namespace rpd
