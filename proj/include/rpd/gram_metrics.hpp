#pragma once

#include "rpd/embedding_store.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rpd {

// Statistics of the n x n Gram matrices E E^T computed from d x d (or
// d1 x d2) products only:
//   ||E E^T||_F^2           = ||E^T E||_F^2
//   <E1 E1^T, E2 E2^T>      = ||E1^T E2||_F^2
// Cost is O(n d^2) time and O(d^2) extra memory.

double gram_frobenius_norm(const Eigen::MatrixXd& e);
double gram_frobenius_norm(const EmbeddingMatrix& emb);

/// Frobenius inner product of the two Gram matrices. Row counts must match.
double cross_gram_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double cross_gram_inner(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

struct GramStats {
  double norm_a = 0.0;
  double norm_b = 0.0;
  double inner = 0.0;
};

/// All three statistics with shared intermediates.
GramStats gram_stats(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

inline constexpr Index kNaiveOracleMaxRows = 2000;

/// Materializes both n x n Gram matrices and evaluates the statistics from
/// their definitions. Test oracle; refuses n > kNaiveOracleMaxRows.
GramStats naive_gram_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
GramStats naive_gram_oracle(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

/// Row i of the Gram matrix is word i's vector of inner products with every
/// word. For each i: dot = <row_i(G1), row_i(G2)>, norm_a = ||row_i(G1)||,
/// norm_b = ||row_i(G2)||.
struct WordGramStats {
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
};

std::vector<WordGramStats> per_word_gram_stats(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
std::vector<WordGramStats> per_word_gram_stats(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

}  // namespace rpd
