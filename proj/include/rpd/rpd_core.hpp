#pragma once

#include "rpd/embedding_store.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace rpd {

/// One word's contribution to the cosine term: the angle between its rows of
/// the two Gram matrices and its weight ||row_i(G1)|| ||row_i(G2)|| / (||G1|| ||G2||).
/// `cos_theta` is empty when either row is zero (the angle is undefined).
struct PerWordEntry {
  std::string word;
  std::optional<double> cos_theta;
  double weight = 0.0;
};

/// RPD = ratio_term - cosine_term, where
///   ratio_term  = (a/b + b/a) / 2,  a = ||G1||, b = ||G2||
///   cosine_term = <G1, G2> / (a b)
struct RpdReport {
  double rpd = 0.0;
  double ratio_term = 0.0;
  double cosine_term = 0.0;
  Index n = 0;
  Index d_left = 0;
  Index d_right = 0;
  double left_gram_norm = 0.0;
  double right_gram_norm = 0.0;
  std::optional<std::vector<PerWordEntry>> per_word;
};

/// Relative pairwise inner product distance of two row-aligned matrices.
/// With `standardize_inputs` each side is first divided by its matrix-wide
/// standard deviation. Throws DegenerateInputError if a Gram norm is zero.
RpdReport rpd(const Eigen::MatrixXd& left, const Eigen::MatrixXd& right,
              bool standardize_inputs = true);
RpdReport rpd(const AlignedPair& pair, bool standardize_inputs = true);

/// Same as rpd() plus the per-word decomposition, sorted by ascending
/// cosine (undefined cosines last).
RpdReport decompose_per_word(const AlignedPair& pair, bool standardize_inputs = true);

struct NamedEmbedding {
  std::string name;
  EmbeddingMatrix embedding;
};

struct PairwiseRpd {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // symmetric, zero diagonal
  Index common_vocab_size = 0;  // set when computed over a common vocabulary
};

/// RPD for every unordered pair. Each pair is aligned on its own vocabulary
/// intersection unless `common_vocab` is set, in which case all embeddings
/// are restricted to the intersection of every vocabulary first. Pairs run
/// concurrently on up to `threads` workers (0 = default).
PairwiseRpd rpd_pairwise_matrix(const std::vector<NamedEmbedding>& embs, bool common_vocab = false,
                                bool standardize_inputs = true, std::size_t threads = 0);

struct UpperBoundCheck {
  double rpd = 0.0;
  double bound = 0.0;
};

/// RPD together with its Cauchy-Schwarz bound (a/b + b/a) / 2.
UpperBoundCheck rpd_upper_bound_check(const AlignedPair& pair, bool standardize_inputs = true);

}  // namespace rpd
