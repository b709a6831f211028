#pragma once

#include "rpd/embedding_store.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rpd {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Document = std::vector<std::string>;

/// Whitespace tokenization, one document per non-empty line. Context windows
/// never cross documents.
std::vector<Document> tokenize_corpus(std::string_view text, bool lowercase = true);
std::vector<Document> read_corpus(const std::filesystem::path& path, bool lowercase = true);

enum class WindowWeighting { Flat, Harmonic };

WindowWeighting parse_window_weighting(std::string_view name);

/// Symmetric word-context co-occurrence counts.
struct CooccurrenceCounts {
  std::vector<std::string> vocab;  // descending frequency, ties lexicographic
  std::vector<std::uint64_t> frequencies;  // empty when loaded from disk
  SparseMatrix counts;
  double total = 0.0;
  int window = 0;
  int min_count = 0;
  WindowWeighting weighting = WindowWeighting::Flat;
};

/// Each ordered pair of in-vocabulary tokens at distance 1..window inside a
/// document adds its weight (1, or 1/distance when harmonic) to both
/// (i, j) and (j, i). Out-of-vocabulary tokens keep their positions.
CooccurrenceCounts count_cooccurrences(const std::vector<Document>& corpus, int window,
                                       int min_count,
                                       WindowWeighting weighting = WindowWeighting::Flat);

/// "i j count" triples (one per stored entry, with a '#' metadata header) and
/// a vocabulary sidecar with one word per line in index order.
void save_counts(const CooccurrenceCounts& counts, const std::filesystem::path& triples,
                 const std::filesystem::path& vocab);
CooccurrenceCounts load_counts(const std::filesystem::path& triples,
                               const std::filesystem::path& vocab);

enum class SignalKind { Pmi, LogCount };

SignalKind parse_signal_kind(std::string_view name);
std::string_view to_string(SignalKind kind) noexcept;

struct SignalMatrix {
  SignalKind kind = SignalKind::Pmi;
  SparseMatrix matrix;
  std::vector<std::string> vocab;
};

/// Positive PMI: log(c_ij * total / (r_i r_j)) where positive, 0 elsewhere.
SignalMatrix pmi_matrix(const CooccurrenceCounts& counts);

/// log(1 + c_ij); zero counts stay structurally zero.
SignalMatrix log_count_matrix(const CooccurrenceCounts& counts);

SignalMatrix signal_matrix(const CooccurrenceCounts& counts, SignalKind kind);

struct SvdOptions {
  Index oversample = 10;
  /// Minimum number of power (subspace) iterations.
  int power_iters = 4;
  /// Iteration continues past power_iters until every retained triplet has
  /// ||M v - s u|| <= tolerance * s_max, or max_iters is reached.
  double tolerance = 1e-10;
  int max_iters = 300;
};

struct TruncatedSvd {
  Eigen::MatrixXd U;  // n x d, orthonormal columns
  Eigen::VectorXd S;  // d, descending
  Eigen::MatrixXd V;  // n x d
  int iterations = 0;
  double max_residual = 0.0;  // relative to s_max
  bool converged = false;
  /// Retained components with u . v < 0, i.e. negative eigenvalues of a
  /// symmetric signal. For those, U S U^T differs from U S V^T.
  Index negative_components = 0;
};

/// Randomized range finder with Gaussian test matrix (d + oversample
/// columns), subspace iteration, then an exact SVD of the projected matrix.
/// Column signs are fixed so each U column's largest-magnitude entry is
/// positive.
TruncatedSvd truncated_svd(const SparseMatrix& m, Index d, std::uint64_t seed,
                           const SvdOptions& options = {});
TruncatedSvd truncated_svd(const SignalMatrix& signal, Index d, std::uint64_t seed,
                           const SvdOptions& options = {});

/// Rows of U[:, :d] scaled by sqrt(S[:d]). Negative singular values are
/// clamped to zero.
EmbeddingMatrix svd_embedding(const Eigen::MatrixXd& u, const Eigen::VectorXd& s, Index d,
                              std::vector<std::string> vocab);
EmbeddingMatrix svd_embedding(const TruncatedSvd& svd, Index d, std::vector<std::string> vocab);

struct TrainOptions {
  SignalKind signal = SignalKind::Pmi;
  Index dim = 300;
  int window = 10;
  int min_count = 10;
  WindowWeighting weighting = WindowWeighting::Flat;
  std::uint64_t seed = 0;
  SvdOptions svd;
};

struct TrainedEmbedding {
  EmbeddingMatrix embedding;
  TruncatedSvd svd;
};

TrainedEmbedding train_svd_embedding(const CooccurrenceCounts& counts, const TrainOptions& options);
TrainedEmbedding train_svd_embedding(const std::vector<Document>& corpus,
                                     const TrainOptions& options);

}  // namespace rpd
