#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rpd {

using Index = Eigen::Index;

/// Vocabulary-indexed embedding table: row i of the matrix is the vector of
/// vocab()[i]. Immutable after construction; the constructor enforces that
/// words are unique, non-empty and whitespace-free, that the shape matches
/// the vocabulary, and that every entry is finite.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::vector<std::string> vocab, Eigen::MatrixXd matrix,
                  bool standardized = false);

  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  Index size() const noexcept { return matrix_.rows(); }
  Index dim() const noexcept { return matrix_.cols(); }
  bool standardized() const noexcept { return standardized_; }

  std::optional<Index> index_of(std::string_view word) const;
  bool contains(std::string_view word) const { return index_of(word).has_value(); }

 private:
  std::vector<std::string> vocab_;
  Eigen::MatrixXd matrix_;
  bool standardized_;
  std::unordered_map<std::string, Index> index_;
};

enum class EmbeddingFormat { Word2VecText, GloveText };

/// Accepts "word2vec", "word2vec_text", "glove", "glove_text".
EmbeddingFormat parse_embedding_format(std::string_view name);
std::string_view to_string(EmbeddingFormat format) noexcept;

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format);

/// Writes with 17 significant digits, so a reload is exact.
void save_embeddings(const EmbeddingMatrix& emb, const std::filesystem::path& path,
                     EmbeddingFormat format);

/// Root mean square over all entries, i.e. the population standard deviation
/// taken about zero. Unlike the centered deviation it is unchanged by
/// right-multiplication with an orthogonal matrix.
double entry_scale(const Eigen::MatrixXd& m);

/// Divides every entry by entry_scale. The mean is not subtracted. Throws
/// DegenerateInputError for constant matrices (including all zeros) and for
/// matrices with fewer than two entries.
Eigen::MatrixXd standardized_matrix(const Eigen::MatrixXd& m);
EmbeddingMatrix standardize(const EmbeddingMatrix& emb);

/// Two embeddings restricted to one shared, identically ordered vocabulary.
/// Dimensions may differ between the sides.
class AlignedPair {
 public:
  /// Requires left.vocab() == right.vocab() and a non-empty vocabulary.
  AlignedPair(EmbeddingMatrix left, EmbeddingMatrix right);

  const EmbeddingMatrix& left() const noexcept { return left_; }
  const EmbeddingMatrix& right() const noexcept { return right_; }
  const std::vector<std::string>& shared_vocab() const noexcept { return left_.vocab(); }
  Index size() const noexcept { return left_.size(); }

  /// Fraction of each input vocabulary that survived alignment (1.0 when the
  /// pair was built directly).
  double left_coverage() const noexcept { return left_coverage_; }
  double right_coverage() const noexcept { return right_coverage_; }

 private:
  friend AlignedPair align_vocabularies(const EmbeddingMatrix&, const EmbeddingMatrix&);

  EmbeddingMatrix left_;
  EmbeddingMatrix right_;
  double left_coverage_ = 1.0;
  double right_coverage_ = 1.0;
};

/// Selects the rows of `emb` for `words`, in that order. Every word must be
/// present.
EmbeddingMatrix select_rows(const EmbeddingMatrix& emb, const std::vector<std::string>& words);

/// Intersects the vocabularies, orders the shared words by byte-wise
/// lexicographic order and selects the matching rows from both sides.
/// Throws AlignmentError on an empty intersection or when a shared word has
/// an all-zero vector on either side.
AlignedPair align_vocabularies(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

/// Shared vocabulary of several embeddings, sorted lexicographically.
std::vector<std::string> common_vocabulary(const std::vector<const EmbeddingMatrix*>& embs);

/// n x d matrix of i.i.d. standard normal draws with vocabulary w0..w{n-1}.
/// The same seed always yields a bit-identical matrix.
EmbeddingMatrix random_gaussian_embedding(Index n, Index d, std::uint64_t seed);
Eigen::MatrixXd random_gaussian_matrix(Index n, Index d, std::uint64_t seed);

}  // namespace rpd
