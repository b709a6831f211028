#pragma once

#include "rpd/embedding_store.hpp"
#include "rpd/rpd_core.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rpd {

struct SimilarityPair {
  std::string word1;
  std::string word2;
  double score = 0.0;
};

struct SimilarityDataset {
  std::vector<SimilarityPair> pairs;
};

struct AnalogyQuestion {
  std::string a, b, c, expected;
  std::string section;
};

struct AnalogyDataset {
  std::vector<AnalogyQuestion> questions;
};

/// "word1<TAB>word2<TAB>score" lines; a first line whose third field is not
/// numeric is treated as a header. Whitespace-separated lines are accepted too.
SimilarityDataset load_similarity_dataset(const std::filesystem::path& path);

/// Google analogy format: "a b c d" lines, section headers start with ':'.
AnalogyDataset load_analogy_dataset(const std::filesystem::path& path);

/// Spearman's rho with average ranks for ties. Throws
/// UndefinedCorrelationError for constant inputs or fewer than two values.
double spearman(std::span<const double> x, std::span<const double> y);

/// Average (fractional) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> x);

struct EvalResult {
  std::optional<double> similarity_spearman;
  double similarity_coverage = 0.0;
  std::size_t similarity_pairs_used = 0;
  std::optional<double> analogy_accuracy;
  double analogy_coverage = 0.0;
  std::size_t analogy_answerable = 0;
  std::size_t analogy_correct = 0;
};

/// Cosine similarity of each in-vocabulary pair correlated with the human
/// scores. Words are looked up verbatim, then lowercased. The metric is
/// absent when fewer than two pairs are covered.
EvalResult eval_similarity(const EmbeddingMatrix& emb, const SimilarityDataset& ds);

/// 3CosAdd on L2-normalized rows: argmax over the vocabulary of
/// cos(v, v_b - v_a + v_c), excluding a, b and c. Ties go to the
/// lexicographically smallest word. Questions with any word out of
/// vocabulary are unanswerable and count against coverage only.
EvalResult eval_analogy_3cosadd(const EmbeddingMatrix& emb, const AnalogyDataset& ds);

/// Runs whichever evaluations have a dataset.
EvalResult evaluate(const EmbeddingMatrix& emb, const SimilarityDataset* sim,
                    const AnalogyDataset* ana);

struct StudyEntry {
  std::string name;
  std::optional<double> rpd;
  std::optional<double> delta_perf;
  EvalResult eval;
  std::optional<std::string> error;
};

struct StudyResult {
  EvalResult baseline;
  std::vector<StudyEntry> entries;
  /// Spearman correlation of rpd against delta_perf over successful entries.
  std::optional<double> rank_correlation;
};

/// For each embedding: RPD against the baseline (pairwise vocabulary
/// alignment) and delta_perf = |d similarity rho| + |d analogy accuracy|,
/// each side scored on its own vocabulary. Failures are recorded per entry.
StudyResult perf_vs_rpd_study(const EmbeddingMatrix& baseline,
                              const std::vector<NamedEmbedding>& others,
                              const SimilarityDataset* sim, const AnalogyDataset* ana);

}  // namespace rpd
