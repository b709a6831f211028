#include "rpd/rpd_core.hpp"

#include "rpd/errors.hpp"
#include "rpd/gram_metrics.hpp"
#include "rpd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rpd {

namespace {

RpdReport report_from_stats(const GramStats& s, Index n, Index d_left, Index d_right) {
  if (!(s.norm_a > 0.0) || !(s.norm_b > 0.0)) {
    throw DegenerateInputError("RPD undefined: a Gram matrix has zero norm");
  }
  RpdReport r;
  r.n = n;
  r.d_left = d_left;
  r.d_right = d_right;
  r.left_gram_norm = s.norm_a;
  r.right_gram_norm = s.norm_b;
  r.ratio_term = 0.5 * (s.norm_a / s.norm_b + s.norm_b / s.norm_a);
  r.cosine_term = s.inner / (s.norm_a * s.norm_b);
  // (a - b)^2 / (2ab) + (1 - cos) avoids cancellation when both terms are near 1.
  const double spread = (s.norm_a - s.norm_b) * (s.norm_a - s.norm_b) / (2.0 * s.norm_a * s.norm_b);
  r.rpd = std::max(0.0, spread + (1.0 - r.cosine_term));
  return r;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> prepared(const Eigen::MatrixXd& left,
                                                     const Eigen::MatrixXd& right,
                                                     bool standardize_inputs) {
  if (left.rows() != right.rows()) {
    throw DimensionError("RPD inputs have different row counts");
  }
  if (left.rows() < 1) throw PreconditionError("RPD needs at least one word");
  if (!standardize_inputs) return {left, right};
  return {standardized_matrix(left), standardized_matrix(right)};
}

}  // namespace

RpdReport rpd(const Eigen::MatrixXd& left, const Eigen::MatrixXd& right, bool standardize_inputs) {
  const auto [a, b] = prepared(left, right, standardize_inputs);
  return report_from_stats(gram_stats(a, b), a.rows(), a.cols(), b.cols());
}

RpdReport rpd(const AlignedPair& pair, bool standardize_inputs) {
  return rpd(pair.left().matrix(), pair.right().matrix(), standardize_inputs);
}

RpdReport decompose_per_word(const AlignedPair& pair, bool standardize_inputs) {
  const auto [a, b] = prepared(pair.left().matrix(), pair.right().matrix(), standardize_inputs);
  auto report = report_from_stats(gram_stats(a, b), a.rows(), a.cols(), b.cols());

  const auto stats = per_word_gram_stats(a, b);
  const double denom = report.left_gram_norm * report.right_gram_norm;
  std::vector<PerWordEntry> words;
  words.reserve(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    PerWordEntry e;
    e.word = pair.shared_vocab()[i];
    const double norms = stats[i].norm_a * stats[i].norm_b;
    e.weight = norms / denom;
    if (norms > 0.0) e.cos_theta = std::clamp(stats[i].dot / norms, -1.0, 1.0);
    words.push_back(std::move(e));
  }
  std::stable_sort(words.begin(), words.end(), [](const PerWordEntry& x, const PerWordEntry& y) {
    if (x.cos_theta.has_value() != y.cos_theta.has_value()) return x.cos_theta.has_value();
    if (!x.cos_theta) return false;
    return *x.cos_theta < *y.cos_theta;
  });
  report.per_word = std::move(words);
  return report;
}

PairwiseRpd rpd_pairwise_matrix(const std::vector<NamedEmbedding>& embs, bool common_vocab,
                                bool standardize_inputs, std::size_t threads) {
  if (embs.size() < 2) throw PreconditionError("pairwise RPD needs at least two embeddings");
  const std::size_t k = embs.size();
  PairwiseRpd out;
  out.values = Eigen::MatrixXd::Zero(static_cast<Index>(k), static_cast<Index>(k));
  for (const auto& e : embs) out.names.push_back(e.name);

  std::vector<EmbeddingMatrix> restricted;
  if (common_vocab) {
    std::vector<const EmbeddingMatrix*> ptrs;
    for (const auto& e : embs) ptrs.push_back(&e.embedding);
    const auto shared = common_vocabulary(ptrs);
    if (shared.empty()) throw AlignmentError("the embeddings have no common vocabulary");
    for (const auto& e : embs) restricted.push_back(select_rows(e.embedding, shared));
    out.common_vocab_size = static_cast<Index>(shared.size());
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> results(pairs.size());
  parallel_for(
      pairs.size(),
      [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        try {
          const auto pair = common_vocab ? AlignedPair(restricted[i], restricted[j])
                                         : align_vocabularies(embs[i].embedding, embs[j].embedding);
          results[p] = rpd(pair, standardize_inputs).rpd;
        } catch (const AlignmentError& e) {
          throw AlignmentError("pair (" + embs[i].name + ", " + embs[j].name + "): " + e.what());
        }
      },
      threads);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    out.values(static_cast<Index>(i), static_cast<Index>(j)) = results[p];
    out.values(static_cast<Index>(j), static_cast<Index>(i)) = results[p];
  }
  return out;
}

UpperBoundCheck rpd_upper_bound_check(const AlignedPair& pair, bool standardize_inputs) {
  const auto r = rpd(pair, standardize_inputs);
  if (r.rpd > r.ratio_term + 1e-12) {
    throw std::logic_error("RPD exceeds its Cauchy-Schwarz bound");
  }
  return {r.rpd, r.ratio_term};
}

}  // namespace rpd
