#include "rpd/eval_harness.hpp"

#include "rpd/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace rpd {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> tab;
  std::string field;
  std::istringstream ts(line);
  while (std::getline(ts, field, '\t')) tab.push_back(field);
  if (tab.size() == 3) return tab;
  std::vector<std::string> ws;
  std::istringstream ss(line);
  while (ss >> field) ws.push_back(field);
  return ws;
}

std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  auto first = s.data();
  auto last = s.data() + s.size();
  while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(*(last - 1)))) --last;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string lowercased(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<Index> lookup(const EmbeddingMatrix& emb, const std::string& w) {
  if (auto i = emb.index_of(w)) return i;
  return emb.index_of(lowercased(w));
}

Eigen::MatrixXd row_normalized(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw UndefinedCorrelationError("correlation undefined for constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

SimilarityDataset load_similarity_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open similarity dataset " + path.string());
  SimilarityDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split(line);
    if (fields.size() != 3) throw ParseError("expected 'word1 word2 score'", line_no);
    const auto score = to_number(fields[2]);
    if (!score) {
      if (ds.pairs.empty()) continue;  // header
      throw ParseError("non-numeric score '" + fields[2] + "'", line_no);
    }
    ds.pairs.push_back({fields[0], fields[1], *score});
  }
  if (ds.pairs.empty()) throw FormatError("no similarity pairs in " + path.string());
  return ds;
}

AnalogyDataset load_analogy_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open analogy dataset " + path.string());
  AnalogyDataset ds;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> f;
    std::string tok;
    while (ss >> tok) f.push_back(tok);
    if (f.empty()) continue;
    if (f[0].front() == ':') {
      section = line.substr(line.find(':') + 1);
      section.erase(0, section.find_first_not_of(" \t"));
      while (!section.empty() && std::isspace(static_cast<unsigned char>(section.back()))) section.pop_back();
      continue;
    }
    if (f.size() != 4) throw ParseError("expected 'a b c d'", line_no);
    if (f[3] == f[0] || f[3] == f[1] || f[3] == f[2]) {
      throw ParseError("expected word repeats a query word", line_no);
    }
    ds.questions.push_back({f[0], f[1], f[2], f[3], section});
  }
  if (ds.questions.empty()) throw FormatError("no analogy questions in " + path.string());
  return ds;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return x[i] < x[j]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("spearman inputs differ in length");
  if (x.size() < 2) throw UndefinedCorrelationError("spearman needs at least two values");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

EvalResult eval_similarity(const EmbeddingMatrix& emb, const SimilarityDataset& ds) {
  EvalResult r;
  std::vector<double> cosines, human;
  const auto& m = emb.matrix();
  for (const auto& p : ds.pairs) {
    const auto i = lookup(emb, p.word1);
    const auto j = lookup(emb, p.word2);
    if (!i || !j) continue;
    const double denom = m.row(*i).norm() * m.row(*j).norm();
    cosines.push_back(denom > 0.0 ? m.row(*i).dot(m.row(*j)) / denom : 0.0);
    human.push_back(p.score);
  }
  r.similarity_pairs_used = cosines.size();
  r.similarity_coverage =
      ds.pairs.empty() ? 0.0 : static_cast<double>(cosines.size()) / static_cast<double>(ds.pairs.size());
  if (cosines.size() >= 2) r.similarity_spearman = spearman(cosines, human);
  return r;
}

EvalResult eval_analogy_3cosadd(const EmbeddingMatrix& emb, const AnalogyDataset& ds) {
  EvalResult r;
  struct Query {
    Index a, b, c, expected;
  };
  std::vector<Query> queries;
  for (const auto& q : ds.questions) {
    const auto a = lookup(emb, q.a), b = lookup(emb, q.b), c = lookup(emb, q.c);
    const auto e = lookup(emb, q.expected);
    if (a && b && c && e) queries.push_back({*a, *b, *c, *e});
  }
  r.analogy_answerable = queries.size();
  r.analogy_coverage = ds.questions.empty()
                           ? 0.0
                           : static_cast<double>(queries.size()) / static_cast<double>(ds.questions.size());
  if (queries.empty()) return r;

  // Lexicographic rank of each row for tie-breaking.
  const auto n = emb.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index x, Index y) {
    return emb.vocab()[static_cast<std::size_t>(x)] < emb.vocab()[static_cast<std::size_t>(y)];
  });
  std::vector<Index> lex_rank(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) lex_rank[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;

  const Eigen::MatrixXd unit = row_normalized(emb.matrix());
  constexpr Index kBlock = 256;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < queries.size(); start += kBlock) {
    const auto count = static_cast<Index>(std::min<std::size_t>(kBlock, queries.size() - start));
    Eigen::MatrixXd targets(unit.cols(), count);
    for (Index k = 0; k < count; ++k) {
      const auto& q = queries[start + static_cast<std::size_t>(k)];
      Eigen::VectorXd t = (unit.row(q.b) - unit.row(q.a) + unit.row(q.c)).transpose();
      const double norm = t.norm();
      if (norm > 0.0) t /= norm;
      targets.col(k) = t;
    }
    const Eigen::MatrixXd scores = unit * targets;
    for (Index k = 0; k < count; ++k) {
      const auto& q = queries[start + static_cast<std::size_t>(k)];
      Index best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (Index i = 0; i < n; ++i) {
        if (i == q.a || i == q.b || i == q.c) continue;
        const double s = scores(i, k);
        if (best < 0 || s > best_score ||
            (s == best_score && lex_rank[static_cast<std::size_t>(i)] < lex_rank[static_cast<std::size_t>(best)])) {
          best = i;
          best_score = s;
        }
      }
      if (best == q.expected) ++correct;
    }
  }
  r.analogy_correct = correct;
  r.analogy_accuracy = static_cast<double>(correct) / static_cast<double>(queries.size());
  return r;
}

EvalResult evaluate(const EmbeddingMatrix& emb, const SimilarityDataset* sim,
                    const AnalogyDataset* ana) {
  EvalResult r;
  if (sim) {
    const auto s = eval_similarity(emb, *sim);
    r.similarity_spearman = s.similarity_spearman;
    r.similarity_coverage = s.similarity_coverage;
    r.similarity_pairs_used = s.similarity_pairs_used;
  }
  if (ana) {
    const auto a = eval_analogy_3cosadd(emb, *ana);
    r.analogy_accuracy = a.analogy_accuracy;
    r.analogy_coverage = a.analogy_coverage;
    r.analogy_answerable = a.analogy_answerable;
    r.analogy_correct = a.analogy_correct;
  }
  return r;
}

StudyResult perf_vs_rpd_study(const EmbeddingMatrix& baseline,
                              const std::vector<NamedEmbedding>& others,
                              const SimilarityDataset* sim, const AnalogyDataset* ana) {
  if (!sim && !ana) throw PreconditionError("study needs a similarity or analogy dataset");
  StudyResult out;
  out.baseline = evaluate(baseline, sim, ana);

  std::vector<double> rpds, deltas;
  for (const auto& other : others) {
    StudyEntry e;
    e.name = other.name;
    try {
      e.rpd = rpd(align_vocabularies(baseline, other.embedding)).rpd;
      e.eval = evaluate(other.embedding, sim, ana);
      double delta = 0.0;
      bool any = false;
      if (out.baseline.similarity_spearman && e.eval.similarity_spearman) {
        delta += std::abs(*e.eval.similarity_spearman - *out.baseline.similarity_spearman);
        any = true;
      }
      if (out.baseline.analogy_accuracy && e.eval.analogy_accuracy) {
        delta += std::abs(*e.eval.analogy_accuracy - *out.baseline.analogy_accuracy);
        any = true;
      }
      if (!any) throw PreconditionError("no metric available on both baseline and " + other.name);
      e.delta_perf = delta;
      rpds.push_back(*e.rpd);
      deltas.push_back(delta);
    } catch (const Error& err) {
      e.error = err.what();
    }
    out.entries.push_back(std::move(e));
  }
  if (rpds.size() >= 2) {
    try {
      out.rank_correlation = spearman(rpds, deltas);
    } catch (const UndefinedCorrelationError&) {
    }
  }
  return out;
}

}  // namespace rpd
