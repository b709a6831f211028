#include "rpd/spectral.hpp"

#include "rpd/errors.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

namespace rpd {

std::vector<Document> tokenize_corpus(std::string_view text, bool lowercase) {
  std::vector<Document> docs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const auto line = text.substr(pos, end - pos);
    Document doc;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) {
        std::string tok(line.substr(i, j - i));
        if (lowercase) {
          for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        doc.push_back(std::move(tok));
      }
      i = j;
    }
    if (!doc.empty()) docs.push_back(std::move(doc));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return docs;
}

std::vector<Document> read_corpus(const std::filesystem::path& path, bool lowercase) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return tokenize_corpus(buf.str(), lowercase);
}

WindowWeighting parse_window_weighting(std::string_view name) {
  if (name == "flat") return WindowWeighting::Flat;
  if (name == "harmonic") return WindowWeighting::Harmonic;
  throw PreconditionError("unknown window weighting '" + std::string(name) + "'");
}

CooccurrenceCounts count_cooccurrences(const std::vector<Document>& corpus, int window,
                                       int min_count, WindowWeighting weighting) {
  if (window < 1) throw PreconditionError("window must be at least 1");
  std::unordered_map<std::string, std::uint64_t> freq;
  std::size_t tokens = 0;
  for (const auto& doc : corpus) {
    for (const auto& t : doc) ++freq[t];
    tokens += doc.size();
  }
  if (tokens == 0) throw CorpusError("corpus is empty");

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [w, f] : freq) {
    if (f >= static_cast<std::uint64_t>(std::max(min_count, 0))) kept.emplace_back(w, f);
  }
  if (kept.empty()) {
    throw CorpusError("no word reaches min_count " + std::to_string(min_count));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });

  CooccurrenceCounts out;
  out.window = window;
  out.min_count = min_count;
  out.weighting = weighting;
  std::unordered_map<std::string, std::uint32_t> ids;
  ids.reserve(kept.size());
  for (const auto& [w, f] : kept) {
    ids.emplace(w, static_cast<std::uint32_t>(out.vocab.size()));
    out.vocab.push_back(w);
    out.frequencies.push_back(f);
  }

  // Unordered pairs keyed (lo << 32 | hi).
  std::unordered_map<std::uint64_t, double> pairs;
  std::vector<std::int64_t> seq;
  for (const auto& doc : corpus) {
    seq.clear();
    for (const auto& t : doc) {
      const auto it = ids.find(t);
      seq.push_back(it == ids.end() ? -1 : static_cast<std::int64_t>(it->second));
    }
    const std::size_t len = seq.size();
    for (std::size_t i = 0; i < len; ++i) {
      if (seq[i] < 0) continue;
      const std::size_t stop = std::min(len, i + static_cast<std::size_t>(window) + 1);
      for (std::size_t j = i + 1; j < stop; ++j) {
        if (seq[j] < 0) continue;
        const auto lo = static_cast<std::uint64_t>(std::min(seq[i], seq[j]));
        const auto hi = static_cast<std::uint64_t>(std::max(seq[i], seq[j]));
        const double w =
            weighting == WindowWeighting::Flat ? 1.0 : 1.0 / static_cast<double>(j - i);
        pairs[(lo << 32) | hi] += w;
      }
    }
  }

  std::vector<std::pair<std::uint64_t, double>> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(sorted.size() * 2);
  double total = 0.0;
  for (const auto& [key, v] : sorted) {
    const auto lo = static_cast<Index>(key >> 32);
    const auto hi = static_cast<Index>(key & 0xffffffffULL);
    if (lo == hi) {
      triplets.emplace_back(lo, lo, 2.0 * v);
    } else {
      triplets.emplace_back(lo, hi, v);
      triplets.emplace_back(hi, lo, v);
    }
    total += 2.0 * v;
  }
  if (!(total > 0.0)) throw CorpusError("corpus has no in-vocabulary co-occurrences");

  const auto n = static_cast<Index>(out.vocab.size());
  out.counts.resize(n, n);
  out.counts.setFromTriplets(triplets.begin(), triplets.end());
  out.counts.makeCompressed();
  out.total = total;
  return out;
}

void save_counts(const CooccurrenceCounts& counts, const std::filesystem::path& triples,
                 const std::filesystem::path& vocab) {
  std::ofstream t(triples);
  if (!t) throw IoError("cannot open " + triples.string() + " for writing");
  t.precision(17);
  t << "# window=" << counts.window << " min_count=" << counts.min_count << " weighting="
    << (counts.weighting == WindowWeighting::Flat ? "flat" : "harmonic") << '\n';
  for (Index k = 0; k < counts.counts.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(counts.counts, k); it; ++it) {
      t << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  t.flush();
  if (!t) throw IoError("write failure on " + triples.string());

  std::ofstream v(vocab);
  if (!v) throw IoError("cannot open " + vocab.string() + " for writing");
  for (const auto& w : counts.vocab) v << w << '\n';
  v.flush();
  if (!v) throw IoError("write failure on " + vocab.string());
}

CooccurrenceCounts load_counts(const std::filesystem::path& triples,
                               const std::filesystem::path& vocab) {
  CooccurrenceCounts out;
  {
    std::ifstream v(vocab);
    if (!v) throw IoError("cannot open vocabulary " + vocab.string());
    std::string line;
    while (std::getline(v, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) out.vocab.push_back(line);
    }
  }
  const auto n = static_cast<Index>(out.vocab.size());
  if (n == 0) throw FormatError("empty vocabulary file " + vocab.string());

  std::ifstream t(triples);
  if (!t) throw IoError("cannot open counts " + triples.string());
  std::vector<Eigen::Triplet<double>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(t, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const auto key = kv.substr(0, eq);
        const auto val = kv.substr(eq + 1);
        if (key == "window") out.window = std::stoi(val);
        if (key == "min_count") out.min_count = std::stoi(val);
        if (key == "weighting") out.weighting = parse_window_weighting(val);
      }
      continue;
    }
    std::istringstream fields(line);
    long long i = -1, j = -1;
    double c = 0.0;
    std::string extra;
    if (!(fields >> i >> j >> c) || (fields >> extra)) throw ParseError("expected 'i j count'", line_no);
    if (i < 0 || j < 0 || i >= n || j >= n) throw ParseError("index out of range", line_no);
    if (!(c >= 0.0) || !std::isfinite(c)) throw ParseError("count must be finite and >= 0", line_no);
    entries.emplace_back(static_cast<Index>(i), static_cast<Index>(j), c);
    out.total += c;
  }
  out.counts.resize(n, n);
  out.counts.setFromTriplets(entries.begin(), entries.end());
  out.counts.makeCompressed();
  if (!(out.total > 0.0)) throw CorpusError("counts file has zero total");
  return out;
}

SignalKind parse_signal_kind(std::string_view name) {
  if (name == "pmi" || name == "ppmi") return SignalKind::Pmi;
  if (name == "logcount" || name == "log_count" || name == "lc") return SignalKind::LogCount;
  throw PreconditionError("unknown signal '" + std::string(name) + "'");
}

std::string_view to_string(SignalKind kind) noexcept {
  return kind == SignalKind::Pmi ? "pmi" : "logcount";
}

SignalMatrix pmi_matrix(const CooccurrenceCounts& counts) {
  if (!(counts.total > 0.0)) throw PreconditionError("PMI needs a positive total count");
  const Eigen::VectorXd rowsum = counts.counts * Eigen::VectorXd::Ones(counts.counts.cols());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(counts.counts.nonZeros()));
  for (Index k = 0; k < counts.counts.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(counts.counts, k); it; ++it) {
      if (!(it.value() > 0.0)) continue;
      const double pmi =
          std::log(it.value() * counts.total / (rowsum(it.row()) * rowsum(it.col())));
      if (pmi > 0.0) entries.emplace_back(it.row(), it.col(), pmi);
    }
  }
  SignalMatrix out;
  out.kind = SignalKind::Pmi;
  out.vocab = counts.vocab;
  out.matrix.resize(counts.counts.rows(), counts.counts.cols());
  out.matrix.setFromTriplets(entries.begin(), entries.end());
  out.matrix.makeCompressed();
  return out;
}

SignalMatrix log_count_matrix(const CooccurrenceCounts& counts) {
  if (!(counts.total > 0.0)) throw PreconditionError("log-count needs a positive total count");
  SignalMatrix out;
  out.kind = SignalKind::LogCount;
  out.vocab = counts.vocab;
  out.matrix = counts.counts;
  for (Index k = 0; k < out.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(out.matrix, k); it; ++it) it.valueRef() = std::log1p(it.value());
  }
  out.matrix.prune(0.0);
  out.matrix.makeCompressed();
  return out;
}

SignalMatrix signal_matrix(const CooccurrenceCounts& counts, SignalKind kind) {
  return kind == SignalKind::Pmi ? pmi_matrix(counts) : log_count_matrix(counts);
}

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

TruncatedSvd truncated_svd(const SparseMatrix& m, Index d, std::uint64_t seed,
                           const SvdOptions& options) {
  const Index n = m.rows();
  if (m.cols() != n) throw DimensionError("truncated SVD expects a square signal matrix");
  if (d < 1 || d > n) {
    throw DimensionError("requested " + std::to_string(d) + " dimensions from a " +
                         std::to_string(n) + "-word vocabulary");
  }
  if (options.oversample < 0 || options.power_iters < 0) {
    throw PreconditionError("oversample and power_iters must be non-negative");
  }
  const Index l = std::min(n, d + options.oversample);

  Eigen::MatrixXd q = orthonormal_basis(m * random_gaussian_matrix(n, l, seed));

  TruncatedSvd out;
  for (int it = 0;; ++it) {
    if (it >= options.power_iters) {
      // B = Q^T M; factor B^T = X S W^T so that B = W S X^T.
      const Eigen::MatrixXd bt = m.transpose() * q;
      Eigen::BDCSVD<Eigen::MatrixXd> svd(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
      out.S = svd.singularValues().head(d);
      out.U = q * svd.matrixV().leftCols(d);
      out.V = svd.matrixU().leftCols(d);
      out.iterations = it;

      const double top = out.S.size() > 0 ? out.S(0) : 0.0;
      const Eigen::MatrixXd residual = m * out.V - out.U * out.S.asDiagonal();
      out.max_residual = 0.0;
      if (top > 0.0) {
        for (Index k = 0; k < d; ++k) {
          out.max_residual = std::max(out.max_residual, residual.col(k).norm() / top);
        }
      }
      out.converged = out.max_residual <= options.tolerance;
      if (out.converged || it >= options.max_iters) break;
    }
    q = orthonormal_basis(m * orthonormal_basis(m.transpose() * q));
  }

  for (Index k = 0; k < d; ++k) {
    Index arg = 0;
    out.U.col(k).cwiseAbs().maxCoeff(&arg);
    if (out.U(arg, k) < 0.0) {
      out.U.col(k) *= -1.0;
      out.V.col(k) *= -1.0;
    }
    if (out.U.col(k).dot(out.V.col(k)) < 0.0) ++out.negative_components;
  }
  return out;
}

TruncatedSvd truncated_svd(const SignalMatrix& signal, Index d, std::uint64_t seed,
                           const SvdOptions& options) {
  return truncated_svd(signal.matrix, d, seed, options);
}

EmbeddingMatrix svd_embedding(const Eigen::MatrixXd& u, const Eigen::VectorXd& s, Index d,
                              std::vector<std::string> vocab) {
  if (d < 1 || d > u.cols() || d > s.size()) {
    throw DimensionError("embedding dimension " + std::to_string(d) + " exceeds the factorization");
  }
  Eigen::VectorXd scale = s.head(d);
  Index clamped = 0;
  for (Index k = 0; k < d; ++k) {
    if (scale(k) < 0.0) {
      scale(k) = 0.0;
      ++clamped;
    }
  }
  if (clamped > 0) {
    std::cerr << "warning: clamped " << clamped << " negative singular value(s) to zero\n";
  }
  Eigen::MatrixXd e = u.leftCols(d) * scale.cwiseSqrt().asDiagonal();
  return EmbeddingMatrix(std::move(vocab), std::move(e));
}

EmbeddingMatrix svd_embedding(const TruncatedSvd& svd, Index d, std::vector<std::string> vocab) {
  return svd_embedding(svd.U, svd.S, d, std::move(vocab));
}

TrainedEmbedding train_svd_embedding(const CooccurrenceCounts& counts, const TrainOptions& options) {
  const auto n = static_cast<Index>(counts.vocab.size());
  if (options.dim > n) {
    throw DimensionError("requested dimension " + std::to_string(options.dim) +
                         " exceeds vocabulary size " + std::to_string(n));
  }
  const auto signal = signal_matrix(counts, options.signal);
  auto svd = truncated_svd(signal, options.dim, options.seed, options.svd);
  if (!svd.converged && options.svd.max_iters > options.svd.power_iters) {
    std::cerr << "warning: truncated SVD stopped after " << svd.iterations
              << " iterations with relative residual " << svd.max_residual << '\n';
  }
  auto emb = svd_embedding(svd, options.dim, counts.vocab);
  return {std::move(emb), std::move(svd)};
}

TrainedEmbedding train_svd_embedding(const std::vector<Document>& corpus,
                                     const TrainOptions& options) {
  const auto counts = count_cooccurrences(corpus, options.window, options.min_count, options.weighting);
  return train_svd_embedding(counts, options);
}

}  // namespace rpd
