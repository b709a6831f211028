#include "rpd/embedding_store.hpp"

#include "rpd/errors.hpp"
#include "rpd/random.hpp"
#include "rpd/summation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <span>
#include <sstream>

namespace rpd {

namespace {

bool has_whitespace(std::string_view w) {
  return std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("non-numeric value '" + std::string(s) + "'", line_no);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(s) + "'", line_no);
  return v;
}

long long parse_count(std::string_view s, std::size_t line_no) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v <= 0) {
    throw FormatError("invalid header field '" + std::string(s) + "' (line " +
                      std::to_string(line_no) + ")");
  }
  return v;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> vocab, Eigen::MatrixXd matrix,
                                 bool standardized)
    : vocab_(std::move(vocab)), matrix_(std::move(matrix)), standardized_(standardized) {
  if (static_cast<Index>(vocab_.size()) != matrix_.rows()) {
    throw DimensionError("vocabulary has " + std::to_string(vocab_.size()) +
                         " words but matrix has " + std::to_string(matrix_.rows()) + " rows");
  }
  if (matrix_.cols() < 1) throw DimensionError("embedding dimension must be positive");
  if (!matrix_.allFinite()) throw FormatError("embedding matrix has non-finite entries");
  index_.reserve(vocab_.size());
  for (Index i = 0; i < static_cast<Index>(vocab_.size()); ++i) {
    const auto& w = vocab_[static_cast<std::size_t>(i)];
    if (w.empty() || has_whitespace(w)) {
      throw FormatError("invalid vocabulary word '" + w + "'");
    }
    if (!index_.emplace(w, i).second) throw DuplicateVocabError("duplicate word '" + w + "'");
  }
  if (standardized_ && std::abs(entry_scale(matrix_) - 1.0) > 1e-9) {
    throw PreconditionError("matrix flagged standardized but its std is not 1");
  }
}

std::optional<Index> EmbeddingMatrix::index_of(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingFormat parse_embedding_format(std::string_view name) {
  if (name == "word2vec" || name == "word2vec_text") return EmbeddingFormat::Word2VecText;
  if (name == "glove" || name == "glove_text") return EmbeddingFormat::GloveText;
  throw PreconditionError("unknown embedding format '" + std::string(name) + "'");
}

std::string_view to_string(EmbeddingFormat format) noexcept {
  return format == EmbeddingFormat::Word2VecText ? "word2vec" : "glove";
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  long long expected_rows = -1;
  Index dim = -1;

  if (format == EmbeddingFormat::Word2VecText) {
    if (!std::getline(in, line)) throw FormatError("empty word2vec file " + path.string());
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.size() != 2) throw FormatError("word2vec header must be 'n d': " + path.string());
    expected_rows = parse_count(fields[0], line_no);
    dim = static_cast<Index>(parse_count(fields[1], line_no));
  }

  std::vector<std::string> vocab;
  std::vector<double> values;
  if (expected_rows > 0) {
    vocab.reserve(static_cast<std::size_t>(expected_rows));
    values.reserve(static_cast<std::size_t>(expected_rows * dim));
  }
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (dim < 0) {
      if (fields.size() < 2) throw ParseError("line has no vector values", line_no);
      dim = static_cast<Index>(fields.size() - 1);
    }
    if (static_cast<Index>(fields.size()) != dim + 1) {
      throw ParseError("expected " + std::to_string(dim + 1) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    vocab.emplace_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) values.push_back(parse_double(fields[k], line_no));
  }
  if (in.bad()) throw IoError("read failure on " + path.string());

  if (expected_rows >= 0 && static_cast<long long>(vocab.size()) != expected_rows) {
    throw FormatError("header declares " + std::to_string(expected_rows) + " rows but " +
                      path.string() + " has " + std::to_string(vocab.size()));
  }
  if (vocab.empty()) throw FormatError("no embedding rows in " + path.string());

  const Index n = static_cast<Index>(vocab.size());
  Eigen::MatrixXd m =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          values.data(), n, dim);
  try {
    return EmbeddingMatrix(std::move(vocab), std::move(m));
  } catch (const DuplicateVocabError& e) {
    throw DuplicateVocabError(std::string(e.what()) + " in " + path.string());
  }
}

void save_embeddings(const EmbeddingMatrix& emb, const std::filesystem::path& path,
                     EmbeddingFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  if (format == EmbeddingFormat::Word2VecText) out << emb.size() << ' ' << emb.dim() << '\n';
  const auto& m = emb.matrix();
  for (Index i = 0; i < emb.size(); ++i) {
    out << emb.vocab()[static_cast<std::size_t>(i)];
    for (Index j = 0; j < emb.dim(); ++j) out << ' ' << m(i, j);
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

double entry_scale(const Eigen::MatrixXd& m) {
  const std::span<const double> xs(m.data(), static_cast<std::size_t>(m.size()));
  if (xs.empty()) return 0.0;
  return std::sqrt(compensated_sum_squares(xs) / static_cast<double>(xs.size()));
}

Eigen::MatrixXd standardized_matrix(const Eigen::MatrixXd& m) {
  if (m.size() < 2) throw DegenerateInputError("standardization needs at least two entries");
  const double* first = m.data();
  if (std::all_of(first, first + m.size(), [&](double x) { return x == *first; })) {
    throw DegenerateInputError("matrix is constant");
  }
  const double scale = entry_scale(m);
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DegenerateInputError("matrix has no usable scale");
  return m / scale;
}

EmbeddingMatrix standardize(const EmbeddingMatrix& emb) {
  return EmbeddingMatrix(emb.vocab(), standardized_matrix(emb.matrix()), true);
}

AlignedPair::AlignedPair(EmbeddingMatrix left, EmbeddingMatrix right)
    : left_(std::move(left)), right_(std::move(right)) {
  if (left_.vocab() != right_.vocab()) {
    throw AlignmentError("aligned pair requires identical vocabularies in identical order");
  }
}

EmbeddingMatrix select_rows(const EmbeddingMatrix& emb, const std::vector<std::string>& words) {
  Eigen::MatrixXd m(static_cast<Index>(words.size()), emb.dim());
  for (std::size_t k = 0; k < words.size(); ++k) {
    const auto idx = emb.index_of(words[k]);
    if (!idx) throw AlignmentError("word '" + words[k] + "' missing from embedding");
    m.row(static_cast<Index>(k)) = emb.matrix().row(*idx);
  }
  return EmbeddingMatrix(words, std::move(m));
}

AlignedPair align_vocabularies(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  std::vector<std::string> shared;
  const auto& smaller = a.size() <= b.size() ? a : b;
  const auto& larger = a.size() <= b.size() ? b : a;
  for (const auto& w : smaller.vocab()) {
    if (larger.contains(w)) shared.push_back(w);
  }
  if (shared.empty()) throw AlignmentError("vocabularies do not intersect");
  std::sort(shared.begin(), shared.end());

  auto left = select_rows(a, shared);
  auto right = select_rows(b, shared);
  for (Index i = 0; i < left.size(); ++i) {
    if (left.matrix().row(i).isZero(0.0) || right.matrix().row(i).isZero(0.0)) {
      throw AlignmentError("word '" + shared[static_cast<std::size_t>(i)] +
                           "' has an all-zero vector");
    }
  }
  AlignedPair pair(std::move(left), std::move(right));
  pair.left_coverage_ = static_cast<double>(shared.size()) / static_cast<double>(a.size());
  pair.right_coverage_ = static_cast<double>(shared.size()) / static_cast<double>(b.size());
  return pair;
}

std::vector<std::string> common_vocabulary(const std::vector<const EmbeddingMatrix*>& embs) {
  if (embs.empty()) return {};
  std::vector<std::string> shared;
  for (const auto& w : embs.front()->vocab()) {
    if (std::all_of(embs.begin() + 1, embs.end(), [&](const auto* e) { return e->contains(w); })) {
      shared.push_back(w);
    }
  }
  std::sort(shared.begin(), shared.end());
  return shared;
}

Eigen::MatrixXd random_gaussian_matrix(Index n, Index d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw PreconditionError("random embedding needs n >= 1 and d >= 1");
  auto engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) m(i, j) = normal(engine);
  }
  return m;
}

EmbeddingMatrix random_gaussian_embedding(Index n, Index d, std::uint64_t seed) {
  auto m = random_gaussian_matrix(n, d, seed);
  std::vector<std::string> vocab;
  vocab.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) vocab.push_back("w" + std::to_string(i));
  return EmbeddingMatrix(std::move(vocab), std::move(m));
}

}  // namespace rpd
