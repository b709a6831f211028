#include "rpd/report_io.hpp"

#include "rpd/errors.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace rpd {

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

}  // namespace

nlohmann::json to_json(const RpdReport& r, std::optional<std::size_t> top_k) {
  nlohmann::json j = {
      {"rpd", r.rpd},
      {"ratio_term", r.ratio_term},
      {"cosine_term", r.cosine_term},
      {"n", r.n},
      {"d_left", r.d_left},
      {"d_right", r.d_right},
      {"left_gram_norm", r.left_gram_norm},
      {"right_gram_norm", r.right_gram_norm},
  };
  if (r.per_word) {
    auto rows = nlohmann::json::array();
    const std::size_t limit = top_k ? std::min(*top_k, r.per_word->size()) : r.per_word->size();
    for (std::size_t i = 0; i < limit; ++i) {
      const auto& w = (*r.per_word)[i];
      rows.push_back({{"word", w.word}, {"cos_theta_i", optional_number(w.cos_theta)}, {"w_i", w.weight}});
    }
    j["per_word"] = std::move(rows);
  }
  return j;
}

nlohmann::json to_json(const NullDistribution& null, bool include_samples) {
  nlohmann::json j = {
      {"n", null.n},
      {"d_left", null.d_left},
      {"d_right", null.d_right},
      {"replicates", null.replicates},
      {"mu", null.mu},
      {"sigma", null.sigma},
      {"skewness", finite_or_null(null.skewness)},
      {"excess_kurtosis", finite_or_null(null.excess_kurtosis)},
      {"seed", null.seed},
      {"low_replicates", null.low_replicates},
  };
  if (include_samples && null.samples) j["samples"] = *null.samples;
  return j;
}

nlohmann::json to_json(const ZTestResult& z) {
  const char* tail = z.tail == Tail::TwoSided ? "two-sided" : (z.tail == Tail::Lower ? "lower" : "upper");
  return {{"z", z.z},
          {"p_value", z.p_value},
          {"tail", tail},
          {"alpha", kSignificanceLevel},
          {"reject_at_0_01", z.reject_at_0_01}};
}

nlohmann::json to_json(const EvalResult& e) {
  return {{"similarity_spearman", optional_number(e.similarity_spearman)},
          {"similarity_coverage", e.similarity_coverage},
          {"similarity_pairs_used", e.similarity_pairs_used},
          {"analogy_accuracy", optional_number(e.analogy_accuracy)},
          {"analogy_coverage", e.analogy_coverage},
          {"analogy_answerable", e.analogy_answerable},
          {"analogy_correct", e.analogy_correct}};
}

void write_pairwise_tsv(std::ostream& out, const PairwiseRpd& m) {
  const auto prec = out.precision(17);
  for (const auto& name : m.names) out << '\t' << name;
  out << '\n';
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    out << m.names[i];
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      out << '\t' << m.values(static_cast<Index>(i), static_cast<Index>(j));
    }
    out << '\n';
  }
  out.precision(prec);
}

PairwiseRpd read_pairwise_tsv(std::istream& in) {
  PairwiseRpd m;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (m.names.empty()) {
      if (fields.size() < 3 || !fields[0].empty()) throw ParseError("bad matrix header", line_no);
      m.names.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (fields.size() != m.names.size() + 1) throw ParseError("row width differs from header", line_no);
    if (fields[0] != m.names[rows.size()]) throw ParseError("row name does not match header", line_no);
    std::vector<double> row;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(fields[k], &used));
        if (used != fields[k].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("non-numeric matrix entry '" + fields[k] + "'", line_no);
      }
    }
    rows.push_back(std::move(row));
  }
  if (m.names.empty() || rows.size() != m.names.size()) throw FormatError("incomplete distance matrix");
  const auto k = static_cast<Index>(rows.size());
  m.values.resize(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) m.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_study_tsv(std::ostream& out, const StudyResult& study) {
  const auto prec = out.precision(17);
  out << "name\trpd\tdelta_perf\tsimilarity_coverage\tanalogy_coverage\terror\n";
  for (const auto& e : study.entries) {
    out << e.name << '\t';
    if (e.rpd) out << *e.rpd;
    out << '\t';
    if (e.delta_perf) out << *e.delta_perf;
    out << '\t' << e.eval.similarity_coverage << '\t' << e.eval.analogy_coverage << '\t'
        << e.error.value_or("") << '\n';
  }
  out << "# rank_correlation=";
  if (study.rank_correlation) {
    out << *study.rank_correlation;
  } else {
    out << "nan";
  }
  out << '\n';
  out.precision(prec);
}

void write_layout_tsv(std::ostream& out, const LayoutMap& layout) {
  const auto prec = out.precision(17);
  out << "name\tx\ty\n";
  for (std::size_t i = 0; i < layout.names.size(); ++i) {
    out << layout.names[i] << '\t' << layout.coords[i][0] << '\t' << layout.coords[i][1] << '\n';
  }
  out << "# stress=" << layout.stress << '\n';
  out.precision(prec);
}

}  // namespace rpd
