#pragma once

#include "rpd/eval_harness.hpp"
#include "rpd/null_model.hpp"
#include "rpd/rpd_core.hpp"
#include "rpd/space_map.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>

namespace rpd {

/// `top_k` limits the per-word rows written (all when empty).
nlohmann::json to_json(const RpdReport& report, std::optional<std::size_t> top_k = std::nullopt);
nlohmann::json to_json(const NullDistribution& null, bool include_samples = false);
nlohmann::json to_json(const ZTestResult& z);
nlohmann::json to_json(const EvalResult& eval);

/// Tab-separated matrix with a header row and a leading name column.
void write_pairwise_tsv(std::ostream& out, const PairwiseRpd& m);
PairwiseRpd read_pairwise_tsv(std::istream& in);

/// name, rpd, delta_perf, similarity_coverage, analogy_coverage, error;
/// then "# rank_correlation=..." as the last line.
void write_study_tsv(std::ostream& out, const StudyResult& study);

/// name, x, y; then "# stress=..." as the last line.
void write_layout_tsv(std::ostream& out, const LayoutMap& layout);

}  // namespace rpd
