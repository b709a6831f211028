#include "rpd/embedding_store.hpp"
#include "rpd/errors.hpp"
#include "rpd/eval_harness.hpp"
#include "rpd/null_model.hpp"
#include "rpd/report_io.hpp"
#include "rpd/rpd_core.hpp"
#include "rpd/space_map.hpp"
#include "rpd/spectral.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace {

constexpr int kInputError = 2;
constexpr int kInternalError = 1;

void write_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw rpd::IoError("cannot open output file " + path);
  body(out);
  if (!out) throw rpd::IoError("failed writing " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_output(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

std::vector<rpd::NamedEmbedding> load_named(const std::vector<std::string>& specs, const std::string& format_name) {
  const auto format = rpd::parse_embedding_format(format_name);
  std::vector<rpd::NamedEmbedding> out;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw rpd::PreconditionError("--emb expects NAME=PATH, got '" + spec + "'");
    }
    out.push_back({spec.substr(0, eq), rpd::load_embeddings(spec.substr(eq + 1), format)});
  }
  return out;
}

void add_format_option(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "Embedding file format")
      ->check(CLI::IsMember({"word2vec", "glove"}))
      ->capture_default_str();
}

struct PairOptions {
  std::string left, right, output;
  std::string format = "word2vec";
  bool no_standardize = false;
  bool decompose = false;
  std::optional<std::size_t> top_k;
};

void setup_rpd(CLI::App& app, std::function<void()>& action) {
  auto opt = std::make_shared<PairOptions>();
  auto* cmd = app.add_subcommand("rpd", "RPD between two embedding files (JSON report)");
  cmd->add_option("--left", opt->left, "First embedding file")->required();
  cmd->add_option("--right", opt->right, "Second embedding file")->required();
  add_format_option(cmd, opt->format);
  cmd->add_flag("--no-standardize", opt->no_standardize, "Use the matrices as given");
  cmd->add_flag("--decompose", opt->decompose, "Emit per-word cosines and weights");
  cmd->add_option("--top-k", opt->top_k, "Limit per-word rows (lowest cosine first)")->check(CLI::PositiveNumber);
  cmd->add_option("--output,-o", opt->output, "Write JSON here instead of stdout");
  cmd->callback([opt, &action] {
    action = [opt] {
      const auto left = rpd::load_embeddings(opt->left, rpd::parse_embedding_format(opt->format));
      const auto right = rpd::load_embeddings(opt->right, rpd::parse_embedding_format(opt->format));
      const auto pair = rpd::align_vocabularies(left, right);
      const bool standardize = !opt->no_standardize;
      const auto report = opt->decompose ? rpd::decompose_per_word(pair, standardize) : rpd::rpd(pair, standardize);
      auto j = rpd::to_json(report, opt->top_k);
      j["left_coverage"] = pair.left_coverage();
      j["right_coverage"] = pair.right_coverage();
      write_json(opt->output, j);
    };
  });
}

struct MatrixOptions {
  std::vector<std::string> embs;
  std::string format = "word2vec";
  bool common_vocab = false;
  bool no_standardize = false;
  std::string output;
};

void setup_matrix(CLI::App& app, std::function<void()>& action) {
  auto opt = std::make_shared<MatrixOptions>();
  auto* cmd = app.add_subcommand("matrix", "Pairwise RPD matrix over several embeddings (TSV)");
  cmd->add_option("--emb", opt->embs, "NAME=PATH, repeat for each embedding")->required()->expected(1, -1);
  add_format_option(cmd, opt->format);
  cmd->add_flag("--common-vocab", opt->common_vocab, "Restrict every pair to the words shared by all inputs");
  cmd->add_flag("--no-standardize", opt->no_standardize, "Use the matrices as given");
  cmd->add_option("--output,-o", opt->output, "Write TSV here instead of stdout");
  cmd->callback([opt, &action] {
    action = [opt] {
      const auto embs = load_named(opt->embs, opt->format);
      const auto m = rpd::rpd_pairwise_matrix(embs, opt->common_vocab, !opt->no_standardize);
      write_output(opt->output, [&](std::ostream& out) {
        rpd::write_pairwise_tsv(out, m);
        if (opt->common_vocab) out << "# common_vocab_size=" << m.common_vocab_size << '\n';
      });
    };
  });
}

struct NullOptions {
  std::string left, right, output, samples_out;
  std::string format = "word2vec";
  rpd::Index replicates = rpd::kDefaultReplicates;
  std::uint64_t seed = 0;
  std::string tail = "two-sided";
};

void setup_nulltest(CLI::App& app, std::function<void()>& action) {
  auto opt = std::make_shared<NullOptions>();
  auto* cmd = app.add_subcommand("nulltest", "Test two embeddings for dependence against a Gaussian null (JSON)");
  cmd->add_option("--left", opt->left, "First embedding file")->required();
  cmd->add_option("--right", opt->right, "Second embedding file")->required();
  add_format_option(cmd, opt->format);
  cmd->add_option("--replicates", opt->replicates, "Monte Carlo replicates (at least 2)")->capture_default_str();
  cmd->add_option("--seed", opt->seed, "Seed for the null simulation")->capture_default_str();
  cmd->add_option("--tail", opt->tail, "Alternative hypothesis")
      ->check(CLI::IsMember({"two-sided", "lower", "upper"}))
      ->capture_default_str();
  cmd->add_option("--samples-out", opt->samples_out, "Write the null RPD samples, one per line");
  cmd->add_option("--output,-o", opt->output, "Write JSON here instead of stdout");
  cmd->callback([opt, &action] {
    action = [opt] {
      const auto left = rpd::load_embeddings(opt->left, rpd::parse_embedding_format(opt->format));
      const auto right = rpd::load_embeddings(opt->right, rpd::parse_embedding_format(opt->format));
      const auto pair = rpd::align_vocabularies(left, right);
      const double observed = rpd::rpd(pair).rpd;
      const auto null = rpd::monte_carlo_null(pair.size(), pair.left().dim(), pair.right().dim(),
                                              opt->replicates, opt->seed);
      if (null.low_replicates) {
        std::cerr << "warning: " << null.replicates << " replicates is below the recommended "
                  << rpd::kRecommendedReplicates << '\n';
      }
      const auto tail = opt->tail == "lower" ? rpd::Tail::Lower
                        : opt->tail == "upper" ? rpd::Tail::Upper
                                               : rpd::Tail::TwoSided;
      const auto z = rpd::z_test(observed, null, tail);
      if (!opt->samples_out.empty()) rpd::save_samples(null, opt->samples_out);
      nlohmann::json j = {{"observed_rpd", observed},
                          {"null", rpd::to_json(null)},
                          {"analytic_null_mean", rpd::analytic_null_mean(pair.size(), pair.left().dim())},
                          {"test", rpd::to_json(z)},
                          {"decision", z.reject_at_0_01 ? "reject independence" : "fail to reject"}};
      if (null.samples && null.samples->size() >= 100) {
        const auto diag = rpd::normality_diagnostics(null);
        j["null"]["normal_plausible"] = diag.normal_plausible;
      }
      write_json(opt->output, j);
    };
  });
}

struct TrainCliOptions {
  std::string corpus, output, counts_out, singular_values_out;
  rpd::TrainOptions train;
  std::string signal = "pmi";
  std::string weighting = "flat";
  bool keep_case = false;
};

void setup_train(CLI::App& app, std::function<void()>& action) {
  auto opt = std::make_shared<TrainCliOptions>();
  auto* cmd = app.add_subcommand("train-svd", "Train an SVD embedding from a text corpus (word2vec text)");
  cmd->add_option("--corpus", opt->corpus, "Plain text, one document per line")->required();
  cmd->add_option("--signal", opt->signal, "Signal matrix")
      ->check(CLI::IsMember({"pmi", "logcount"}))
      ->capture_default_str();
  cmd->add_option("--dim", opt->train.dim, "Embedding dimension")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--window", opt->train.window, "Context window radius")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--min-count", opt->train.min_count, "Minimum word frequency")->capture_default_str();
  cmd->add_option("--weighting", opt->weighting, "Context window weighting")
      ->check(CLI::IsMember({"flat", "harmonic"}))
      ->capture_default_str();
  cmd->add_option("--seed", opt->train.seed, "Seed for the randomized SVD")->capture_default_str();
  cmd->add_option("--oversample", opt->train.svd.oversample, "Extra range-finder columns")->capture_default_str();
  cmd->add_option("--power-iters", opt->train.svd.power_iters, "Minimum subspace iterations")->capture_default_str();
  cmd->add_option("--tolerance", opt->train.svd.tolerance, "Stop once residuals fall below this fraction of the top singular value")
      ->capture_default_str();
  cmd->add_option("--max-iters", opt->train.svd.max_iters, "Iteration cap; set equal to --power-iters for a fixed count")
      ->capture_default_str();
  cmd->add_flag("--keep-case", opt->keep_case, "Do not lowercase the corpus");
  cmd->add_option("--output,-o", opt->output, "Embedding file to write")->required();
  cmd->add_option("--counts-out", opt->counts_out, "Also write counts to PREFIX.counts and PREFIX.vocab");
  cmd->add_option("--singular-values-out", opt->singular_values_out, "Write singular values, one per line");
  cmd->callback([opt, &action] {
    action = [opt] {
      opt->train.signal = rpd::parse_signal_kind(opt->signal);
      opt->train.weighting = rpd::parse_window_weighting(opt->weighting);
      const auto docs = rpd::read_corpus(opt->corpus, !opt->keep_case);
      const auto counts =
          rpd::count_cooccurrences(docs, opt->train.window, opt->train.min_count, opt->train.weighting);
      if (!opt->counts_out.empty()) {
        rpd::save_counts(counts, opt->counts_out + ".counts", opt->counts_out + ".vocab");
      }
      const auto trained = rpd::train_svd_embedding(counts, opt->train);
      rpd::save_embeddings(trained.embedding, opt->output, rpd::EmbeddingFormat::Word2VecText);
      if (!opt->singular_values_out.empty()) {
        write_output(opt->singular_values_out, [&](std::ostream& out) {
          out.precision(17);
          for (double s : trained.svd.S) out << s << '\n';
        });
      }
      std::cerr << "vocab " << counts.vocab.size() << ", dim " << opt->train.dim << ", svd iterations "
                << trained.svd.iterations << (trained.svd.converged ? "" : " (not converged)") << '\n';
    };
  });
}

struct EvalOptions {
  std::string emb, similarity, analogy, output;
  std::string format = "word2vec";
};

void setup_eval(CLI::App& app, std::function<void()>& action) {
  auto opt = std::make_shared<EvalOptions>();
  auto* cmd = app.add_subcommand("eval", "Word similarity and analogy scores (JSON)");
  cmd->add_option("--emb", opt->emb, "Embedding file")->required();
  add_format_option(cmd, opt->format);
  cmd->add_option("--similarity", opt->similarity, "word1<TAB>word2<TAB>score file");
  cmd->add_option("--analogy", opt->analogy, "Google analogy format file");
  cmd->callback([opt, &action] {
    action = [opt] {
      if (opt->similarity.empty() && opt->analogy.empty()) {
        throw rpd::PreconditionError("give --similarity, --analogy or both");
      }
      const auto emb = rpd::load_embeddings(opt->emb, rpd::parse_embedding_format(opt->format));
      std::optional<rpd::SimilarityDataset> sim;
      std::optional<rpd::AnalogyDataset> ana;
      if (!opt->similarity.empty()) sim = rpd::load_similarity_dataset(opt->similarity);
      if (!opt->analogy.empty()) ana = rpd::load_analogy_dataset(opt->analogy);
      const auto result = rpd::evaluate(emb, sim ? &*sim : nullptr, ana ? &*ana : nullptr);
      write_json(opt->output, rpd::to_json(result));
    };
  });
  cmd->add_option("--output,-o", opt->output, "Write JSON here instead of stdout");
}

struct StudyOptions {
  std::string baseline, similarity, analogy, output;
  std::vector<std::string> embs;
  std::string format = "word2vec";
};

void setup_study(CLI::App& app, std::function<void()>& action) {
  auto opt = std::make_shared<StudyOptions>();
  auto* cmd = app.add_subcommand("study", "RPD against performance change relative to a baseline (TSV)");
  cmd->add_option("--baseline", opt->baseline, "Baseline embedding file")->required();
  cmd->add_option("--emb", opt->embs, "NAME=PATH, repeat for each compared embedding")->required()->expected(1, -1);
  add_format_option(cmd, opt->format);
  cmd->add_option("--similarity", opt->similarity, "word1<TAB>word2<TAB>score file");
  cmd->add_option("--analogy", opt->analogy, "Google analogy format file");
  cmd->add_option("--output,-o", opt->output, "Write TSV here instead of stdout");
  cmd->callback([opt, &action] {
    action = [opt] {
      if (opt->similarity.empty() && opt->analogy.empty()) {
        throw rpd::PreconditionError("give --similarity, --analogy or both");
      }
      const auto baseline = rpd::load_embeddings(opt->baseline, rpd::parse_embedding_format(opt->format));
      const auto others = load_named(opt->embs, opt->format);
      std::optional<rpd::SimilarityDataset> sim;
      std::optional<rpd::AnalogyDataset> ana;
      if (!opt->similarity.empty()) sim = rpd::load_similarity_dataset(opt->similarity);
      if (!opt->analogy.empty()) ana = rpd::load_analogy_dataset(opt->analogy);
      const auto study = rpd::perf_vs_rpd_study(baseline, others, sim ? &*sim : nullptr, ana ? &*ana : nullptr);
      write_output(opt->output, [&](std::ostream& out) { rpd::write_study_tsv(out, study); });
    };
  });
}

struct MapOptions {
  std::string matrix, anchors, output;
  std::vector<std::string> embs;
  std::string format = "word2vec";
};

void setup_map(CLI::App& app, std::function<void()>& action) {
  auto opt = std::make_shared<MapOptions>();
  auto* cmd = app.add_subcommand("map", "2D layout of embedding spaces from their RPDs (TSV)");
  auto* matrix = cmd->add_option("--matrix", opt->matrix, "Pairwise RPD TSV as written by 'matrix'");
  auto* embs = cmd->add_option("--emb", opt->embs, "NAME=PATH, repeat; RPDs are computed first")->expected(1, -1);
  matrix->excludes(embs);
  add_format_option(cmd, opt->format);
  cmd->add_option("--anchors", opt->anchors, "Two names: A,B")->required();
  cmd->add_option("--output,-o", opt->output, "Write TSV here instead of stdout");
  cmd->callback([opt, &action] {
    action = [opt] {
      const auto comma = opt->anchors.find(',');
      if (comma == std::string::npos) throw rpd::PreconditionError("--anchors expects A,B");
      rpd::PairwiseRpd m;
      if (!opt->matrix.empty()) {
        std::ifstream in(opt->matrix);
        if (!in) throw rpd::IoError("cannot open matrix file " + opt->matrix);
        m = rpd::read_pairwise_tsv(in);
      } else if (!opt->embs.empty()) {
        m = rpd::rpd_pairwise_matrix(load_named(opt->embs, opt->format));
      } else {
        throw rpd::PreconditionError("give --matrix or --emb");
      }
      const auto layout =
          rpd::layout_from_distances(m.values, m.names, opt->anchors.substr(0, comma), opt->anchors.substr(comma + 1));
      if (layout.inconsistent_distances) {
        std::cerr << "warning: distances violate the triangle inequality; used closest-point placement\n";
      }
      write_output(opt->output, [&](std::ostream& out) { rpd::write_layout_tsv(out, layout); });
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative pairwise inner product distance toolkit"};
  app.require_subcommand(1);
  std::function<void()> action;
  setup_rpd(app, action);
  setup_matrix(app, action);
  setup_nulltest(app, action);
  setup_train(app, action);
  setup_eval(app, action);
  setup_study(app, action);
  setup_map(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (action) action();
    return 0;
  } catch (const rpd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}
