#include "rpd/embedding_store.hpp"
#include "rpd/errors.hpp"
#include "rpd/eval_harness.hpp"
#include "rpd/gram_metrics.hpp"
#include "rpd/null_model.hpp"
#include "rpd/rpd_core.hpp"
#include "rpd/space_map.hpp"
#include "rpd/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;

namespace {

rpd::Tail parse_tail(const std::string& name) {
  if (name == "two-sided") return rpd::Tail::TwoSided;
  if (name == "lower") return rpd::Tail::Lower;
  if (name == "upper") return rpd::Tail::Upper;
  throw rpd::PreconditionError("unknown tail '" + name + "'");
}

std::string tail_name(rpd::Tail tail) {
  return tail == rpd::Tail::TwoSided ? "two-sided" : (tail == rpd::Tail::Lower ? "lower" : "upper");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Relative pairwise inner product distance between embedding spaces";

  auto base = py::register_exception<rpd::Error>(m, "RpdError", PyExc_ValueError);
  py::register_exception<rpd::IoError>(m, "RpdIoError", base.ptr());

  py::class_<rpd::EmbeddingMatrix>(m, "EmbeddingMatrix")
      .def(py::init<std::vector<std::string>, Eigen::MatrixXd, bool>(), py::arg("vocab"), py::arg("matrix"),
           py::arg("standardized") = false)
      .def_property_readonly("vocab", &rpd::EmbeddingMatrix::vocab)
      .def_property_readonly("matrix", &rpd::EmbeddingMatrix::matrix)
      .def_property_readonly("size", &rpd::EmbeddingMatrix::size)
      .def_property_readonly("dim", &rpd::EmbeddingMatrix::dim)
      .def_property_readonly("standardized", &rpd::EmbeddingMatrix::standardized)
      .def("index_of", &rpd::EmbeddingMatrix::index_of)
      .def("__len__", &rpd::EmbeddingMatrix::size)
      .def("__contains__", &rpd::EmbeddingMatrix::contains)
      .def("__repr__", [](const rpd::EmbeddingMatrix& e) {
        return "<EmbeddingMatrix n=" + std::to_string(e.size()) + " d=" + std::to_string(e.dim()) + ">";
      });

  m.def(
      "load_embeddings",
      [](const std::filesystem::path& path, const std::string& format) {
        return rpd::load_embeddings(path, rpd::parse_embedding_format(format));
      },
      py::arg("path"), py::arg("format") = "word2vec");
  m.def(
      "save_embeddings",
      [](const rpd::EmbeddingMatrix& emb, const std::filesystem::path& path, const std::string& format) {
        rpd::save_embeddings(emb, path, rpd::parse_embedding_format(format));
      },
      py::arg("embedding"), py::arg("path"), py::arg("format") = "word2vec");
  m.def("standardize", &rpd::standardize, py::arg("embedding"));
  m.def("entry_scale", &rpd::entry_scale, py::arg("matrix"));
  m.def("random_gaussian_embedding", &rpd::random_gaussian_embedding, py::arg("n"), py::arg("d"), py::arg("seed"));

  py::class_<rpd::AlignedPair>(m, "AlignedPair")
      .def_property_readonly("left", &rpd::AlignedPair::left)
      .def_property_readonly("right", &rpd::AlignedPair::right)
      .def_property_readonly("shared_vocab", &rpd::AlignedPair::shared_vocab)
      .def_property_readonly("left_coverage", &rpd::AlignedPair::left_coverage)
      .def_property_readonly("right_coverage", &rpd::AlignedPair::right_coverage)
      .def("__len__", &rpd::AlignedPair::size);
  m.def("align_vocabularies", &rpd::align_vocabularies, py::arg("left"), py::arg("right"));

  m.def(
      "gram_frobenius_norm", [](const Eigen::MatrixXd& e) { return rpd::gram_frobenius_norm(e); },
      py::arg("matrix"));
  m.def(
      "cross_gram_inner",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return rpd::cross_gram_inner(a, b); },
      py::arg("left"), py::arg("right"));

  py::class_<rpd::PerWordEntry>(m, "PerWordEntry")
      .def_readonly("word", &rpd::PerWordEntry::word)
      .def_readonly("cos_theta", &rpd::PerWordEntry::cos_theta)
      .def_readonly("weight", &rpd::PerWordEntry::weight);

  py::class_<rpd::RpdReport>(m, "RpdReport")
      .def_readonly("rpd", &rpd::RpdReport::rpd)
      .def_readonly("ratio_term", &rpd::RpdReport::ratio_term)
      .def_readonly("cosine_term", &rpd::RpdReport::cosine_term)
      .def_readonly("n", &rpd::RpdReport::n)
      .def_readonly("d_left", &rpd::RpdReport::d_left)
      .def_readonly("d_right", &rpd::RpdReport::d_right)
      .def_readonly("left_gram_norm", &rpd::RpdReport::left_gram_norm)
      .def_readonly("right_gram_norm", &rpd::RpdReport::right_gram_norm)
      .def_readonly("per_word", &rpd::RpdReport::per_word)
      .def("__float__", [](const rpd::RpdReport& r) { return r.rpd; })
      .def("__repr__", [](const rpd::RpdReport& r) { return "<RpdReport rpd=" + std::to_string(r.rpd) + ">"; });

  m.def(
      "rpd",
      [](const Eigen::MatrixXd& left, const Eigen::MatrixXd& right, bool standardize) {
        py::gil_scoped_release release;
        return rpd::rpd(left, right, standardize);
      },
      py::arg("left"), py::arg("right"), py::arg("standardize") = true,
      "RPD of two row-aligned matrices.");
  m.def(
      "rpd_embeddings",
      [](const rpd::EmbeddingMatrix& left, const rpd::EmbeddingMatrix& right, bool standardize, bool decompose) {
        py::gil_scoped_release release;
        const auto pair = rpd::align_vocabularies(left, right);
        return decompose ? rpd::decompose_per_word(pair, standardize) : rpd::rpd(pair, standardize);
      },
      py::arg("left"), py::arg("right"), py::arg("standardize") = true, py::arg("decompose") = false,
      "RPD over the shared vocabulary of two embeddings.");
  m.def(
      "pairwise_matrix",
      [](const std::vector<std::pair<std::string, rpd::EmbeddingMatrix>>& embs, bool common_vocab,
         bool standardize) {
        std::vector<rpd::NamedEmbedding> named;
        for (const auto& [name, emb] : embs) named.push_back({name, emb});
        py::gil_scoped_release release;
        const auto result = rpd::rpd_pairwise_matrix(named, common_vocab, standardize);
        return std::make_pair(result.names, result.values);
      },
      py::arg("embeddings"), py::arg("common_vocab") = false, py::arg("standardize") = true,
      "Takes (name, EmbeddingMatrix) pairs; returns (names, matrix).");

  py::class_<rpd::NullDistribution>(m, "NullDistribution")
      .def_readonly("n", &rpd::NullDistribution::n)
      .def_readonly("d_left", &rpd::NullDistribution::d_left)
      .def_readonly("d_right", &rpd::NullDistribution::d_right)
      .def_readonly("replicates", &rpd::NullDistribution::replicates)
      .def_readonly("mu", &rpd::NullDistribution::mu)
      .def_readonly("sigma", &rpd::NullDistribution::sigma)
      .def_readonly("skewness", &rpd::NullDistribution::skewness)
      .def_readonly("excess_kurtosis", &rpd::NullDistribution::excess_kurtosis)
      .def_readonly("seed", &rpd::NullDistribution::seed)
      .def_readonly("low_replicates", &rpd::NullDistribution::low_replicates)
      .def_readonly("samples", &rpd::NullDistribution::samples);
  m.def(
      "monte_carlo_null",
      [](rpd::Index n, rpd::Index d_left, rpd::Index d_right, rpd::Index replicates, std::uint64_t seed) {
        py::gil_scoped_release release;
        return rpd::monte_carlo_null(n, d_left, d_right, replicates, seed);
      },
      py::arg("n"), py::arg("d_left"), py::arg("d_right"), py::arg("replicates") = rpd::kDefaultReplicates,
      py::arg("seed") = 0);
  m.def("analytic_null_mean", &rpd::analytic_null_mean, py::arg("n"), py::arg("d"));
  m.def(
      "z_test",
      [](double observed, double mu, double sigma, const std::string& tail) {
        const auto z = rpd::z_test(observed, mu, sigma, parse_tail(tail));
        py::dict out;
        out["z"] = z.z;
        out["p_value"] = z.p_value;
        out["tail"] = tail_name(z.tail);
        out["reject_at_0_01"] = z.reject_at_0_01;
        return out;
      },
      py::arg("observed"), py::arg("mu"), py::arg("sigma"), py::arg("tail") = "two-sided");

  py::class_<rpd::TruncatedSvd>(m, "TruncatedSvd")
      .def_readonly("U", &rpd::TruncatedSvd::U)
      .def_readonly("S", &rpd::TruncatedSvd::S)
      .def_readonly("V", &rpd::TruncatedSvd::V)
      .def_readonly("iterations", &rpd::TruncatedSvd::iterations)
      .def_readonly("converged", &rpd::TruncatedSvd::converged)
      .def_readonly("negative_components", &rpd::TruncatedSvd::negative_components);
  m.def(
      "train_svd",
      [](const std::string& text, const std::string& signal, rpd::Index dim, int window, int min_count,
         const std::string& weighting, std::uint64_t seed, bool lowercase) {
        rpd::TrainOptions opts;
        opts.signal = rpd::parse_signal_kind(signal);
        opts.dim = dim;
        opts.window = window;
        opts.min_count = min_count;
        opts.weighting = rpd::parse_window_weighting(weighting);
        opts.seed = seed;
        py::gil_scoped_release release;
        auto trained = rpd::train_svd_embedding(rpd::tokenize_corpus(text, lowercase), opts);
        return std::make_pair(std::move(trained.embedding), std::move(trained.svd));
      },
      py::arg("text"), py::arg("signal") = "pmi", py::arg("dim") = 300, py::arg("window") = 10,
      py::arg("min_count") = 10, py::arg("weighting") = "flat", py::arg("seed") = 0, py::arg("lowercase") = true,
      "Trains on corpus text (one document per line); returns (embedding, svd).");

  m.def(
      "spearman",
      [](const std::vector<double>& x, const std::vector<double>& y) { return rpd::spearman(x, y); },
      py::arg("x"), py::arg("y"));
  m.def(
      "evaluate",
      [](const rpd::EmbeddingMatrix& emb, const std::vector<std::tuple<std::string, std::string, double>>& similarity,
         const std::vector<std::tuple<std::string, std::string, std::string, std::string>>& analogy) {
        rpd::SimilarityDataset sim;
        for (const auto& [a, b, s] : similarity) sim.pairs.push_back({a, b, s});
        rpd::AnalogyDataset ana;
        for (const auto& [a, b, c, d] : analogy) ana.questions.push_back({a, b, c, d, ""});
        const auto r = rpd::evaluate(emb, sim.pairs.empty() ? nullptr : &sim, ana.questions.empty() ? nullptr : &ana);
        py::dict out;
        out["similarity_spearman"] = r.similarity_spearman;
        out["similarity_coverage"] = r.similarity_coverage;
        out["analogy_accuracy"] = r.analogy_accuracy;
        out["analogy_coverage"] = r.analogy_coverage;
        return out;
      },
      py::arg("embedding"), py::arg("similarity") = std::vector<std::tuple<std::string, std::string, double>>{},
      py::arg("analogy") = std::vector<std::tuple<std::string, std::string, std::string, std::string>>{},
      "similarity: (w1, w2, score) tuples; analogy: (a, b, c, expected) tuples.");

  m.def(
      "layout_from_distances",
      [](const Eigen::MatrixXd& dist, const std::vector<std::string>& names, const std::string& anchor_a,
         const std::string& anchor_b) {
        const auto layout = rpd::layout_from_distances(dist, names, anchor_a, anchor_b);
        Eigen::MatrixXd coords(static_cast<Eigen::Index>(layout.coords.size()), 2);
        for (std::size_t i = 0; i < layout.coords.size(); ++i) {
          coords(static_cast<Eigen::Index>(i), 0) = layout.coords[i][0];
          coords(static_cast<Eigen::Index>(i), 1) = layout.coords[i][1];
        }
        return std::make_tuple(coords, layout.stress, layout.inconsistent_distances);
      },
      py::arg("dist"), py::arg("names"), py::arg("anchor_a"), py::arg("anchor_b"),
      "Returns (coords n x 2, stress, inconsistent_distances).");
}
