#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <variant>

#include "qud/backend.hpp"
#include "qud/eval.hpp"
#include "qud/pipeline.hpp"
#include "qud/rst.hpp"
#include "qud/tree_metrics.hpp"

namespace py = pybind11;

namespace {

using Entry = std::tuple<int, int, std::string>;  // (answer, anchor, question)
using Span = std::tuple<int, int, std::string>;   // (token_start, token_end, type)

qud::QudTree make_tree(int n, const std::vector<Entry>& entries) {
  qud::QudTree tree;
  tree.n = n;
  for (const auto& [answer, anchor, question] : entries) tree.entries.push_back({answer, anchor, question});
  tree.sort_entries();
  return tree;
}

std::vector<int> parents_of(const qud::DepTree& tree) {
  return {tree.parents().begin() + 1, tree.parents().end()};
}

qud::DepTree dep_from(std::vector<int> parents) {
  parents.insert(parents.begin(), 0);
  return qud::DepTree::forest(std::move(parents));
}

std::vector<qud::encoding::EntitySpan> spans_for(int sentence, const std::vector<Span>& spans) {
  std::vector<qud::encoding::EntitySpan> out;
  for (const auto& [start, end, type] : spans) out.push_back({sentence, start, end, type});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "QUD dependency parsing, tree statistics and evaluation";

  py::register_exception<qud::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<qud::PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<qud::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<qud::InvalidTreeError>(m, "InvalidTreeError", PyExc_ValueError);

  m.def("validate_tree",
        [](int n, const std::vector<Entry>& entries) {
          std::vector<std::string> out;
          for (const auto& v : qud::validate_tree(make_tree(n, entries)).violations) out.push_back(v.message);
          return out;
        },
        py::arg("n"), py::arg("entries"),
        "Violations of a QUD tree given as (answer, anchor, question) entries; empty when valid.");

  m.def("to_dep_tree",
        [](int n, const std::vector<Entry>& entries) { return parents_of(qud::to_dep_tree(make_tree(n, entries))); },
        py::arg("n"), py::arg("entries"), "Parent of each sentence 1..n (0 for the root).");

  m.def("tree_stats",
        [](const std::vector<int>& parents) {
          auto s = qud::metrics::stats(dep_from(parents));
          py::dict d;
          d["height"] = s.height;
          d["norm_arc_len"] = s.norm_arc_len;
          d["prop_leaf"] = s.prop_leaf;
          d["avg_depth"] = s.avg_depth;
          d["right_branch"] = s.right_branch;
          d["partial"] = s.partial;
          return d;
        },
        py::arg("parents"), "Tree statistics from parents of sentences 1..n (0 marks a root).");

  m.def("gap_report",
        [](const std::vector<int>& parents) {
          auto g = qud::metrics::gap_report(dep_from(parents));
          return std::make_pair(g.gap_degree_max, g.gap_total);
        },
        py::arg("parents"), "(gap_degree_max, gap_total)");

  m.def("attachment_score",
        [](const std::vector<int>& a, const std::vector<int>& b, bool norm_all) {
          return qud::metrics::attachment_score(
              dep_from(a), dep_from(b),
              norm_all ? qud::metrics::AttachmentNorm::AllSentences : qud::metrics::AttachmentNorm::NonRoot);
        },
        py::arg("a"), py::arg("b"), py::arg("norm_all") = false);

  m.def("encode_anchor_query",
        [](const std::vector<std::string>& sentences, int answer) {
          return qud::encoding::encode_anchor_query(qud::Document("doc", sentences), answer).text;
        },
        py::arg("sentences"), py::arg("answer"));

  m.def("encode_generation_prompt",
        [](const std::vector<std::string>& sentences, int answer, int anchor, const std::vector<Span>& spans,
           std::optional<std::string> question) {
          return qud::encoding::encode_generation_prompt(qud::Document("doc", sentences), answer, anchor,
                                                         spans_for(answer, spans), std::move(question))
              .render();
        },
        py::arg("sentences"), py::arg("answer"), py::arg("anchor"), py::arg("spans") = std::vector<Span>{},
        py::arg("question") = std::nullopt);

  m.def("mask_entities",
        [](const std::string& text, const std::vector<Span>& spans) {
          qud::Document doc("doc", {text});
          return qud::encoding::mask_entities(doc.sentence(1), spans_for(1, spans));
        },
        py::arg("text"), py::arg("spans"));

  m.def("parse_mock",
        [](const std::vector<std::string>& sentences, std::uint64_t seed, int num_samples, bool rerank,
           bool mask) {
          qud::MockBackend backend(seed);
          qud::pipeline::ParseConfig config;
          config.seed = seed;
          config.num_samples = num_samples;
          config.rerank = rerank;
          config.mask_entities = mask;
          py::gil_scoped_release release;
          auto result = qud::pipeline::parse(qud::Document("doc", sentences), backend, config);
          std::vector<Entry> entries;
          for (const auto& e : result.tree.entries) entries.emplace_back(e.answer, e.anchor, e.question);
          return entries;
        },
        py::arg("sentences"), py::arg("seed") = 0, py::arg("num_samples") = 10, py::arg("rerank") = true,
        py::arg("mask") = true, "Parse with the deterministic mock backend; returns (answer, anchor, question).");

  m.def("rst_to_dep",
        [](const std::string& bracketed) { return parents_of(qud::rst::to_dep(qud::rst::parse_bracketed(bracketed))); },
        py::arg("bracketed"));

  m.def("krippendorff_alpha",
        [](const std::vector<std::vector<std::optional<std::variant<std::string, std::set<std::string>>>>>& rows,
           const std::string& distance) {
          qud::eval::RatingMatrix matrix;
          for (const auto& row : rows) {
            std::vector<std::optional<qud::eval::LabelSet>> out;
            for (const auto& cell : row) {
              if (!cell) {
                out.emplace_back();
              } else if (auto* s = std::get_if<std::string>(&*cell)) {
                out.emplace_back(qud::eval::LabelSet{*s});
              } else {
                out.emplace_back(std::get<std::set<std::string>>(*cell));
              }
            }
            matrix.push_back(std::move(out));
          }
          if (distance != "nominal" && distance != "masi") throw qud::ConfigError("distance must be nominal or masi");
          return qud::eval::krippendorff_alpha(
              matrix, distance == "masi" ? qud::eval::Distance::Masi : qud::eval::Distance::Nominal);
        },
        py::arg("matrix"), py::arg("distance") = "nominal",
        "Items x judges; cells are a label, a set of labels, or None.");

  m.def("masi_distance", &qud::eval::masi_distance, py::arg("a"), py::arg("b"));

  m.def("rerank_percentile",
        [](const std::vector<std::pair<int, int>>& ranks) {
          std::vector<qud::eval::RerankEvalInstance> inst;
          for (const auto& [rank, options] : ranks) inst.push_back({rank, options});
          return qud::eval::rerank_percentile(inst);
        },
        py::arg("ranks"), "Mean gold-rank percentile over (gold_rank, num_options) pairs.");

  m.def("synth_negatives",
        [](const std::vector<std::string>& sentences, int anchor, int answer, const std::string& question) {
          qud::Document doc("doc", sentences);
          auto out = qud::eval::synth_negatives({"doc", "w", answer, anchor, question}, doc);
          std::vector<std::pair<int, int>> pairs;
          for (const auto& ex : out) pairs.emplace_back(ex.anchor, ex.answer);
          return pairs;
        },
        py::arg("sentences"), py::arg("anchor"), py::arg("answer"), py::arg("question"),
        "(anchor, answer) pairs of the synthesized negatives.");

#ifdef QUD_VERSION_INFO
  m.attr("__version__") = QUD_VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
