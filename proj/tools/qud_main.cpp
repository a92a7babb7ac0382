// qud: command-line front end for QUD parsing, tree statistics, RST
// conversion and human-evaluation aggregation.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qud/backend.hpp"
#include "qud/dcqa.hpp"
#include "qud/encoding.hpp"
#include "qud/eval.hpp"
#include "qud/formats.hpp"
#include "qud/manifest.hpp"
#include "qud/pipeline.hpp"
#include "qud/rst.hpp"
#include "qud/tree_metrics.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kInput = 3,
  kBackend = 4,
  kConfig = 5,
};

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  bool pretty = false;
};

/// Writes `content` to --out (plus its manifest) or to stdout.
void emit(const Common& common, qud::RunManifest manifest, const std::string& content) {
  if (common.out.empty()) {
    std::cout << content;
    return;
  }
  qud::formats::write_text(common.out, content);
  manifest.outputs.push_back(common.out);
  manifest.seed = common.seed;
  manifest.finished_at = qud::utc_now();
  qud::formats::write_text(qud::manifest_path_for(common.out), manifest.to_json());
}

qud::RunManifest start_manifest(const std::string& command, std::vector<std::string> inputs) {
  qud::RunManifest m;
  m.command = command;
  m.inputs = std::move(inputs);
  m.started_at = qud::utc_now();
  return m;
}

std::string fmt(double v, int decimals) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << v;
  return os.str();
}

std::vector<qud::metrics::NamedTree> named_trees(const std::string& path) {
  std::vector<qud::metrics::NamedTree> out;
  for (auto& rec : qud::formats::load_trees(path)) out.push_back({rec.article_id, rec.dep});
  return out;
}

void add_common(CLI::App* cmd, Common& common, bool pretty = true) {
  cmd->add_option("--seed", common.seed, "Seed recorded in the manifest (and used where sampling applies)")
      ->capture_default_str();
  cmd->add_option("--out", common.out, "Output file (default: stdout); a <out>.manifest.json is written beside it");
  if (pretty) cmd->add_flag("--pretty", common.pretty, "Aligned plain-text output instead of the machine-readable table");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qud - QUD dependency parsing and analysis toolkit"};
  app.set_version_flag("--version", qud::kToolVersion);
  app.require_subcommand(1);

  // parse ------------------------------------------------------------------
  Common parse_common;
  std::string articles_path;
  std::string backend_url;
  bool use_mock = false;
  qud::pipeline::ParseConfig config;
  std::string variant;
  std::string fail_policy = "fast";
  std::string trace_path;
  std::string only_article;
  double timeout_s = 60.0;
  auto* parse = app.add_subcommand("parse", "Parse articles into QUD trees (one JSON line per article)");
  parse->add_option("articles", articles_path, "Articles file (JSON lines)")->required();
  parse->add_option("--backend-url", backend_url, "Model backend base URL")->envname("QUD_BACKEND_URL");
  parse->add_flag("--mock", use_mock, "Use the built-in deterministic mock backend");
  parse->add_option("--num-samples", config.num_samples, "Questions sampled per sentence")->capture_default_str();
  parse->add_option("--top-p", config.top_p, "Nucleus sampling threshold")->capture_default_str();
  parse->add_flag("--no-rerank", "Keep the first sample instead of reranking");
  parse->add_flag("--no-mask", "Do not mask named entities in the answer sentence");
  parse->add_option("--variant", variant, "System variant: Full, -Reranking, -NER (overrides --no-rerank/--no-mask)");
  parse->add_option("--fail-policy", fail_policy, "On backend failure: fast (abort) or skip (leave entry out)")
      ->check(CLI::IsMember({"fast", "skip"}))
      ->capture_default_str();
  parse->add_option("--parallelism", config.parallelism, "Sentences processed concurrently")->capture_default_str();
  parse->add_option("--timeout", timeout_s, "Per-request backend timeout in seconds")->capture_default_str();
  parse->add_option("--trace", trace_path, "Write per-sentence candidates and scores to this file");
  parse->add_option("--article", only_article, "Only parse this article id");
  add_common(parse, parse_common, false);

  // stats ------------------------------------------------------------------
  Common stats_common;
  std::string stats_trees;
  bool per_tree = false;
  auto* stats = app.add_subcommand("stats", "Tree statistics (height, arc length, leaves, depth, right branch, gaps)");
  stats->add_option("trees", stats_trees, "Trees file (JSON lines)")->required();
  stats->add_flag("--per-tree", per_tree, "One row per tree instead of the corpus mean");
  add_common(stats, stats_common);

  // compare ----------------------------------------------------------------
  Common compare_common;
  std::string compare_a;
  std::string compare_b;
  bool norm_all = false;
  auto* compare = app.add_subcommand("compare", "Statistics of two aligned tree sets plus attachment score");
  compare->add_option("first", compare_a, "First trees file")->required();
  compare->add_option("second", compare_b, "Second trees file, same articles in the same order")->required();
  compare->add_flag("--norm-all", norm_all, "Divide attachment matches by n instead of n-1");
  add_common(compare, compare_common);

  // rst2dep ----------------------------------------------------------------
  Common rst_common;
  std::string rst_path;
  std::string rst_format = "bracket";
  auto* rst2dep = app.add_subcommand("rst2dep", "Convert sentence-level RST trees to dependency trees");
  rst2dep->add_option("trees", rst_path, "One tree per line, optionally prefixed by '<article_id><TAB>'")->required();
  rst2dep->add_option("--format", rst_format, "Input tree format")->capture_default_str();
  add_common(rst2dep, rst_common, false);

  // eval -------------------------------------------------------------------
  Common eval_common;
  std::string judgments_path;
  auto* eval = app.add_subcommand("eval", "Aggregate human judgments (Q1/Q2 tables and agreement)");
  eval->add_option("judgments", judgments_path, "Judgments file (JSON lines)")->required();
  add_common(eval, eval_common);

  // encode -----------------------------------------------------------------
  Common encode_common;
  std::string encode_articles;
  std::string encode_article_id;
  int encode_answer = 0;
  int encode_anchor = 0;
  std::string encode_kind = "anchor";
  std::string spans_path;
  std::optional<std::string> encode_question;
  auto* encode = app.add_subcommand("encode", "Render model inputs for one answer sentence");
  encode->add_option("articles", encode_articles, "Articles file (JSON lines)")->required();
  encode->add_option("--article-id", encode_article_id, "Article to encode (default: the first)");
  encode->add_option("--kind", encode_kind, "anchor or generation")
      ->check(CLI::IsMember({"anchor", "generation"}))
      ->capture_default_str();
  encode->add_option("--answer", encode_answer, "Answer sentence index")->required();
  encode->add_option("--anchor", encode_anchor, "Anchor sentence index (generation only)");
  encode->add_option("--spans", spans_path, "Entity spans for the answer sentence (JSON lines)");
  encode->add_option("--question", encode_question, "Question part (training-style rendering)");
  add_common(encode, encode_common, false);

  // synth-neg --------------------------------------------------------------
  Common synth_common;
  std::string synth_articles;
  std::string synth_questions;
  bool with_positives = false;
  auto* synth = app.add_subcommand("synth-neg", "Reranker training instances with swapped anchors/answers");
  synth->add_option("articles", synth_articles, "Articles file")->required();
  synth->add_option("questions", synth_questions, "Questions file")->required();
  synth->add_flag("--with-positives", with_positives, "Also emit each annotated question as a positive");
  add_common(synth, synth_common, false);

  // mock-serve -------------------------------------------------------------
  std::uint64_t serve_seed = 0;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto* serve = app.add_subcommand("mock-serve", "Serve the deterministic mock backend over HTTP");
  serve->add_option("--seed", serve_seed, "Mock rerank seed")->capture_default_str();
  serve->add_option("--host", serve_host, "Bind address")->capture_default_str();
  serve->add_option("--port", serve_port, "Port (0 picks a free one; the bound port is printed)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*parse) {
      if (backend_url.empty() && !use_mock) {
        std::cerr << "error: parse needs --backend-url (or QUD_BACKEND_URL) or --mock\n";
        return kUsage;
      }
      config.seed = parse_common.seed;
      config.rerank = parse->count("--no-rerank") == 0;
      config.mask_entities = parse->count("--no-mask") == 0;
      if (config.rerank && config.mask_entities) {
        config.variant = "Full";
      } else if (!config.rerank) {
        config.variant = config.mask_entities ? "-Reranking" : "-NER";
      } else {
        config.variant = "custom";  // reranking without masking has no named variant
      }
      if (!variant.empty()) config = qud::pipeline::variant_config(variant, config);
      config.fail_policy =
          fail_policy == "skip" ? qud::pipeline::FailPolicy::Skip : qud::pipeline::FailPolicy::Fast;
      config.validate();

      std::unique_ptr<qud::Backend> backend;
      if (use_mock) {
        backend = std::make_unique<qud::MockBackend>(config.seed);
      } else {
        qud::HttpBackendOptions opts;
        opts.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
        backend = std::make_unique<qud::HttpBackend>(backend_url, opts);
      }

      auto docs = qud::dcqa::load_articles(articles_path);
      std::string trees;
      std::string traces;
      for (const auto& doc : docs) {
        if (!only_article.empty() && doc.article_id() != only_article) continue;
        auto result = qud::pipeline::parse(doc, *backend, config);
        trees += qud::formats::qud_tree_line(result.tree, config.variant);
        traces += qud::pipeline::trace_to_json(result.trace) + "\n";
        if (result.trace.partial) {
          std::cerr << "warning: " << doc.article_id() << ": partial tree\n";
        }
      }
      auto manifest = start_manifest("parse", {articles_path});
      manifest.config = {{"backend", use_mock ? "mock" : backend_url},
                         {"num_samples", std::to_string(config.num_samples)},
                         {"top_p", fmt(config.top_p, 6)},
                         {"rerank", config.rerank ? "on" : "off"},
                         {"mask_entities", config.mask_entities ? "on" : "off"},
                         {"variant", config.variant},
                         {"fail_policy", fail_policy},
                         {"parallelism", std::to_string(config.parallelism)}};
      if (!trace_path.empty()) {
        qud::formats::write_text(trace_path, traces);
        manifest.outputs.push_back(trace_path);
      }
      emit(parse_common, manifest, trees);
      return kOk;
    }

    if (*stats) {
      auto trees = named_trees(stats_trees);
      std::string out;
      if (per_tree) {
        out = "# per-tree statistics; height counts edges, arc length |i-parent(i)|\n"
              "article_id\theight\tnorm_arc_len\tprop_leaf\tavg_depth\tright_branch\tgap_degree_max\tgap_total\tpartial\n";
        for (const auto& t : trees) {
          auto s = qud::metrics::stats(t.tree);
          auto g = qud::metrics::gap_report(t.tree);
          out += t.article_id + "\t" + fmt(s.height, 2) + "\t" + fmt(s.norm_arc_len, 2) + "\t" +
                 fmt(s.prop_leaf, 2) + "\t" + fmt(s.avg_depth, 2) + "\t" + fmt(s.right_branch, 2) +
                 "\t" + std::to_string(g.gap_degree_max) + "\t" + std::to_string(g.gap_total) +
                 "\t" + (s.partial ? "yes" : "no") + "\n";
        }
      } else {
        auto report = qud::metrics::corpus_report(trees, nullptr, fs::path(stats_trees).filename().string());
        out = stats_common.pretty ? qud::metrics::format_pretty(report) : qud::metrics::format_table(report);
      }
      emit(stats_common, start_manifest("stats", {stats_trees}), out);
      return kOk;
    }

    if (*compare) {
      auto a = named_trees(compare_a);
      auto b = named_trees(compare_b);
      auto norm = norm_all ? qud::metrics::AttachmentNorm::AllSentences
                             : qud::metrics::AttachmentNorm::NonRoot;
      auto report = qud::metrics::corpus_report(a, &b, fs::path(compare_a).filename().string(),
                                                fs::path(compare_b).filename().string(), norm);
      auto out = compare_common.pretty ? qud::metrics::format_pretty(report)
                                       : qud::metrics::format_table(report);
      auto manifest = start_manifest("compare", {compare_a, compare_b});
      manifest.config = {{"att_norm", norm_all ? "n" : "n-1"}};
      emit(compare_common, manifest, out);
      return kOk;
    }

    if (*rst2dep) {
      std::istringstream in(qud::formats::read_text(rst_path));
      std::string line;
      std::string out;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string id = "tree-" + std::to_string(lineno);
        if (auto tab = line.find('\t'); tab != std::string::npos) {
          id = line.substr(0, tab);
          line = line.substr(tab + 1);
        }
        try {
          auto dep = qud::rst::to_dep(qud::rst::read(line, rst_format));
          out += qud::formats::dep_tree_line(id, dep);
        } catch (const qud::InputError& e) {
          throw qud::InputError(rst_path + ":" + std::to_string(lineno) + ": " + e.what());
        }
      }
      auto manifest = start_manifest("rst2dep", {rst_path});
      manifest.config = {{"format", rst_format}, {"head_rule", "leftmost nucleus"}};
      emit(rst_common, manifest, out);
      return kOk;
    }

    if (*eval) {
      auto records = qud::eval::load_judgments(judgments_path);
      std::vector<std::pair<std::string, qud::eval::Q1Aggregate>> q1_rows;
      std::vector<std::pair<std::string, qud::eval::Q2Aggregate>> q2_rows;
      std::string agreement = "# agreement\nsystem\tquestion\tquestions\tall_agree\tmajority\talpha_yes_vs_others\talpha_coarse\talpha_fine\n";
      auto alpha = [](const std::optional<double>& a) { return a ? fmt(*a, 3) : std::string("NA"); };
      for (const auto& [system, recs] : qud::eval::by_system(records)) {
        q1_rows.emplace_back(system, qud::eval::aggregate_q1(recs));
        auto subset = qud::eval::restrict_to(recs, qud::eval::q2_subset(recs));
        try {
          q2_rows.emplace_back(system, qud::eval::aggregate_q2(subset));
        } catch (const qud::PreconditionError& e) {
          std::cerr << "warning: " << system << ": no Q2 row (" << e.what() << ")\n";
        }
        auto a1 = qud::eval::q1_agreement(recs);
        auto a2 = qud::eval::q2_agreement(recs);
        agreement += system + "\tQ1\t" + std::to_string(a1.questions) + "\t" + fmt(a1.all_agree_pct, 1) +
                     "\t" + fmt(a1.majority_pct, 1) + "\t" + alpha(a1.alpha_yes_vs_others) + "\t" +
                     alpha(a1.alpha_coarse) + "\t" + alpha(a1.alpha_fine) + "\n";
        agreement += system + "\tQ2\t" + std::to_string(a2.questions) + "\t" + fmt(a2.all_agree_pct, 1) +
                     "\t" + fmt(a2.majority_pct, 1) + "\t" + alpha(a2.alpha_yes_vs_others) + "\t" +
                     alpha(a2.alpha_coarse) + "\t" + alpha(a2.alpha_fine) + "\n";
      }
      std::string out = qud::eval::q1_table(q1_rows, eval_common.pretty) + "\n" +
                        qud::eval::q2_table(q2_rows, eval_common.pretty) + "\n" + agreement;
      emit(eval_common, start_manifest("eval", {judgments_path}), out);
      return kOk;
    }

    if (*encode) {
      auto docs = qud::dcqa::load_articles(encode_articles);
      const qud::Document* doc = nullptr;
      for (const auto& d : docs) {
        if (encode_article_id.empty() || d.article_id() == encode_article_id) {
          doc = &d;
          break;
        }
      }
      if (doc == nullptr) throw qud::InputError("article '" + encode_article_id + "' not found");
      std::string out;
      if (encode_kind == "anchor") {
        out = qud::encoding::encode_anchor_query(*doc, encode_answer).text;
      } else {
        std::vector<qud::encoding::EntitySpan> spans;
        if (!spans_path.empty()) {
          spans = qud::formats::parse_spans(qud::formats::read_text(spans_path), spans_path);
        }
        out = qud::encoding::encode_generation_prompt(*doc, encode_answer, encode_anchor, spans,
                                                      encode_question)
                  .render();
      }
      auto manifest = start_manifest("encode", {encode_articles});
      manifest.config = {{"kind", encode_kind},
                         {"article_id", doc->article_id()},
                         {"answer", std::to_string(encode_answer)},
                         {"anchor", std::to_string(encode_anchor)}};
      emit(encode_common, manifest, out + "\n");
      return kOk;
    }

    if (*synth) {
      auto docs = qud::dcqa::load_articles(synth_articles);
      auto load = qud::dcqa::load_questions(synth_questions, docs);
      for (const auto& d : load.rejected) std::cerr << "rejected: " << d.to_string() << "\n";
      for (const auto& d : load.warnings) std::cerr << "warning: " << d.to_string() << "\n";
      std::map<std::string, const qud::Document*> by_id;
      for (const auto& d : docs) by_id[d.article_id()] = &d;
      std::string out;
      auto line = [](const std::string& article, const qud::eval::RerankExample& ex) {
        nlohmann::ordered_json j;
        j["article_id"] = article;
        j["question"] = ex.question;
        j["anchor"] = ex.anchor;
        j["answer"] = ex.answer;
        j["label"] = ex.positive ? 1 : 0;
        return j.dump() + "\n";
      };
      for (const auto& q : load.questions) {
        auto it = by_id.find(q.article_id);
        if (it == by_id.end()) continue;
        if (with_positives) {
          out += line(q.article_id, {q.question_text, q.anchor_sentence_id, q.answer_sentence_id, true});
        }
        for (const auto& ex : qud::eval::synth_negatives(q, *it->second)) out += line(q.article_id, ex);
      }
      emit(synth_common, start_manifest("synth-neg", {synth_articles, synth_questions}), out);
      return kOk;
    }

    if (*serve) {
      qud::MockBackend backend(serve_seed);
      qud::BackendServer server(backend);
      int bound = 0;
      try {
        bound = server.start(serve_host, serve_port);
      } catch (const qud::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBackend;
      }
      std::cout << "listening on " << serve_host << ":" << bound << " (seed " << serve_seed << ")"
                << std::endl;
      for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
      return kOk;
    }
  } catch (const qud::protocol::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kBackend;
  } catch (const qud::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const qud::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const qud::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
