#include "qud/dcqa.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qud/error.hpp"

namespace qud::dcqa {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

[[noreturn]] void fail(const std::string& file, std::size_t line, const std::string& msg) {
  throw InputError(file + ":" + std::to_string(line) + ": " + msg);
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

json parse_line(const std::string& line, const std::string& file, std::size_t lineno) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) fail(file, lineno, "record is not an object");
    return j;
  } catch (const json::parse_error& e) {
    fail(file, lineno, std::string("malformed record: ") + e.what());
  }
}

template <typename T>
T field(const json& j, const char* name, const std::string& file, std::size_t lineno) {
  auto it = j.find(name);
  if (it == j.end()) fail(file, lineno, std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(file, lineno, std::string("field '") + name + "' has the wrong type");
  }
}

template <typename Fn>
void for_each_record(const std::string& content, Fn&& fn) {
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    fn(line, lineno);
  }
}

}  // namespace

std::string Diagnostic::to_string() const {
  return file + ":" + std::to_string(line) + ": " + message;
}

std::vector<Document> parse_articles(const std::string& content, const std::string& source_name) {
  std::vector<Document> docs;
  std::set<std::string> ids;
  for_each_record(content, [&](const std::string& line, std::size_t lineno) {
    json j = parse_line(line, source_name, lineno);
    auto article_id = field<std::string>(j, "article_id", source_name, lineno);
    auto sentences = field<json>(j, "sentences", source_name, lineno);
    if (!sentences.is_array()) fail(source_name, lineno, "field 'sentences' is not a list");
    std::vector<std::pair<int, std::string>> indexed;
    for (const auto& s : sentences) {
      if (!s.is_object()) fail(source_name, lineno, "field 'sentences' holds a non-object");
      indexed.emplace_back(field<int>(s, "index", source_name, lineno),
                           field<std::string>(s, "text", source_name, lineno));
    }
    if (!ids.insert(article_id).second) {
      fail(source_name, lineno, "duplicate article_id '" + article_id + "'");
    }
    try {
      docs.push_back(Document::from_indexed(article_id, indexed));
    } catch (const InputError& e) {
      fail(source_name, lineno, std::string("field 'sentences': ") + e.what());
    }
  });
  return docs;
}

std::vector<Document> load_articles(const std::filesystem::path& path) {
  return parse_articles(read_file(path), path.string());
}

std::string serialize_articles(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    json sentences = json::array();
    for (const auto& s : doc.sentences()) sentences.push_back({{"index", s.index}, {"text", s.text}});
    out += json{{"article_id", doc.article_id()}, {"sentences", sentences}}.dump();
    out += '\n';
  }
  return out;
}

QuestionLoad parse_questions(const std::string& content, const std::string& source_name,
                             const std::vector<Document>& docs) {
  QuestionLoad result;
  for_each_record(content, [&](const std::string& line, std::size_t lineno) {
    json j = parse_line(line, source_name, lineno);
    DcqaQuestion q{
        field<std::string>(j, "article_id", source_name, lineno),
        field<std::string>(j, "worker_id", source_name, lineno),
        field<int>(j, "answer_sentence_id", source_name, lineno),
        field<int>(j, "anchor_sentence_id", source_name, lineno),
        field<std::string>(j, "question_text", source_name, lineno),
    };
    auto reject = [&](const std::string& msg) {
      result.rejected.push_back({source_name, lineno, msg});
    };
    if (q.anchor_sentence_id >= q.answer_sentence_id) {
      reject("anchor " + std::to_string(q.anchor_sentence_id) + " is not before answer " +
             std::to_string(q.answer_sentence_id));
      return;
    }
    if (q.answer_sentence_id < 2 || q.anchor_sentence_id < 1) {
      reject("sentence ids out of range (anchor " + std::to_string(q.anchor_sentence_id) +
             ", answer " + std::to_string(q.answer_sentence_id) + ")");
      return;
    }
    if (normalize_text(q.question_text).empty()) {
      reject("empty question_text");
      return;
    }
    if (!docs.empty()) {
      auto doc = std::find_if(docs.begin(), docs.end(),
                              [&](const Document& d) { return d.article_id() == q.article_id; });
      if (doc == docs.end()) {
        result.warnings.push_back(
            {source_name, lineno, "unknown article_id '" + q.article_id + "'"});
      } else if (q.answer_sentence_id > doc->size()) {
        reject("answer " + std::to_string(q.answer_sentence_id) + " beyond article length " +
               std::to_string(doc->size()));
        return;
      }
    }
    result.questions.push_back(std::move(q));
  });
  return result;
}

QuestionLoad load_questions(const std::filesystem::path& path, const std::vector<Document>& docs) {
  return parse_questions(read_file(path), path.string(), docs);
}

std::string serialize_questions(const std::vector<DcqaQuestion>& questions) {
  std::string out;
  for (const auto& q : questions) {
    out += nlohmann::ordered_json{{"article_id", q.article_id},
                {"worker_id", q.worker_id},
                {"answer_sentence_id", q.answer_sentence_id},
                {"anchor_sentence_id", q.anchor_sentence_id},
                {"question_text", q.question_text}}
               .dump();
    out += '\n';
  }
  return out;
}

std::string adapt_release_record(const std::string& json_record) {
  json in = json::parse(json_record);
  auto key_of = [](std::string k) {
    std::string out;
    for (char c : k) {
      if (c != '_') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
  };
  std::map<std::string, json> by_key;
  for (auto& [k, v] : in.items()) by_key[key_of(k)] = v;
  auto pick = [&](std::initializer_list<const char*> names) -> json {
    for (const char* n : names) {
      if (auto it = by_key.find(n); it != by_key.end()) return it->second;
    }
    throw InputError(std::string("release record lacks '") + *names.begin() + "'");
  };
  auto as_int = [](const json& v) {
    return v.is_string() ? std::stoi(v.get<std::string>()) : v.get<int>();
  };
  auto as_str = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  json out{{"article_id", as_str(pick({"articleid", "article"}))},
           {"worker_id", as_str(pick({"workerid", "annotator", "worker"}))},
           {"answer_sentence_id", as_int(pick({"answersentenceid", "answerid"}))},
           {"anchor_sentence_id", as_int(pick({"anchorsentenceid", "anchorid"}))},
           {"question_text", as_str(pick({"question", "questiontext"}))}};
  return out.dump();
}

bool AnnotatorTreeSet::is_partial(const std::string& worker) const {
  auto it = missing.find(worker);
  return it != missing.end() && !it->second.empty();
}

AnnotatorTreeSet build_trees(const std::vector<DcqaQuestion>& questions, const Document& doc) {
  AnnotatorTreeSet set;
  set.article_id = doc.article_id();
  for (std::size_t r = 0; r < questions.size(); ++r) {
    const auto& q = questions[r];
    if (q.article_id != doc.article_id()) {
      throw PreconditionError("question for article '" + q.article_id +
                              "' passed with document '" + doc.article_id() + "'");
    }
    if (q.answer_sentence_id > doc.size()) {
      throw PreconditionError("answer sentence " + std::to_string(q.answer_sentence_id) +
                              " beyond document length");
    }
    auto [it, inserted] = set.trees.try_emplace(q.worker_id);
    QudTree& tree = it->second;
    if (inserted) {
      tree.article_id = doc.article_id();
      tree.n = doc.size();
    }
    if (tree.find(q.answer_sentence_id) != nullptr) {
      set.duplicates.push_back({q.worker_id, q.answer_sentence_id, r});
      continue;
    }
    auto& srcs = set.sources[q.worker_id];
    auto pos = std::lower_bound(
        tree.entries.begin(), tree.entries.end(), q.answer_sentence_id,
        [](const QudEntry& e, int a) { return e.answer < a; });
    auto offset = pos - tree.entries.begin();
    tree.entries.insert(pos, QudEntry{q.answer_sentence_id, q.anchor_sentence_id, q.question_text});
    srcs.insert(srcs.begin() + offset, r);
  }
  for (const auto& [worker, tree] : set.trees) {
    auto& miss = set.missing[worker];
    for (int i = 2; i <= tree.n; ++i) {
      if (tree.find(i) == nullptr) miss.push_back(i);
    }
  }
  return set;
}

}  // namespace qud::dcqa
