#include "qud/formats.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qud/error.hpp"

namespace qud::formats {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    if (!out) throw InputError("write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string qud_tree_line(const QudTree& tree, const std::optional<std::string>& variant) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : tree.entries) {
    entries.push_back({{"answer", e.answer}, {"anchor", e.anchor}, {"question", e.question}});
  }
  ordered_json j;
  j["article_id"] = tree.article_id;
  j["n"] = tree.n;
  if (variant) j["variant"] = *variant;
  j["entries"] = entries;
  return j.dump() + "\n";
}

std::string dep_tree_line(const std::string& article_id, const DepTree& tree) {
  std::vector<int> parent(tree.parents().begin() + 1, tree.parents().end());
  ordered_json j;
  j["article_id"] = article_id;
  j["n"] = tree.n();
  j["parent"] = parent;
  return j.dump() + "\n";
}

std::vector<TreeRecord> parse_trees(const std::string& content, const std::string& source_name) {
  std::vector<TreeRecord> out;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = source_name + ":" + std::to_string(lineno) + ": ";
    try {
      json j = json::parse(line);
      TreeRecord rec;
      rec.article_id = j.at("article_id").get<std::string>();
      const int n = j.at("n").get<int>();
      if (j.contains("parent")) {
        auto parent = j.at("parent").get<std::vector<int>>();
        if (static_cast<int>(parent.size()) != n) throw InputError("parent list length differs from n");
        parent.insert(parent.begin(), 0);
        rec.dep = DepTree::forest(std::move(parent));
      } else {
        QudTree tree;
        tree.article_id = rec.article_id;
        tree.n = n;
        for (const auto& e : j.at("entries")) {
          tree.entries.push_back({e.at("answer").get<int>(), e.at("anchor").get<int>(),
                                  e.at("question").get<std::string>()});
        }
        tree.sort_entries();
        rec.dep = to_dep_forest(tree);
        rec.qud = std::move(tree);
        if (j.contains("variant")) rec.variant = j.at("variant").get<std::string>();
      }
      out.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw InputError(where + e.what());
    } catch (const Error& e) {
      throw InputError(where + e.what());
    }
  }
  return out;
}

std::vector<TreeRecord> load_trees(const std::filesystem::path& path) {
  return parse_trees(read_text(path), path.string());
}

std::vector<encoding::EntitySpan> parse_spans(const std::string& content,
                                              const std::string& source_name) {
  std::vector<encoding::EntitySpan> spans;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      spans.push_back({j.at("sentence_index").get<int>(), j.at("token_start").get<int>(),
                       j.at("token_end").get<int>(), j.at("entity_type").get<std::string>()});
    } catch (const json::exception& e) {
      throw InputError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return spans;
}

}  // namespace qud::formats
