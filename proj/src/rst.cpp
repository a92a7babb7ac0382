#include "qud/rst.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>

#include "qud/error.hpp"

namespace qud::rst {

namespace {

class BracketParser {
 public:
  explicit BracketParser(std::string_view text) : text_(text) {}

  RstTree parse() {
    RstTree tree;
    tree.root = node();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    validate(tree);
    return tree;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("rst tree, offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string atom() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    if (pos_ == start) fail("expected a symbol");
    return std::string(text_.substr(start, pos_ - start));
  }

  int index(const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(),
                                  [](unsigned char c) { return std::isdigit(c) != 0; })) {
      if (s.find('.') != std::string::npos || s.find_first_of("eE") == 0) {
        fail("sub-sentential span '" + s + "': map EDUs to sentences before conversion");
      }
      fail("bad sentence index '" + s + "'");
    }
    return std::stoi(s);
  }

  RstNode node() {
    expect('(');
    RstNode n;
    auto span = atom();
    auto dash = span.find('-');
    if (dash == std::string::npos) {
      n.first = n.last = index(span);
    } else {
      n.first = index(span.substr(0, dash));
      n.last = index(span.substr(dash + 1));
    }
    n.relation = atom();
    auto nuc = atom();
    if (nuc == "N" || nuc == "Nucleus") {
      n.nuclearity = Nuclearity::Nucleus;
    } else if (nuc == "S" || nuc == "Satellite") {
      n.nuclearity = Nuclearity::Satellite;
    } else if (nuc == "Root") {
      n.nuclearity = Nuclearity::Root;
    } else {
      fail("bad nuclearity '" + nuc + "'");
    }
    skip_ws();
    while (pos_ < text_.size() && text_[pos_] == '(') {
      n.children.push_back(node());
      skip_ws();
    }
    expect(')');
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void validate_node(const RstNode& node, bool is_root) {
  auto where = "span " + std::to_string(node.first) + "-" + std::to_string(node.last);
  if (node.first < 1 || node.last < node.first) throw InputError(where + ": bad range");
  if (!is_root && node.nuclearity == Nuclearity::Root) {
    throw InputError(where + ": Root nuclearity below the root");
  }
  if (node.is_leaf()) {
    if (node.first != node.last) {
      throw InputError(where + ": leaf must cover exactly one sentence");
    }
    return;
  }
  int expected = node.first;
  bool has_nucleus = false;
  for (const auto& c : node.children) {
    if (c.first != expected) {
      throw InputError(where + ": children do not partition the span at sentence " +
                       std::to_string(expected));
    }
    expected = c.last + 1;
    has_nucleus = has_nucleus || c.nuclearity == Nuclearity::Nucleus;
    validate_node(c, false);
  }
  if (expected != node.last + 1) throw InputError(where + ": children end before the span");
  if (!has_nucleus) throw InputError(where + ": no nucleus child");
}

void attach(const RstNode& node, std::vector<int>& parents) {
  if (node.is_leaf()) return;
  const int h = head(node);
  for (const auto& c : node.children) {
    const int ch = head(c);
    if (ch != h) parents[static_cast<std::size_t>(ch)] = h;
    attach(c, parents);
  }
}

const char* nuclearity_name(Nuclearity n) {
  switch (n) {
    case Nuclearity::Nucleus: return "N";
    case Nuclearity::Satellite: return "S";
    case Nuclearity::Root: return "Root";
  }
  return "?";
}

void print(const RstNode& node, std::string& out) {
  out += '(';
  out += std::to_string(node.first);
  if (node.last != node.first) out += "-" + std::to_string(node.last);
  out += ' ' + node.relation + ' ' + nuclearity_name(node.nuclearity);
  for (const auto& c : node.children) {
    out += ' ';
    print(c, out);
  }
  out += ')';
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, Reader>& registry() {
  static std::map<std::string, Reader> readers{{"bracket", &parse_bracketed}};
  return readers;
}

}  // namespace

RstTree parse_bracketed(std::string_view text) { return BracketParser(text).parse(); }

std::string to_bracketed(const RstTree& tree) {
  std::string out;
  print(tree.root, out);
  return out;
}

void validate(const RstTree& tree) {
  if (tree.root.first != 1) throw InputError("rst tree must cover sentences from 1");
  validate_node(tree.root, true);
}

int head(const RstNode& node) {
  if (node.is_leaf()) return node.first;
  for (const auto& c : node.children) {
    if (c.nuclearity == Nuclearity::Nucleus) return head(c);
  }
  throw InputError("span " + std::to_string(node.first) + "-" + std::to_string(node.last) +
                   " has no nucleus child");
}

DepTree to_dep(const RstTree& tree) {
  validate(tree);
  std::vector<int> parents(static_cast<std::size_t>(tree.n()) + 1, 0);
  attach(tree.root, parents);
  return DepTree::tree(std::move(parents));
}

void register_reader(const std::string& format, Reader reader) {
  std::lock_guard lock(registry_mutex());
  registry()[format] = std::move(reader);
}

RstTree read(std::string_view text, const std::string& format) {
  Reader reader;
  {
    std::lock_guard lock(registry_mutex());
    auto it = registry().find(format);
    if (it == registry().end()) throw ConfigError("unknown rst format '" + format + "'");
    reader = it->second;
  }
  return reader(text);
}

std::vector<std::string> reader_names() {
  std::lock_guard lock(registry_mutex());
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

}  // namespace qud::rst
