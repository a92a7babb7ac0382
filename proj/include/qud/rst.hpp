#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qud/dep_tree.hpp"

namespace qud::rst {

enum class Nuclearity { Nucleus, Satellite, Root };

/// A node of a sentence-level RST constituency tree. Leaves cover exactly one
/// sentence; an internal node's children partition its span left to right.
struct RstNode {
  int first = 0;  // inclusive sentence range
  int last = 0;
  std::string relation;
  Nuclearity nuclearity = Nuclearity::Root;
  std::vector<RstNode> children;

  bool is_leaf() const noexcept { return children.empty(); }
};

struct RstTree {
  RstNode root;

  int n() const noexcept { return root.last; }
};

/// Bracketed notation, one tree per text:
///
///   node       := "(" span relation nuclearity node* ")"
///   span       := INT | INT "-" INT          (sentence indices, 1-based)
///   relation   := symbol
///   nuclearity := "N" | "S" | "Root" | "Nucleus" | "Satellite"
///
/// e.g. (1-3 span Root (1-2 elaboration N (1 span N) (2 elaboration S)) (3 attribution S))
///
/// Throws InputError with the character offset on syntax errors, and on
/// sub-sentential (EDU) spans, which must be lifted to sentences upstream.
RstTree parse_bracketed(std::string_view text);

std::string to_bracketed(const RstTree& tree);

/// Checks structural invariants: leaves single sentences, children partition
/// the parent span in order, at least one nucleus child per internal node,
/// root span starting at 1. Throws InputError.
void validate(const RstTree& tree);

/// Head sentence: a leaf heads itself, an internal node takes the head of its
/// leftmost nucleus child.
int head(const RstNode& node);

/// Nuclearity-driven conversion. Each non-head sentence attaches to the head
/// of the parent of the largest subtree it heads; the global head is the root.
DepTree to_dep(const RstTree& tree);

/// Reader for a treebank-native format, registered under a name so the CLI can
/// select it. "bracket" is always registered.
using Reader = std::function<RstTree(std::string_view)>;
void register_reader(const std::string& format, Reader reader);
RstTree read(std::string_view text, const std::string& format = "bracket");
std::vector<std::string> reader_names();

}  // namespace qud::rst
