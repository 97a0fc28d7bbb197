#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace plc {

class Program;

/// Directed graph on internal propositions with an edge p -> q whenever some
/// clause for q mentions p (positively or negatively) among its causes.
class ClassDependencyGraph {
 public:
  using Edge = std::pair<std::string, std::string>;

  ClassDependencyGraph() = default;
  ClassDependencyGraph(std::set<std::string> nodes, std::set<Edge> edges);

  static ClassDependencyGraph of(const Program& program);

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::set<Edge>& edges() const { return edges_; }

  bool has_node(std::string_view node) const;
  bool has_edge(std::string_view from, std::string_view to) const;

  /// Sorted parents of `node`.
  std::vector<std::string> parents(std::string_view node) const;
  std::vector<std::string> children(std::string_view node) const;
  std::vector<std::string> sinks() const;
  std::vector<std::string> sources() const;

  /// Some directed cycle as a closed walk (first node repeated at the end),
  /// or nothing when the graph is acyclic.
  std::optional<std::vector<std::string>> find_cycle() const;
  bool acyclic() const { return !find_cycle().has_value(); }

  /// Kahn's algorithm taking the lexicographically smallest ready node.
  /// Throws Error(cyclic_program) on a cycle.
  std::vector<std::string> topological_order() const;

  bool is_subgraph_of(const ClassDependencyGraph& other) const;

  std::string to_dot() const;
  std::string to_edge_list() const;

  bool operator==(const ClassDependencyGraph&) const = default;

 private:
  std::set<std::string> nodes_;
  std::set<Edge> edges_;
  std::map<std::string, std::vector<std::string>, std::less<>> parents_;
  std::map<std::string, std::vector<std::string>, std::less<>> children_;
};

/// Accepts either the edge-list format (`a b` per line, a lone name declares
/// an isolated node, `#`/`%` comments) or the DOT subset written by
/// to_dot(): `digraph NAME { a; a -> b; }`.
ClassDependencyGraph parse_graph(std::string_view text);

}  // namespace plc
