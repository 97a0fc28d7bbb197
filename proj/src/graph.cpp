#include "plc/graph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "plc/error.hpp"
#include "plc/program.hpp"

namespace plc {

ClassDependencyGraph::ClassDependencyGraph(std::set<std::string> nodes, std::set<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (const auto& [from, to] : edges_) {
    nodes_.insert(from);
    nodes_.insert(to);
  }
  for (const auto& node : nodes_) {
    parents_[node];
    children_[node];
  }
  // Edges are sorted, so both adjacency lists come out sorted by the
  // neighbour within each (from) bucket; parents need an explicit sort.
  for (const auto& [from, to] : edges_) {
    parents_[to].push_back(from);
    children_[from].push_back(to);
  }
  for (auto& [node, list] : parents_) std::sort(list.begin(), list.end());
}

ClassDependencyGraph ClassDependencyGraph::of(const Program& program) {
  std::set<Edge> edges;
  for (const auto& clause : program.clauses()) {
    for (const auto& literal : clause.causes) edges.emplace(literal.atom, clause.effect);
  }
  const auto& names = program.propositions();
  return ClassDependencyGraph({names.begin(), names.end()}, std::move(edges));
}

bool ClassDependencyGraph::has_node(std::string_view node) const {
  return nodes_.find(std::string(node)) != nodes_.end();
}

bool ClassDependencyGraph::has_edge(std::string_view from, std::string_view to) const {
  return edges_.contains({std::string(from), std::string(to)});
}

std::vector<std::string> ClassDependencyGraph::parents(std::string_view node) const {
  auto it = parents_.find(node);
  return it == parents_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> ClassDependencyGraph::children(std::string_view node) const {
  auto it = children_.find(node);
  return it == children_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> ClassDependencyGraph::sinks() const {
  std::vector<std::string> result;
  for (const auto& node : nodes_) {
    if (children_.at(node).empty()) result.push_back(node);
  }
  return result;
}

std::vector<std::string> ClassDependencyGraph::sources() const {
  std::vector<std::string> result;
  for (const auto& node : nodes_) {
    if (parents_.at(node).empty()) result.push_back(node);
  }
  return result;
}

std::optional<std::vector<std::string>> ClassDependencyGraph::find_cycle() const {
  enum class Mark { unvisited, active, done };
  std::map<std::string, Mark> mark;
  for (const auto& node : nodes_) mark[node] = Mark::unvisited;
  std::vector<std::string> stack;
  std::optional<std::vector<std::string>> cycle;

  std::function<bool(const std::string&)> visit = [&](const std::string& node) {
    mark[node] = Mark::active;
    stack.push_back(node);
    for (const auto& child : children_.at(node)) {
      if (mark[child] == Mark::active) {
        auto start = std::find(stack.begin(), stack.end(), child);
        std::vector<std::string> walk(start, stack.end());
        walk.push_back(child);
        cycle = std::move(walk);
        return true;
      }
      if (mark[child] == Mark::unvisited && visit(child)) return true;
    }
    stack.pop_back();
    mark[node] = Mark::done;
    return false;
  };

  for (const auto& node : nodes_) {
    if (mark[node] == Mark::unvisited && visit(node)) break;
  }
  return cycle;
}

std::vector<std::string> ClassDependencyGraph::topological_order() const {
  std::map<std::string, std::size_t> indegree;
  for (const auto& node : nodes_) indegree[node] = parents_.at(node).size();
  std::set<std::string> ready;
  for (const auto& [node, degree] : indegree) {
    if (degree == 0) ready.insert(node);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string node = *ready.begin();
    ready.erase(ready.begin());
    for (const auto& child : children_.at(node)) {
      if (--indegree[child] == 0) ready.insert(child);
    }
    order.push_back(std::move(node));
  }
  if (order.size() != nodes_.size()) {
    auto cycle = find_cycle();
    std::string walk;
    for (const auto& node : cycle.value_or(std::vector<std::string>{})) {
      walk += walk.empty() ? node : " -> " + node;
    }
    throw Error(ErrorCode::cyclic_program, "class dependency graph has a cycle: " + walk);
  }
  return order;
}

bool ClassDependencyGraph::is_subgraph_of(const ClassDependencyGraph& other) const {
  return std::includes(other.nodes_.begin(), other.nodes_.end(), nodes_.begin(), nodes_.end()) &&
         std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

std::string ClassDependencyGraph::to_dot() const {
  std::string out = "digraph G {\n";
  for (const auto& node : nodes_) out += "  " + node + ";\n";
  for (const auto& [from, to] : edges_) out += "  " + from + " -> " + to + ";\n";
  out += "}\n";
  return out;
}

std::string ClassDependencyGraph::to_edge_list() const {
  std::string out;
  for (const auto& node : nodes_) {
    if (parents_.at(node).empty() && children_.at(node).empty()) out += node + "\n";
  }
  for (const auto& [from, to] : edges_) out += from + " " + to + "\n";
  return out;
}

namespace {

std::string strip_comment(std::string line) {
  auto cut = line.find_first_of("#%");
  if (cut != std::string::npos) line.erase(cut);
  return line;
}

void require_graph_name(const std::string& name, std::size_t line) {
  if (!is_valid_name(name)) {
    throw Error(ErrorCode::syntax,
                std::to_string(line) + ": invalid node name '" + name + "' in graph");
  }
}

ClassDependencyGraph parse_edge_list(std::string_view text) {
  std::set<std::string> nodes;
  std::set<ClassDependencyGraph::Edge> edges;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream fields(strip_comment(line));
    std::vector<std::string> tokens;
    for (std::string token; fields >> token;) tokens.push_back(token);
    if (tokens.empty()) continue;
    for (const auto& token : tokens) require_graph_name(token, number);
    if (tokens.size() == 1) {
      nodes.insert(tokens[0]);
    } else if (tokens.size() == 2) {
      edges.emplace(tokens[0], tokens[1]);
    } else {
      throw Error(ErrorCode::syntax, std::to_string(number) +
                                         ": expected 'from to' or a single node name");
    }
  }
  return ClassDependencyGraph(std::move(nodes), std::move(edges));
}

ClassDependencyGraph parse_dot(std::string_view text) {
  auto open = text.find('{');
  auto close = text.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw Error(ErrorCode::syntax, "DOT graph needs a '{ ... }' body");
  }
  std::string body(text.substr(open + 1, close - open - 1));
  for (char& c : body) {
    if (c == '\n') c = ';';
  }
  std::set<std::string> nodes;
  std::set<ClassDependencyGraph::Edge> edges;
  std::istringstream statements(body);
  std::string statement;
  std::size_t number = 0;
  while (std::getline(statements, statement, ';')) {
    ++number;
    if (auto cut = statement.find("//"); cut != std::string::npos) statement.erase(cut);
    std::vector<std::string> chain;
    std::size_t pos = 0;
    while (true) {
      auto arrow = statement.find("->", pos);
      std::string part = statement.substr(pos, arrow == std::string::npos ? std::string::npos
                                                                           : arrow - pos);
      part.erase(0, part.find_first_not_of(" \t\r"));
      part.erase(part.find_last_not_of(" \t\r") + 1);
      chain.push_back(part);
      if (arrow == std::string::npos) break;
      pos = arrow + 2;
    }
    if (chain.size() == 1 && chain[0].empty()) continue;
    for (const auto& name : chain) require_graph_name(name, number);
    if (chain.size() == 1) {
      nodes.insert(chain[0]);
    } else {
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) edges.emplace(chain[i], chain[i + 1]);
    }
  }
  return ClassDependencyGraph(std::move(nodes), std::move(edges));
}

}  // namespace

ClassDependencyGraph parse_graph(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos) {
    auto rest = text.substr(first);
    if (rest.starts_with("digraph") || rest.starts_with("strict digraph")) return parse_dot(text);
  }
  return parse_edge_list(text);
}

}  // namespace plc
