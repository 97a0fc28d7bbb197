#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace plc {

/// Immutable propositional formula over internal atoms.  Nodes are shared,
/// so copies are cheap.
class Formula {
 public:
  enum class Kind { constant, atom, negation, conjunction, disjunction };

  static Formula constant(bool value);
  static Formula atom(std::string name);
  static Formula negation(Formula operand);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);

  /// Conjunction of all operands; `true` for an empty list.
  static Formula all_of(const std::vector<Formula>& operands);

  Formula() : Formula(constant(true)) {}

  Kind kind() const { return node_->kind; }
  bool value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  const Formula& operand() const { return node_->children.at(0); }
  const Formula& lhs() const { return node_->children.at(0); }
  const Formula& rhs() const { return node_->children.at(1); }

  std::set<std::string> atoms() const;

  bool evaluate(const std::function<bool(const std::string&)>& valuation) const;

  /// Three-valued evaluation; nullopt for atoms the valuation leaves open.
  std::optional<bool> evaluate_partial(
      const std::function<std::optional<bool>(const std::string&)>& valuation) const;

  /// Appends `suffix` to every atom.
  Formula relabel(std::string_view suffix) const;

  /// Fully parenthesised only where precedence requires it.
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    bool value = false;
    std::string name;
    std::vector<Formula> children;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

}  // namespace plc
