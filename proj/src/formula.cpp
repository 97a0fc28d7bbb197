#include "plc/formula.hpp"

namespace plc {

Formula Formula::constant(bool value) {
  return Formula(std::make_shared<const Node>(Node{Kind::constant, value, {}, {}}));
}

Formula Formula::atom(std::string name) {
  return Formula(std::make_shared<const Node>(Node{Kind::atom, false, std::move(name), {}}));
}

Formula Formula::negation(Formula operand) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::negation, false, {}, {std::move(operand)}}));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::conjunction, false, {}, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::disjunction, false, {}, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::all_of(const std::vector<Formula>& operands) {
  if (operands.empty()) return constant(true);
  Formula result = operands.front();
  for (std::size_t i = 1; i < operands.size(); ++i) result = conjunction(result, operands[i]);
  return result;
}

std::set<std::string> Formula::atoms() const {
  std::set<std::string> names;
  std::vector<const Formula*> pending{this};
  while (!pending.empty()) {
    const Formula* f = pending.back();
    pending.pop_back();
    if (f->kind() == Kind::atom) names.insert(f->name());
    for (const auto& child : f->node_->children) pending.push_back(&child);
  }
  return names;
}

bool Formula::evaluate(const std::function<bool(const std::string&)>& valuation) const {
  switch (kind()) {
    case Kind::constant:
      return value();
    case Kind::atom:
      return valuation(name());
    case Kind::negation:
      return !operand().evaluate(valuation);
    case Kind::conjunction:
      return lhs().evaluate(valuation) && rhs().evaluate(valuation);
    case Kind::disjunction:
      return lhs().evaluate(valuation) || rhs().evaluate(valuation);
  }
  return false;
}

std::optional<bool> Formula::evaluate_partial(
    const std::function<std::optional<bool>(const std::string&)>& valuation) const {
  switch (kind()) {
    case Kind::constant:
      return value();
    case Kind::atom:
      return valuation(name());
    case Kind::negation: {
      auto inner = operand().evaluate_partial(valuation);
      if (!inner) return std::nullopt;
      return !*inner;
    }
    case Kind::conjunction: {
      auto a = lhs().evaluate_partial(valuation);
      if (a == false) return false;
      auto b = rhs().evaluate_partial(valuation);
      if (b == false) return false;
      if (a && b) return true;
      return std::nullopt;
    }
    case Kind::disjunction: {
      auto a = lhs().evaluate_partial(valuation);
      if (a == true) return true;
      auto b = rhs().evaluate_partial(valuation);
      if (b == true) return true;
      if (a && b) return false;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Formula Formula::relabel(std::string_view suffix) const {
  switch (kind()) {
    case Kind::constant:
      return *this;
    case Kind::atom:
      return atom(name() + std::string(suffix));
    case Kind::negation:
      return negation(operand().relabel(suffix));
    case Kind::conjunction:
      return conjunction(lhs().relabel(suffix), rhs().relabel(suffix));
    case Kind::disjunction:
      return disjunction(lhs().relabel(suffix), rhs().relabel(suffix));
  }
  return *this;
}

namespace {

int precedence(Formula::Kind kind) {
  switch (kind) {
    case Formula::Kind::disjunction:
      return 1;
    case Formula::Kind::conjunction:
      return 2;
    default:
      return 3;
  }
}

std::string render(const Formula& f, int context) {
  std::string text;
  switch (f.kind()) {
    case Formula::Kind::constant:
      return f.value() ? "true" : "false";
    case Formula::Kind::atom:
      return f.name();
    case Formula::Kind::negation:
      return "!" + render(f.operand(), 3);
    case Formula::Kind::conjunction:
      text = render(f.lhs(), 2) + " & " + render(f.rhs(), 3);
      break;
    case Formula::Kind::disjunction:
      text = render(f.lhs(), 1) + " | " + render(f.rhs(), 2);
      break;
  }
  return precedence(f.kind()) < context ? "(" + text + ")" : text;
}

}  // namespace

std::string Formula::to_string() const { return render(*this, 0); }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::constant:
      return a.value() == b.value();
    case Formula::Kind::atom:
      return a.name() == b.name();
    default:
      return a.node_->children == b.node_->children;
  }
}

}  // namespace plc
