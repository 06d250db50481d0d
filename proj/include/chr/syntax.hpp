#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chr/term.hpp"

namespace chr {

enum class RuleKind { Simplification, Propagation, Simpagation };

std::string_view to_string(RuleKind k);

/// A generalized simpagation rule  kept \ removed <=> guard | body.
struct Rule {
  std::optional<std::string> name;
  std::vector<Term> kept;
  std::vector<Term> removed;
  std::vector<Term> guard;  // built-ins only; [true] when written without
  std::vector<Term> body;   // `true` alone parses to an empty body
  std::size_t source_index = 0;

  RuleKind kind() const;
  /// The rule name, or `r<k>` with k the 1-based textual position.
  std::string label() const;
  /// Head constraints in matching order: kept first, then removed.
  std::vector<Term> heads() const;
  std::size_t head_count() const { return kept.size() + removed.size(); }

  /// Content equality; `source_index` is ignored.
  friend bool operator==(const Rule& a, const Rule& b);
};

struct Symbol {
  std::string name;
  std::size_t arity = 0;

  friend auto operator<=>(const Symbol&, const Symbol&) = default;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

std::string to_string(const Symbol& s);

struct Program {
  std::vector<Rule> rules;
  std::set<Symbol> constraint_symbols;  // user-defined constraints

  friend bool operator==(const Program& a, const Program& b) {
    return a.rules == b.rules;
  }
};

/// Builds a program from rules, checking name uniqueness, built-in-free
/// heads, built-in-only guards and consistent arities. Rules keep their
/// `source_index`.
Program make_program(std::vector<Rule> rules);

Program parse_program(std::string_view text);
/// Comma-separated conjunction; the empty string is the empty goal. A
/// trailing `.` is accepted.
std::vector<Term> parse_goal(std::string_view text);
Term parse_term(std::string_view text);

std::string to_string(const Rule& r);
std::string to_string(const Program& p);

/// First-order reading  forall (H1 & H2 & C <-> H1 & C & exists B) , with
/// `true` conjuncts dropped.
std::string logical_reading(const Rule& r);

}  // namespace chr
