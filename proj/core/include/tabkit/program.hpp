#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tabkit/database.hpp"
#include "tabkit/term.hpp"

namespace tabkit {

/// A parsed query: the goal term and its named variables in order of first
/// appearance. Variables named `_` are anonymous and not listed.
struct Query {
  Term goal;
  std::vector<std::pair<std::string, Term>> variables;
};

/// Loaded clause file. Holds the clauses as written plus the table
/// directives, and the executable database derived from them, in which every
/// tabled p/n is a wrapper `p(A1..An) :- tabled_call('p#'(A1..An))` over the
/// user clauses re-homed under p#/n.
class Program {
 public:
  Program();
  Program(Program&&) noexcept;
  Program& operator=(Program&&) noexcept;
  ~Program();

  /// Throws SyntaxError, TableDirectiveError or Error.
  static Program parse(std::string_view text);
  /// Throws Error when the file cannot be read, then as `parse`.
  static Program load(const std::string& path);

  /// Declares name/arity tabled. Idempotent.
  void apply_table_directive(Symbol name, std::uint32_t arity);

  const Database& database() const noexcept { return *db_; }
  const std::vector<Clause>& clauses() const noexcept { return clauses_; }
  const std::vector<PredicateId>& table_directives() const noexcept { return tabled_; }

  /// Re-parseable source text: directives first, then clauses in order.
  std::string to_source() const;

 private:
  void add_clause(Term term, std::uint32_t nvars);
  void rebuild();

  std::vector<Clause> clauses_;
  std::vector<PredicateId> tabled_;
  std::unique_ptr<Database> db_;
};

/// Name of the worker predicate for a tabled predicate: `name#`.
Symbol worker_name(Symbol name);
/// Inverse of worker_name; returns `name` unchanged when it has no `#`.
Symbol strip_worker_name(Symbol name);

Query parse_query(std::string_view text, Bindings& s);

/// A single term (trailing `.` optional); variables are created in `s`.
Term parse_term(std::string_view text, Bindings& s);

}  // namespace tabkit
