#pragma once

#include <cstdint>
#include <span>

#include "tabkit/term.hpp"

namespace tabkit {

class Machine;

/// Returns false for logical failure. Errors are thrown.
using BuiltinFn = bool (*)(Machine& m, std::span<const Term> args);

/// Host operation for name/arity, or nullptr.
BuiltinFn find_builtin(Symbol name, std::uint32_t arity);

/// Builtins plus the control constructs the machine interprets itself
/// (',', ';', true, fail, tabled_call). User clauses may not define these.
bool is_reserved(Symbol name, std::uint32_t arity);

/// Integer value of an arithmetic expression over + - * // mod and unary
/// minus. Throws InstantiationError on an unbound variable and TypeError on
/// anything else that is not an integer or a known operator.
BigInt eval_arith(const Term& expr);

/// `op` is one of < =< > >= =:= =\=. Both sides are evaluated.
bool compare_ints(Symbol op, const Term& a, const Term& b);

}  // namespace tabkit
