#include "tabkit/builtins.hpp"

#include <unordered_map>

#include "tabkit/errors.hpp"
#include "tabkit/machine.hpp"

namespace tabkit {

namespace {

Symbol s_plus() { static const Symbol s = Symbol::intern("+"); return s; }
Symbol s_minus() { static const Symbol s = Symbol::intern("-"); return s; }
Symbol s_times() { static const Symbol s = Symbol::intern("*"); return s; }
Symbol s_intdiv() { static const Symbol s = Symbol::intern("//"); return s; }
Symbol s_mod() { static const Symbol s = Symbol::intern("mod"); return s; }
Symbol s_lt() { static const Symbol s = Symbol::intern("<"); return s; }
Symbol s_le() { static const Symbol s = Symbol::intern("=<"); return s; }
Symbol s_gt() { static const Symbol s = Symbol::intern(">"); return s; }
Symbol s_ge() { static const Symbol s = Symbol::intern(">="); return s; }
Symbol s_eq() { static const Symbol s = Symbol::intern("=:="); return s; }
Symbol s_ne() { static const Symbol s = Symbol::intern("=\\="); return s; }

BigInt eval(const Term& t0) {
  Term t = deref(t0);
  switch (t.kind()) {
    case TermKind::Int: return t.int_value();
    case TermKind::Var: throw InstantiationError("arithmetic: unbound variable");
    case TermKind::Atom:
      throw TypeError("arithmetic: " + to_string(t) + " is not a number");
    default: break;
  }
  Symbol f = t.name();
  if (t.arity() == 1 && f == s_minus()) return -eval(t.arg(0));
  if (t.arity() == 1 && f == s_plus()) return eval(t.arg(0));
  if (t.arity() != 2)
    throw TypeError("arithmetic: unknown operator " + std::string(f.name()) + "/" +
                    std::to_string(t.arity()));
  BigInt a = eval(t.arg(0));
  BigInt b = eval(t.arg(1));
  if (f == s_plus()) return a + b;
  if (f == s_minus()) return a - b;
  if (f == s_times()) return a * b;
  if (f == s_intdiv()) {
    if (b == 0) throw EvaluationError("arithmetic: division by zero");
    return a / b;  // truncates toward zero
  }
  if (f == s_mod()) {
    if (b == 0) throw EvaluationError("arithmetic: division by zero");
    BigInt r = a % b;  // sign of the dividend
    if (r != 0 && ((r < 0) != (b < 0))) r += b;
    return r;
  }
  throw TypeError("arithmetic: unknown operator " + std::string(f.name()) + "/2");
}

bool b_is(Machine& m, std::span<const Term> a) {
  return unify(a[0], Term::integer(eval(a[1])), m.bindings());
}

bool b_unify(Machine& m, std::span<const Term> a) { return unify(a[0], a[1], m.bindings()); }

template <Symbol (*Op)()>
bool b_compare(Machine&, std::span<const Term> a) {
  return compare_ints(Op(), a[0], a[1]);
}

class BetweenGen final : public Generator {
 public:
  BetweenGen(BigInt next, BigInt high, Term out)
      : next_(std::move(next)), high_(std::move(high)), out_(std::move(out)) {}

  bool next(Machine& m) override {
    if (next_ > high_) return false;
    m.bindings().bind(out_, Term::integer(next_));
    ++next_;
    return true;
  }
  bool exhausted() const override { return next_ > high_; }

 private:
  BigInt next_;
  BigInt high_;
  Term out_;
};

bool b_between(Machine& m, std::span<const Term> a) {
  BigInt low = eval(a[0]);
  BigInt high = eval(a[1]);
  Term x = deref(a[2]);
  if (x.is_int()) return low <= x.int_value() && x.int_value() <= high;
  if (!x.is_var()) throw TypeError("between/3: integer expected, got " + to_string(x));
  if (low > high) return false;
  m.push_alternatives(std::make_shared<BetweenGen>(std::move(low), std::move(high), x));
  return false;
}

std::uint64_t key(Symbol s, std::uint32_t arity) {
  return (std::uint64_t{s.id()} << 8) | arity;
}

const std::unordered_map<std::uint64_t, BuiltinFn>& table() {
  static const std::unordered_map<std::uint64_t, BuiltinFn> t = {
      {key(Symbol::intern("is"), 2), &b_is},
      {key(Symbol::intern("="), 2), &b_unify},
      {key(s_lt(), 2), &b_compare<s_lt>},
      {key(s_le(), 2), &b_compare<s_le>},
      {key(s_gt(), 2), &b_compare<s_gt>},
      {key(s_ge(), 2), &b_compare<s_ge>},
      {key(s_eq(), 2), &b_compare<s_eq>},
      {key(s_ne(), 2), &b_compare<s_ne>},
      {key(Symbol::intern("between"), 3), &b_between},
  };
  return t;
}

}  // namespace

BigInt eval_arith(const Term& expr) { return eval(expr); }

bool compare_ints(Symbol op, const Term& a, const Term& b) {
  BigInt x = eval(a);
  BigInt y = eval(b);
  if (op == s_lt()) return x < y;
  if (op == s_le()) return x <= y;
  if (op == s_gt()) return x > y;
  if (op == s_ge()) return x >= y;
  if (op == s_eq()) return x == y;
  if (op == s_ne()) return x != y;
  throw TypeError("unknown comparison " + std::string(op.name()));
}

BuiltinFn find_builtin(Symbol name, std::uint32_t arity) {
  const auto& t = table();
  auto it = t.find(key(name, arity));
  return it == t.end() ? nullptr : it->second;
}

bool is_reserved(Symbol name, std::uint32_t arity) {
  if (find_builtin(name, arity)) return true;
  if (arity == 2 && (name == sym::comma() || name == sym::semicolon())) return true;
  if (arity == 0 && (name == sym::true_() || name == sym::fail())) return true;
  return arity == 1 && name == sym::tabled_call();
}

}  // namespace tabkit
