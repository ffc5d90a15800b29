#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string_view>

namespace tabkit {

/// Interned atom or functor name. Interning is process-wide and thread-safe;
/// comparing two symbols is an integer comparison.
class Symbol {
 public:
  Symbol() = default;

  static Symbol intern(std::string_view name);

  std::string_view name() const;
  std::uint32_t id() const noexcept { return id_; }

  friend bool operator==(Symbol a, Symbol b) noexcept { return a.id_ == b.id_; }
  friend auto operator<=>(Symbol a, Symbol b) noexcept { return a.id_ <=> b.id_; }

 private:
  explicit Symbol(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = 0;  // 0 is the empty name
};

/// Names the engine itself relies on.
namespace sym {
Symbol nil();         // []
Symbol dot();         // '.'
Symbol comma();       // ','
Symbol semicolon();   // ';'
Symbol var_marker();  // '$VAR'
Symbol tuple();       // '$tuple'
Symbol neck();        // ':-'
Symbol true_();
Symbol fail();
Symbol tabled_call();
}  // namespace sym

}  // namespace tabkit

template <>
struct std::hash<tabkit::Symbol> {
  std::size_t operator()(tabkit::Symbol s) const noexcept { return s.id(); }
};
