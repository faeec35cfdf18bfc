#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cfuse {

// Interned symbol names. The table is global, append-only and thread-safe;
// ids are dense and stable for the lifetime of the process. Symbols compare
// by id for equality but by *name* for ordering, so canonical orders do not
// depend on interning history.
using SymbolId = int32_t;

SymbolId intern_symbol(const std::string& name);
const std::string& symbol_name(SymbolId id);

// Pre-interned boolean symbols.
SymbolId true_symbol();
SymbolId false_symbol();

// A finite-domain scalar: either an integer or a symbol (named constant).
// Booleans are just the symbols true/false.
struct Value {
  enum class Kind : uint8_t { Int, Symbol };

  Kind kind = Kind::Int;
  int64_t payload = 0;  // the integer itself, or a SymbolId

  static Value integer(int64_t v) { return Value{Kind::Int, v}; }
  static Value symbol(SymbolId id) { return Value{Kind::Symbol, id}; }
  static Value symbol(const std::string& name) { return symbol(intern_symbol(name)); }
  static Value boolean(bool b) { return symbol(b ? true_symbol() : false_symbol()); }

  bool is_int() const { return kind == Kind::Int; }
  bool is_symbol() const { return kind == Kind::Symbol; }
  int64_t as_int() const { return payload; }
  SymbolId as_symbol() const { return static_cast<SymbolId>(payload); }

  bool is_bool() const {
    return is_symbol() && (as_symbol() == true_symbol() || as_symbol() == false_symbol());
  }
  bool as_bool() const { return as_symbol() == true_symbol(); }

  std::string to_string() const;

  friend bool operator==(const Value&, const Value&) = default;
};

// Canonical order: integers numerically, symbols by name; integers sort
// before symbols when tags differ (only relevant for heterogeneous lists,
// which ranges forbid).
bool value_less(const Value& a, const Value& b);

// An ordered finite set of same-tagged values. Construction canonicalizes
// (sorts) and rejects duplicates, mixed tags and emptiness; the size >= 2
// requirement is a model-validation concern, not a structural one.
class Range {
 public:
  Range() = default;
  explicit Range(std::vector<Value> values);

  const std::vector<Value>& values() const { return values_; }
  size_t size() const { return values_.size(); }
  bool contains(const Value& v) const;
  const Value& min() const { return values_.front(); }
  bool all_int() const { return !values_.empty() && values_.front().is_int(); }

  friend bool operator==(const Range&, const Range&) = default;

 private:
  std::vector<Value> values_;
};

// The {false, true} range used for boolean variables.
Range bool_range();

}  // namespace cfuse
