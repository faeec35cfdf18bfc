#include "cfuse/value.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace cfuse {

namespace {

struct SymbolTable {
  std::mutex mu;
  std::vector<std::string> names;
  std::unordered_map<std::string, SymbolId> ids;

  SymbolTable() {
    // Slots 0 and 1 are fixed so boolean checks need no lookup.
    names = {"false", "true"};
    ids = {{"false", 0}, {"true", 1}};
  }
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

}  // namespace

SymbolId intern_symbol(const std::string& name) {
  if (name.empty()) {
    throw std::invalid_argument("symbol name must be nonempty");
  }
  SymbolTable& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(name);
  if (it != t.ids.end()) {
    return it->second;
  }
  SymbolId id = static_cast<SymbolId>(t.names.size());
  t.names.push_back(name);
  t.ids.emplace(name, id);
  return id;
}

const std::string& symbol_name(SymbolId id) {
  SymbolTable& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  if (id < 0 || static_cast<size_t>(id) >= t.names.size()) {
    throw std::out_of_range("unknown symbol id");
  }
  return t.names[static_cast<size_t>(id)];
}

SymbolId false_symbol() { return 0; }
SymbolId true_symbol() { return 1; }

std::string Value::to_string() const {
  return is_int() ? std::to_string(as_int()) : symbol_name(as_symbol());
}

bool value_less(const Value& a, const Value& b) {
  if (a.kind != b.kind) {
    return a.is_int();
  }
  if (a.is_int()) {
    return a.as_int() < b.as_int();
  }
  if (a.as_symbol() == b.as_symbol()) {
    return false;
  }
  return symbol_name(a.as_symbol()) < symbol_name(b.as_symbol());
}

Range::Range(std::vector<Value> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw std::invalid_argument("range must not be empty");
  }
  for (const Value& v : values_) {
    if (v.kind != values_.front().kind) {
      throw std::invalid_argument("range mixes integers and symbols");
    }
  }
  std::sort(values_.begin(), values_.end(), value_less);
  for (size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] == values_[i - 1]) {
      throw std::invalid_argument("duplicate value in range: " + values_[i].to_string());
    }
  }
}

bool Range::contains(const Value& v) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), v, value_less);
  return it != values_.end() && *it == v;
}

Range bool_range() { return Range({Value::boolean(false), Value::boolean(true)}); }

}  // namespace cfuse
