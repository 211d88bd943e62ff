#include "sqba/value.hpp"

#include <algorithm>

namespace sqba {

std::optional<bool> Value::as_bit() const {
  if (bottom_) return std::nullopt;
  if (bytes_ == "0") return false;
  if (bytes_ == "1") return true;
  return std::nullopt;
}

Bytes Value::encode() const {
  if (bottom_) return Bytes(1, '\0');
  Bytes out(1, '\x01');
  out += bytes_;
  return out;
}

std::string Value::display() const {
  if (bottom_) return "_";
  const bool printable = std::all_of(bytes_.begin(), bytes_.end(), [](char c) {
    return c >= 0x21 && c <= 0x7e && c != '"' && c != '\\' && c != ',' && c != '_';
  });
  if (printable && !bytes_.empty()) return bytes_;
  return "0x" + to_hex(std::string_view(bytes_));
}

void insert_value(ValueSet& set, const Value& v) {
  auto it = std::lower_bound(set.begin(), set.end(), v);
  if (it == set.end() || *it != v) set.insert(it, v);
}

bool contains_value(const ValueSet& set, const Value& v) { return std::binary_search(set.begin(), set.end(), v); }

std::string display(const ValueSet& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ",";
    out += set[i].display();
  }
  return out + "}";
}

}  // namespace sqba
