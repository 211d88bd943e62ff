#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "sqba/crypto.hpp"

namespace sqba {

/// A protocol value: an opaque byte string, or the reserved out-of-domain
/// default (bottom). Bottom never equals any byte string, including "".
class Value {
 public:
  Value() = default;  // bottom

  static Value bottom() { return Value(); }
  static Value of(Bytes bytes) {
    Value v;
    v.bottom_ = false;
    v.bytes_ = std::move(bytes);
    return v;
  }
  static Value bit(bool b) { return of(b ? "1" : "0"); }

  bool is_bottom() const { return bottom_; }
  const Bytes& bytes() const { return bytes_; }
  std::optional<bool> as_bit() const;

  /// 0x00 for bottom, 0x01 followed by the raw bytes otherwise.
  Bytes encode() const;
  std::string display() const;

  auto operator<=>(const Value&) const = default;
  bool operator==(const Value&) const = default;

 private:
  bool bottom_ = true;
  Bytes bytes_;
};

/// Small sorted set of distinct values.
using ValueSet = std::vector<Value>;

void insert_value(ValueSet& set, const Value& v);
bool contains_value(const ValueSet& set, const Value& v);
std::string display(const ValueSet& set);

}  // namespace sqba
