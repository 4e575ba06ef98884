#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace slicebench::slicing {

struct Object;

/// Interpreter value. Integers are 64-bit and never wrap; BigDecimal values
/// ride on Double.
struct Value {
  enum class Tag : std::uint8_t { Null, Int, Double, Bool, Char, Str, Ref };

  Tag tag = Tag::Null;
  std::int64_t i = 0;  // Int, Bool (0/1), Char
  double d = 0.0;
  std::string s;
  std::shared_ptr<Object> ref;

  static Value null() { return {}; }
  static Value integer(std::int64_t v);
  static Value real(double v);
  static Value boolean(bool v);
  static Value character(std::int64_t v);
  static Value string(std::string v);
  static Value object(std::shared_ptr<Object> o);

  bool is_null() const { return tag == Tag::Null; }
  bool is_numeric() const { return tag == Tag::Int || tag == Tag::Double || tag == Tag::Char; }
  double as_double() const { return tag == Tag::Double ? d : static_cast<double>(i); }
};

/// Total order used for map/set keys and sorting: numbers numerically, then
/// booleans, strings, references (by address), null first.
struct ValueLess {
  bool operator()(const Value& a, const Value& b) const;
};

bool values_equal(const Value& a, const Value& b);

enum class ObjKind { Array, List, Deque, Stack, PriorityQueue, Map, Set, StringBuilder, Entry, User };

struct Object {
  ObjKind kind = ObjKind::User;
  std::string type_name;      // class name for users, element type for arrays
  int elem_dims = 0;          // arrays: dimensions remaining below this one
  std::vector<Value> items;   // arrays, lists, deques, stacks, priority queues (kept sorted), entry (k, v)
  std::map<Value, Value, ValueLess> map;
  std::set<Value, ValueLess> set;
  std::string text;           // StringBuilder
  bool reverse_order = false;  // PriorityQueue built with Collections.reverseOrder()
};

/// Java-like rendering: `[1, 2]`, `{a=1}`, `1.0`, `true`.
std::string display(const Value& v);

/// Double formatting close to Double.toString.
std::string format_double(double d);

}  // namespace slicebench::slicing
