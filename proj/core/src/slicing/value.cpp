#include "slicebench/slicing/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace slicebench::slicing {

Value Value::integer(std::int64_t v) {
  Value out;
  out.tag = Tag::Int;
  out.i = v;
  return out;
}

Value Value::real(double v) {
  Value out;
  out.tag = Tag::Double;
  out.d = v;
  return out;
}

Value Value::boolean(bool v) {
  Value out;
  out.tag = Tag::Bool;
  out.i = v ? 1 : 0;
  return out;
}

Value Value::character(std::int64_t v) {
  Value out;
  out.tag = Tag::Char;
  out.i = v & 0xFFFF;
  return out;
}

Value Value::string(std::string v) {
  Value out;
  out.tag = Tag::Str;
  out.s = std::move(v);
  return out;
}

Value Value::object(std::shared_ptr<Object> o) {
  Value out;
  out.tag = Tag::Ref;
  out.ref = std::move(o);
  return out;
}

namespace {

int rank(const Value& v) {
  switch (v.tag) {
    case Value::Tag::Null: return 0;
    case Value::Tag::Int:
    case Value::Tag::Double:
    case Value::Tag::Char: return 1;
    case Value::Tag::Bool: return 2;
    case Value::Tag::Str: return 3;
    case Value::Tag::Ref: return 4;
  }
  return 5;
}

}  // namespace

bool ValueLess::operator()(const Value& a, const Value& b) const {
  const int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb;
  switch (ra) {
    case 1:
      if (a.tag == Value::Tag::Double || b.tag == Value::Tag::Double) return a.as_double() < b.as_double();
      return a.i < b.i;
    case 2: return a.i < b.i;
    case 3: return a.s < b.s;
    case 4: return a.ref.get() < b.ref.get();
    default: return false;
  }
}

bool values_equal(const Value& a, const Value& b) {
  ValueLess less;
  return !less(a, b) && !less(b, a);
}

std::string format_double(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  const double mag = std::fabs(d);
  if (d == std::floor(d) && mag < 1e7) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", d);
    return buf;
  }
  char buf[64];
  if (mag >= 1e-3 && mag < 1e7) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::fixed);
    (void)ec;
    return std::string(buf, end);
  }
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::scientific);
  (void)ec;
  std::string out(buf, end);
  // 1.5e+20 -> 1.5E20
  const auto e = out.find('e');
  std::string mant = out.substr(0, e);
  if (mant.find('.') == std::string::npos) mant += ".0";
  int exp = std::stoi(out.substr(e + 1));
  return mant + "E" + std::to_string(exp);
}

std::string display(const Value& v) {
  switch (v.tag) {
    case Value::Tag::Null: return "null";
    case Value::Tag::Int: return std::to_string(v.i);
    case Value::Tag::Double: return format_double(v.d);
    case Value::Tag::Bool: return v.i ? "true" : "false";
    case Value::Tag::Char: {
      if (v.i < 128) return std::string(1, static_cast<char>(v.i));
      return "\\u" + std::to_string(v.i);
    }
    case Value::Tag::Str: return v.s;
    case Value::Tag::Ref: break;
  }
  const Object& o = *v.ref;
  auto join = [](const auto& range, auto&& fmt) {
    std::string out;
    bool first = true;
    for (const auto& x : range) {
      if (!first) out += ", ";
      first = false;
      out += fmt(x);
    }
    return out;
  };
  switch (o.kind) {
    case ObjKind::StringBuilder: return o.text;
    case ObjKind::Map:
      return "{" + join(o.map, [](const auto& kv) { return display(kv.first) + "=" + display(kv.second); }) + "}";
    case ObjKind::Set: return "[" + join(o.set, [](const Value& x) { return display(x); }) + "]";
    case ObjKind::Entry: return display(o.items.at(0)) + "=" + display(o.items.at(1));
    case ObjKind::User: return o.type_name + "@obj";
    default: return "[" + join(o.items, [](const Value& x) { return display(x); }) + "]";
  }
}

}  // namespace slicebench::slicing
