#include "comex/kv_text.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace comex::kv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::string out = std::signbit(v) ? "-0x" : "0x";
  auto res = std::to_chars(buf, buf + sizeof(buf), std::fabs(v), std::chars_format::hex);
  out.append(buf, res.ptr);
  return out;
}

double parse_real(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) throw std::runtime_error("empty real value");
  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    pos = 1;
  }
  if (s.compare(pos, std::string::npos, "inf") == 0) return negative ? -INFINITY : INFINITY;
  if (s.compare(pos, std::string::npos, "nan") == 0) return NAN;
  auto fmt = std::chars_format::general;
  if (s.size() > pos + 1 && s[pos] == '0' && (s[pos + 1] == 'x' || s[pos + 1] == 'X')) {
    fmt = std::chars_format::hex;
    pos += 2;
  }
  double v = 0.0;
  const char* first = s.data() + pos;
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, v, fmt);
  if (res.ec != std::errc{} || res.ptr != last) throw std::runtime_error("malformed real '" + raw + "'");
  return negative ? -v : v;
}

std::string format_reals(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(' ');
    out += format_real(values[i]);
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(parse_real(tok));
  return out;
}

void Document::set(const std::string& key, std::string value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = std::move(value);
}

const std::string& Document::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("missing key '" + key + "'");
  return it->second;
}

double Document::get_real(const std::string& key) const {
  try {
    return parse_real(get(key));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("key '" + key + "': " + e.what());
  }
}

long long Document::get_int(const std::string& key) const {
  const std::string& s = get(key);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("key '" + key + "': malformed integer '" + s + "'");
  }
  return v;
}

std::vector<double> Document::get_reals(const std::string& key) const {
  try {
    return parse_reals(get(key));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("key '" + key + "': " + e.what());
  }
}

void Document::write(std::ostream& os) const {
  for (const auto& k : order_) os << k << " = " << values_.at(k) << '\n';
}

Document Document::read(std::istream& is) {
  Document doc;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    doc.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return doc;
}

}  // namespace comex::kv
