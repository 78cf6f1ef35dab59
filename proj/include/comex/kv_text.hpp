#pragma once

// Flat "key = value" text documents shared by model checkpoints, instance files
// and config files. Reals are written as hex floats (0x1.8p+1) so they
// round-trip bit-exactly; the reader also accepts ordinary decimal notation.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace comex::kv {

std::string format_real(double v);
double parse_real(const std::string& s);

std::string format_reals(std::span<const double> values);
std::vector<double> parse_reals(const std::string& s);

class Document {
 public:
  void set(const std::string& key, std::string value);
  void set_real(const std::string& key, double v) { set(key, format_real(v)); }
  void set_int(const std::string& key, long long v) { set(key, std::to_string(v)); }
  void set_reals(const std::string& key, std::span<const double> v) { set(key, format_reals(v)); }

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  // Throw std::runtime_error naming the key when it is missing or malformed.
  [[nodiscard]] const std::string& get(const std::string& key) const;
  [[nodiscard]] double get_real(const std::string& key) const;
  [[nodiscard]] long long get_int(const std::string& key) const;
  [[nodiscard]] std::vector<double> get_reals(const std::string& key) const;

  void write(std::ostream& os) const;
  static Document read(std::istream& is);

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

}  // namespace comex::kv
