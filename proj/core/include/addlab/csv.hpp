#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace addlab {

// Floats are printed with 17 significant digits so CSV output is
// bit-reproducible and round-trips through strtod.
std::string g17(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> cols);

  template <typename... Ts>
  void row(const Ts&... values) {
    bool first = true;
    (emit(first, values), ...);
    out_ << '\n';
  }

 private:
  void emit(bool& first, double v);
  void emit(bool& first, std::uint64_t v);
  void emit(bool& first, std::int64_t v);
  void emit(bool& first, int v) { emit(first, static_cast<std::int64_t>(v)); }
  void emit(bool& first, unsigned v) { emit(first, static_cast<std::uint64_t>(v)); }
  void emit(bool& first, std::string_view v);
  void emit(bool& first, const std::string& v) { emit(first, std::string_view(v)); }
  void emit(bool& first, const char* v) { emit(first, std::string_view(v)); }

  std::ostream& out_;
};

}  // namespace addlab
