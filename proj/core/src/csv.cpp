#include "addlab/csv.hpp"

#include <cstdio>

namespace addlab {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::header(std::initializer_list<std::string_view> cols) {
  bool first = true;
  for (auto c : cols) {
    if (!first) out_ << ',';
    out_ << c;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::emit(bool& first, double v) {
  if (!first) out_ << ',';
  out_ << g17(v);
  first = false;
}

void CsvWriter::emit(bool& first, std::uint64_t v) {
  if (!first) out_ << ',';
  out_ << v;
  first = false;
}

void CsvWriter::emit(bool& first, std::int64_t v) {
  if (!first) out_ << ',';
  out_ << v;
  first = false;
}

void CsvWriter::emit(bool& first, std::string_view v) {
  if (!first) out_ << ',';
  out_ << v;
  first = false;
}

}  // namespace addlab
