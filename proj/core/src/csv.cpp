#include "magloc/csv.hpp"

#include <algorithm>
#include <cmath>

#include "magloc/errors.hpp"

namespace magloc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {
  out_ = std::fopen(path.c_str(), "w");
  if (!out_) throw IoError("cannot open '" + path + "' for writing");
}

CsvWriter::~CsvWriter() {
  if (out_) std::fclose(out_);
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  columns_ = columns.size();
  begin_row();
  for (const auto& c : columns) cell(c);
  end_row();
}

void CsvWriter::begin_row() {
  first_in_row_ = true;
  cells_in_row_ = 0;
}

void CsvWriter::cell(const std::string& s) {
  if (!first_in_row_) std::fputc(',', out_);
  std::fputs(s.c_str(), out_);
  first_in_row_ = false;
  ++cells_in_row_;
}

void CsvWriter::cell(double v) { cell(format_double(v)); }

void CsvWriter::cell(long v) { cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (columns_ > 0 && cells_in_row_ != columns_)
    throw ContractError("schema-mismatch",
                        "row has " + std::to_string(cells_in_row_) + " cells, header has " +
                            std::to_string(columns_));
  std::fputc('\n', out_);
}

void CsvWriter::close() {
  if (out_ && std::fclose(out_) != 0) {
    out_ = nullptr;
    throw IoError("write failure on '" + path_ + "'");
  }
  out_ = nullptr;
}

static double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty())
    throw ContractError("empty-grid", "quartiles of an empty sample");
  std::sort(values.begin(), values.end());
  return {quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
          quantile_sorted(values, 0.75)};
}

double median(std::vector<double> values) { return quartiles(std::move(values)).median; }

}  // namespace magloc
