#pragma once
#include <cstdio>
#include <string>
#include <vector>

namespace magloc {

/// Shortest exact decimal form of a double (17 significant digits), so CSV
/// output is byte-stable and round-trips.
std::string format_double(double v);

/// Line-buffered CSV emitter. All numeric cells go through format_double
/// so identical data produces identical bytes.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void header(const std::vector<std::string>& columns);
  void begin_row();
  void cell(const std::string& s);
  void cell(double v);
  void cell(long v);
  void cell(int v) { cell(static_cast<long>(v)); }
  void end_row();
  void close();

 private:
  std::FILE* out_;
  std::string path_;
  bool first_in_row_ = true;
  std::size_t columns_ = 0;
  std::size_t cells_in_row_ = 0;
};

struct Quartiles {
  double q1, median, q3;
};

/// Linear-interpolation quantiles (index p * (n - 1)) of an unsorted
/// sample. Requires a nonempty input.
Quartiles quartiles(std::vector<double> values);
double median(std::vector<double> values);

}  // namespace magloc
