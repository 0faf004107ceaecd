#pragma once

#include <string>
#include <vector>

namespace berglab::report {

// One verified inequality: a computed quantity against a bound, with the
// slack signed so that "more positive" is always the safe direction.
struct BoundReport {
  std::string quantity;
  double computed = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - computed (upper) or computed - bound (lower)
  bool pass = false;   // slack >= -1e-9 * |bound|
  std::string note;

  static BoundReport upper(std::string quantity, double computed, double bound,
                           std::string note = "");
  static BoundReport lower(std::string quantity, double computed, double bound,
                           std::string note = "");
};

bool all_pass(const std::vector<BoundReport>& reports);

// 17 significant digits — round-trips every double exactly
std::string format_g17(double x);

// CSV with one header line and deterministically ordered rows. Rows compare
// cell by cell, numerically when both cells parse as numbers, so "k=8" rows
// precede "k=16" regardless of the order cases finished in.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  void sort_rows();
  std::string to_string() const;  // header + rows, '\n' line endings
  void write(const std::string& path);  // sorts, then writes atomically-ish
};

// standard trailing cells for a BoundReport inside a subcommand CSV
std::vector<std::string> bound_report_cells(const BoundReport& r);
inline std::vector<std::string> bound_report_columns() {
  return {"quantity", "computed", "bound", "slack", "pass", "note"};
}

}  // namespace berglab::report
