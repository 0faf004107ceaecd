#include "berglab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace berglab::report {

namespace {

bool passes(double slack, double bound) {
  return slack >= -1e-9 * std::fabs(bound);
}

}  // namespace

BoundReport BoundReport::upper(std::string quantity, double computed,
                               double bound, std::string note) {
  BoundReport r;
  r.quantity = std::move(quantity);
  r.computed = computed;
  r.bound = bound;
  r.slack = bound - computed;
  r.pass = passes(r.slack, bound);
  r.note = std::move(note);
  return r;
}

BoundReport BoundReport::lower(std::string quantity, double computed,
                               double bound, std::string note) {
  BoundReport r;
  r.quantity = std::move(quantity);
  r.computed = computed;
  r.bound = bound;
  r.slack = computed - bound;
  r.pass = passes(r.slack, bound);
  r.note = std::move(note);
  return r;
}

bool all_pass(const std::vector<BoundReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const BoundReport& r) { return r.pass; });
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

// numeric-aware cell comparison: -1 / 0 / +1
int compare_cells(const std::string& a, const std::string& b) {
  const char* pa = a.c_str();
  const char* pb = b.c_str();
  char* enda = nullptr;
  char* endb = nullptr;
  const double va = std::strtod(pa, &enda);
  const double vb = std::strtod(pb, &endb);
  const bool na = enda != pa && *enda == '\0' && !std::isnan(va);
  const bool nb = endb != pb && *endb == '\0' && !std::isnan(vb);
  if (na && nb) {
    if (va < vb) return -1;
    if (va > vb) return 1;
    return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);  // "1" vs "1.0"
  }
  if (na != nb) return na ? -1 : 1;  // numbers before text
  const int c = a.compare(b);
  return c < 0 ? -1 : (c == 0 ? 0 : 1);
}

std::string escape_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw std::logic_error("CsvTable: row width does not match header");
  rows.push_back(std::move(cells));
}

void CsvTable::sort_rows() {
  std::sort(rows.begin(), rows.end(),
            [](const std::vector<std::string>& a,
               const std::vector<std::string>& b) {
              for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
                const int c = compare_cells(a[i], b[i]);
                if (c != 0) return c < 0;
              }
              return a.size() < b.size();
            });
}

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += escape_cell(columns[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += escape_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::string& path) {
  sort_rows();
  std::ofstream out(path, std::ios::binary);  // '\n' endings on every platform
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_string();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> bound_report_cells(const BoundReport& r) {
  return {r.quantity,           format_g17(r.computed), format_g17(r.bound),
          format_g17(r.slack),  r.pass ? "1" : "0",     r.note};
}

}  // namespace berglab::report
