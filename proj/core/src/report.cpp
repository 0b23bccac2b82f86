#include "l2betti/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace l2betti {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<LedgerRow> sorted_rows(std::vector<LedgerRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const LedgerRow& a, const LedgerRow& b) {
    if (a.level_k != b.level_k) return a.level_k < b.level_k;
    if (a.level_l != b.level_l) return a.level_l < b.level_l;
    if (a.epsilon != b.epsilon) return a.epsilon > b.epsilon;  // descending
    if (a.degree != b.degree) return a.degree < b.degree;
    return a.kind < b.kind;
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<LedgerRow>& rows) {
  out << "degree,level_k,level_l,epsilon,value,kind\n";
  for (const LedgerRow& r : sorted_rows(rows)) {
    out << r.degree << ',' << r.level_k << ',' << r.level_l << ',' << format_value(r.epsilon)
        << ',' << format_value(r.value) << ',' << r.kind << '\n';
  }
}

void write_table(std::ostream& out, const std::vector<LedgerRow>& rows) {
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  out << pad("degree", 7) << pad("level_k", 9) << pad("level_l", 9) << pad("epsilon", 13)
      << pad("value", 17) << pad("kind", 7) << '\n';
  for (const LedgerRow& r : sorted_rows(rows)) {
    out << pad(std::to_string(r.degree), 7) << pad(std::to_string(r.level_k), 9)
        << pad(std::to_string(r.level_l), 9) << pad(format_value(r.epsilon), 13)
        << pad(format_value(r.value), 17) << pad(r.kind, 7) << '\n';
  }
}

} // namespace l2betti
