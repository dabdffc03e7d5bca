#include "autoreson/csv.hpp"

#include <cstdio>

namespace autoreson {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void csv_write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.put(',');
    out << cells[i];
  }
  out.put('\n');
}

} // namespace autoreson
