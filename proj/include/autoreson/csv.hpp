#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace autoreson {

// Shortest round-trip-exact decimal form (17 significant digits).
std::string csv_number(double v);

// One CSV line: cells joined by ',' and terminated by LF.
void csv_write_row(std::ostream& out, const std::vector<std::string>& cells);

} // namespace autoreson
