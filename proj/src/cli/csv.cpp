#include "cli/csv.hpp"

#include <cmath>
#include <cstdio>

namespace itwa::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  // Locale-independent: the "C" locale is never changed by this program.
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

}  // namespace itwa::cli
