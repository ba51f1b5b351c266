#include "oldroyd/csv.hpp"

#include <cstdio>

namespace oldroyd {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace oldroyd
