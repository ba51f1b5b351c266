#pragma once

#include <string>

namespace oldroyd {

/// Shortest round-trippable text for a double: printf "%.17g" ('.' decimal).
std::string fmt17(double v);

}  // namespace oldroyd
