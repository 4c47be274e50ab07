#pragma once

#include <string>

namespace rdbia {

// Locale-independent "%.12g" rendering used by every CSV writer.
std::string format_g12(double v);

// Verbosity from the RDBIA_LOG environment variable (0 = silent).
int log_level();
void log_line(int level, const std::string& msg);

}  // namespace rdbia
