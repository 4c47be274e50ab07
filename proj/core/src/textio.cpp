#include "rdbia/textio.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>

namespace rdbia {

std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("RDBIA_LOG");
    return env ? std::atoi(env) : 0;
  }();
  return level;
}

void log_line(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "[rdbia] " << msg << '\n';
}

}  // namespace rdbia
