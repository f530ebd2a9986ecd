#include "trackaudit/digest.hpp"

#include <cstdio>

namespace trackaudit {

std::string digest_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

}  // namespace trackaudit
