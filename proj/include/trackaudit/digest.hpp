#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace trackaudit {

// 64-bit FNV-1a. Cookie values and message ids are fingerprinted before
// persistence: reports need presence, never content.
inline uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::string_view data);

}  // namespace trackaudit
