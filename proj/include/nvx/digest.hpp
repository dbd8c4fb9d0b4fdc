#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace nvx {

// 64-bit FNV-1a. The comparison token for syscall argument/result matching.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x00000100000001B3ULL;
  }
  return h;
}

inline std::uint64_t digest_args(std::string_view bytes) { return fnv1a64(bytes); }

// Sanitizer reports are modeled as write syscalls whose payload carries this
// reserved prefix; divergence detection stays purely digest-based.
inline constexpr std::uint64_t kReportWriteSyscall = 1;
inline constexpr std::uint64_t kReportWriteCost = 1;

inline std::uint64_t report_digest(const std::string& unit_id) {
  return fnv1a64("report:" + unit_id);
}

std::string to_hex16(std::uint64_t value);

}  // namespace nvx
