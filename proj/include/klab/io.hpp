#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace klab {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// v rounded to the given number of significant decimal digits.
double round_significant(double v, int digits);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

void write_text_file(const std::string& path, const std::string& content);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace klab
