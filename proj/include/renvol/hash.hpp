#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace renvol {

/// 64-bit FNV-1a as a 16-digit lowercase hex string.
std::string content_hash(std::string_view bytes);
uint64_t fnv1a(std::string_view bytes);

} // namespace renvol
