#pragma once

#include <cstdint>
#include <string>

namespace chanest {

/** SHA-256 of a byte buffer, lowercase hex. */
std::string sha256_hex(const void* data, std::size_t len);

/** SHA-256 of a file's contents, lowercase hex. Throws if unreadable. */
std::string sha256_file(const std::string& path);

}  // namespace chanest
