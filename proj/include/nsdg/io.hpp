#pragma once

#include <string>

namespace nsdg {

// Writes via a temporary file + rename so readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace nsdg
