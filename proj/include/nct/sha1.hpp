#pragma once

#include <string>

namespace nct {

// SHA-1 hex digest; used for content-addressing run configurations.
std::string sha1_hex(const std::string& data);

}  // namespace nct
