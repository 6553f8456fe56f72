#pragma once

#include <string>

namespace ksw {

// Directory holding the shipped data files (family catalog, reference basis,
// report schema). Resolution order: KSW_DATA_DIR environment variable, then
// the build-time default.
std::string data_dir();

std::string data_file(const std::string& name);

}  // namespace ksw
