#include "ksw/data_dir.hpp"

#include <cstdlib>

namespace ksw {

std::string data_dir() {
  if (const char* env = std::getenv("KSW_DATA_DIR"); env && *env)
    return env;
#ifdef KSW_DEFAULT_DATA_DIR
  return KSW_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

std::string data_file(const std::string& name) {
  return data_dir() + "/" + name;
}

}  // namespace ksw
