#include "msacheck/paths.hpp"

#include <cstdlib>

namespace msacheck {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("MSACHECK_DATA_DIR"); env && *env) return env;
  return MSACHECK_DATA_DIR;
}

}  // namespace msacheck
