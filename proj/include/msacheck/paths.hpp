#pragma once

#include <filesystem>

namespace msacheck {

// Directory holding the bundled data assets (mapping, cue lexicons, prompt
// templates, sample statements). MSACHECK_DATA_DIR in the environment
// overrides the compiled-in location.
std::filesystem::path data_dir();

}  // namespace msacheck
