#pragma once

namespace msacheck {

// Kernels with a data-parallel loop take this switch. Serial is the reference
// path; both must produce bit-identical output.
enum class Execution { Serial, Parallel };

}  // namespace msacheck
