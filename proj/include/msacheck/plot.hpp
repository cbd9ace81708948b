#pragma once

#include <string>

#include "msacheck/explain.hpp"
#include "msacheck/metrics.hpp"

namespace msacheck {

// Tokens as boxes shaded by phi: red pushes the prediction up, blue down,
// opacity proportional to |phi| / max |phi|.
std::string attribution_svg(const TokenAttribution& a, const std::string& title = {});

// Reliability diagram: bin mean prediction vs observed positive fraction with
// the diagonal for reference; ECE in the caption.
std::string reliability_svg(const CalibrationReport& r, const std::string& title = {});

}  // namespace msacheck
