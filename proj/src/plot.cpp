#include "msacheck/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace msacheck {

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

}  // namespace

std::string attribution_svg(const TokenAttribution& a, const std::string& title) {
  constexpr double kCharW = 7.5, kPad = 6.0, kRowH = 28.0, kMaxW = 860.0;
  double scale = 0.0;
  for (double p : a.phi) scale = std::max(scale, std::abs(p));

  std::ostringstream body;
  double x = 10.0, y = 40.0;
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    const double w = kCharW * static_cast<double>(a.tokens[i].size()) + 2 * kPad;
    if (x + w > kMaxW && x > 10.0) {
      x = 10.0;
      y += kRowH + 6.0;
    }
    const double alpha = scale > 0.0 ? std::abs(a.phi[i]) / scale : 0.0;
    const char* fill = a.phi[i] >= 0.0 ? "#d62728" : "#1f77b4";
    body << "<g><title>" << escape(a.tokens[i]) << ": " << num(a.phi[i]) << "</title>"
         << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\""
         << num(kRowH) << "\" rx=\"3\" fill=\"" << fill << "\" fill-opacity=\"" << num(alpha) << "\"/>"
         << "<text x=\"" << num(x + kPad) << "\" y=\"" << num(y + 19) << "\">" << escape(a.tokens[i])
         << "</text></g>\n";
    x += w + 4.0;
  }
  const double height = y + kRowH + 40.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kMaxW + 20) << "\" height=\""
      << num(height) << "\" font-family=\"monospace\" font-size=\"12\">\n";
  svg << "<text x=\"10\" y=\"22\" font-size=\"14\">" << escape(title) << "</text>\n";
  svg << body.str();
  svg << "<text x=\"10\" y=\"" << num(height - 12) << "\">base " << num(a.base_value) << ", output "
      << num(a.full_value) << ", " << to_string(a.method) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string reliability_svg(const CalibrationReport& r, const std::string& title) {
  constexpr double kSize = 360.0, kLeft = 50.0, kTop = 40.0;
  auto px = [&](double v) { return kLeft + v * kSize; };
  auto py = [&](double v) { return kTop + (1.0 - v) * kSize; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kLeft + kSize + 30) << "\" height=\""
      << num(kTop + kSize + 60) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text x=\"" << num(kLeft) << "\" y=\"22\" font-size=\"14\">" << escape(title) << "</text>\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kSize) << "\" height=\""
      << num(kSize) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(1)) << "\" y2=\""
      << num(py(1)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  std::string path;
  for (const auto& b : r.curve) {
    path += (path.empty() ? "M" : " L") + num(px(b.mean_predicted)) + " " + num(py(b.fraction_positive));
  }
  if (!path.empty()) svg << "<path d=\"" << path << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  for (const auto& b : r.curve) {
    svg << "<circle cx=\"" << num(px(b.mean_predicted)) << "\" cy=\"" << num(py(b.fraction_positive))
        << "\" r=\"4\" fill=\"#d62728\"><title>n=" << b.count << "</title></circle>\n";
  }
  svg << "<text x=\"" << num(kLeft) << "\" y=\"" << num(kTop + kSize + 20) << "\">mean predicted probability</text>\n";
  svg << "<text x=\"" << num(kLeft) << "\" y=\"" << num(kTop + kSize + 40) << "\">ECE " << num(r.ece) << ", n="
      << r.samples << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace msacheck
