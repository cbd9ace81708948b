#include "msacheck/mapping.hpp"

#include <fstream>
#include <sstream>

#include "msacheck/error.hpp"
#include "msacheck/paths.hpp"

namespace msacheck {

std::string_view to_string(AlignmentStatus s) {
  switch (s) {
    case AlignmentStatus::Perfect: return "Perfect";
    case AlignmentStatus::Partial: return "Partial";
    case AlignmentStatus::None: return "None";
  }
  return "?";
}

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

AlignmentStatus parse_status(const std::string& s, std::size_t line_no) {
  if (s == "Perfect") return AlignmentStatus::Perfect;
  if (s == "Partial") return AlignmentStatus::Partial;
  if (s == "None") return AlignmentStatus::None;
  throw Error(ErrorKind::MalformedInput,
              "line " + std::to_string(line_no) + ": unknown status '" + s + "'");
}

std::string pair_name(Jurisdiction a, Jurisdiction b) {
  return std::string(to_string(a)) + "-" + std::string(to_string(b));
}

}  // namespace

JurisdictionMap parse_mapping(std::string_view document) {
  JurisdictionMap map;
  std::vector<std::string> duplicates;
  std::istringstream in{std::string(document)};
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with("#msacheck-mapping v")) {
      map.version_ = std::stoi(line.substr(19));
      saw_header = true;
      continue;
    }
    if (line.front() == '#') continue;

    auto f = split_tabs(line);
    auto bad = [&](const std::string& why) {
      return Error(ErrorKind::MalformedInput, "line " + std::to_string(line_no) + ": " + why);
    };
    if (f[0] == "align") {
      if (f.size() != 7) throw bad("align record needs 7 fields");
      auto c = parse_criterion(f[1]);
      auto s = parse_jurisdiction(f[2]);
      auto t = parse_jurisdiction(f[3]);
      if (!c || !s || !t) throw bad("unknown criterion or jurisdiction");
      if (*s == *t) throw bad("identity pairs are implicit");
      Alignment a{*c, *s, *t, parse_status(f[4], line_no), f[5], f[6]};
      if (*t < *s) {
        std::swap(a.source, a.target);
        std::swap(a.source_citation, a.target_citation);
      }
      auto key = std::make_pair(*c, std::make_pair(a.source, a.target));
      if (!map.cells_.emplace(key, std::move(a)).second) {
        duplicates.push_back(std::string(to_string(*c)) + " " + pair_name(key.second.first,
                                                                         key.second.second));
      }
    } else if (f[0] == "excluded") {
      if (f.size() != 4) throw bad("excluded record needs 4 fields");
      auto j = parse_jurisdiction(f[1]);
      if (!j) throw bad("unknown jurisdiction");
      map.excluded_.push_back({*j, f[2], f[3], AlignmentStatus::None});
    } else {
      throw bad("unknown record type '" + f[0] + "'");
    }
  }
  if (!saw_header) throw Error(ErrorKind::MalformedInput, "missing '#msacheck-mapping v<N>' header");

  std::vector<std::string> missing;
  for (auto c : kCriteria) {
    for (std::size_t a = 0; a < kJurisdictions.size(); ++a) {
      for (std::size_t b = a + 1; b < kJurisdictions.size(); ++b) {
        auto key = std::make_pair(c, std::make_pair(kJurisdictions[a], kJurisdictions[b]));
        if (!map.cells_.contains(key)) {
          missing.push_back(std::string(to_string(c)) + " " +
                            pair_name(kJurisdictions[a], kJurisdictions[b]));
        }
      }
    }
  }
  if (!missing.empty() || !duplicates.empty()) {
    std::string msg;
    if (!missing.empty()) {
      msg += "missing cells:";
      for (auto& m : missing) msg += " [" + m + "]";
    }
    if (!duplicates.empty()) {
      if (!msg.empty()) msg += "; ";
      msg += "duplicate cells:";
      for (auto& d : duplicates) msg += " [" + d + "]";
    }
    throw Error(ErrorKind::IncompleteMapping, msg);
  }
  return map;
}

JurisdictionMap load_mapping(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open mapping file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_mapping(ss.str());
}

JurisdictionMap load_default_mapping() { return load_mapping(data_dir() / "mapping.tsv"); }

Alignment JurisdictionMap::alignment_status(Criterion c, Jurisdiction source,
                                            Jurisdiction target) const {
  if (source == target) {
    // Any stored cell touching `source` carries its citation text.
    std::string citation;
    for (const auto& [key, a] : cells_) {
      if (key.first != c) continue;
      if (a.source == source) citation = a.source_citation;
      else if (a.target == source) citation = a.target_citation;
      if (!citation.empty()) break;
    }
    return {c, source, target, AlignmentStatus::Perfect, citation, citation};
  }
  const bool flipped = target < source;
  auto key = std::make_pair(c, flipped ? std::make_pair(target, source)
                                       : std::make_pair(source, target));
  auto it = cells_.find(key);
  if (it == cells_.end()) {
    throw Error(ErrorKind::IncompleteMapping, "no cell for " + std::string(to_string(c)));
  }
  Alignment a = it->second;
  if (flipped) {
    std::swap(a.source, a.target);
    std::swap(a.source_citation, a.target_citation);
  }
  return a;
}

std::vector<Criterion> criteria_for(Jurisdiction) {
  return {kCriteria.begin(), kCriteria.end()};
}

}  // namespace msacheck
