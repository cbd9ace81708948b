#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "msacheck/paths.hpp"
#include "test_support.hpp"

using testsupport::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Result cli(const std::vector<std::string>& args) {
  std::string cmd = quote(MSACHECK_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = std::fread(buf.data(), 1, buf.size(), p)) > 0;) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string model = testsupport::sample_model().string();
const std::string statements = testsupport::sample_statements().string();
const fs::path golden = MSACHECK_GOLDEN_DIR;

const std::vector<std::string> bundle_files = {"statements.jsonl", "predictions.jsonl", "attributions.jsonl",
                                               "evidence.jsonl", "reviews.jsonl"};

}  // namespace

TEST_CASE("run reproduces the golden bundle byte for byte", "[cli]") {
  testsupport::TempDir tmp;
  auto r = cli({"--model", model, "run", statements, "-o", tmp.path.string()});
  REQUIRE(r.code == 0);
  auto summary = json::parse(r.out);
  CHECK(summary.at("failures") == 0);
  CHECK(summary.at("state") == "completed");
  for (const auto& f : bundle_files) {
    INFO(f);
    REQUIRE(fs::exists(tmp.path / f));
    CHECK(testsupport::read_file(tmp.path / f) == testsupport::read_file(golden / f));
  }
}

TEST_CASE("export re-emits a bundle unchanged", "[cli]") {
  testsupport::TempDir tmp;
  REQUIRE(cli({"export", golden.string(), "-o", tmp.path.string()}).code == 0);
  for (const auto& f : bundle_files) {
    INFO(f);
    CHECK(testsupport::read_file(tmp.path / f) == testsupport::read_file(golden / f));
  }
}

TEST_CASE("train --synthetic reproduces the sample model", "[cli]") {
  testsupport::TempDir tmp;
  const auto out = (tmp.path / "model.json").string();
  REQUIRE(cli({"--seed", "7", "train", "--synthetic", "500", "--dimension", "65536", "-o", out}).code == 0);
  CHECK(testsupport::read_file(out) == testsupport::read_file(model));
  CHECK(cli({"train", "--synthetic", "10", "--dimension", "1000", "-o", out}).code != 0);
}

TEST_CASE("report reads a bundle", "[cli]") {
  auto r = cli({"report", golden.string(), "--facet", "year", "--json"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j.at("statements") == 3);
  CHECK(j.at("compliance").at("Approval") == 1.0);
  CHECK(cli({"report", golden.string(), "--facet", "colour"}).code != 0);
}

TEST_CASE("single-sentence verbs", "[cli]") {
  auto ev = cli({"evidence", "--sentence", "We plan to audit suppliers.", "--criterion", "C4_RiskMitigation"});
  REQUIRE(ev.code == 0);
  CHECK(json::parse(ev.out).at("status") == "FutureCommitment");

  auto ex = cli({"--model", model, "explain", "--sentence", "The board approved this statement.", "--criterion",
                 "Approval"});
  REQUIRE(ex.code == 0);
  auto a = json::parse(ex.out);
  CHECK(a.at("method") == "exact");
  double sum = a.at("base").get<double>();
  for (const auto& p : a.at("phi")) sum += p.get<double>();
  CHECK(sum == Catch::Approx(a.at("full").get<double>()).margin(1e-9));

  auto pr = cli({"prompt", "--template", "zero_shot/Approval", "--sentence", "The board approved it."});
  REQUIRE(pr.code == 0);
  CHECK(pr.out.find("The board approved it.") != std::string::npos);

  auto ing = cli({"ingest", statements});
  REQUIRE(ing.code == 0);
  CHECK(std::count(ing.out.begin(), ing.out.end(), '\n') == 3);
}

TEST_CASE("plots are SVG", "[cli]") {
  testsupport::TempDir tmp;
  const auto out = (tmp.path / "heat.svg").string();
  REQUIRE(cli({"plot", "attribution", golden.string(), "--statement", "northfield-foods-2021", "--sentence", "2",
               "--criterion", "C3_RiskDescription", "-o", out})
              .code == 0);
  CHECK(testsupport::read_file(out).rfind("<svg", 0) == 0);
}

TEST_CASE("bad invocations fail with a nonzero status", "[cli]") {
  CHECK(cli({}).code != 0);
  CHECK(cli({"frobnicate"}).code != 0);
  CHECK(cli({"run", "/nonexistent.jsonl"}).code != 0);
  CHECK(cli({"evidence", "--sentence", "x", "--criterion", "Nope"}).code != 0);
  CHECK(cli({"--backend", "remote", "--endpoint", "ftp://x", "classify", statements}).code != 0);
}
