#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>

#include "msacheck/error.hpp"
#include "msacheck/shapley.hpp"

using namespace msacheck;

namespace {

// Average marginal contribution over all M! orderings.
std::vector<double> permutation_oracle(std::size_t m, const std::vector<double>& table) {
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(m, 0.0);
  double perms = 0;
  do {
    std::size_t mask = 0;
    for (auto p : order) {
      const std::size_t next = mask | (std::size_t{1} << p);
      phi[p] += table[next] - table[mask];
      mask = next;
    }
    ++perms;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& x : phi) x /= perms;
  return phi;
}

std::vector<double> random_table(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> t(std::size_t{1} << m);
  for (double& x : t) x = u(rng);
  return t;
}

FunctionGame additive(std::vector<double> w, double base) {
  const std::size_t m = w.size();
  return FunctionGame(m, [w = std::move(w), base](const Coalition& s) {
    double v = base;
    for (std::size_t i = 0; i < s.size(); ++i) v += s[i] ? w[i] : 0.0;
    return v;
  });
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("kernel weights", "[shapley]") {
  CHECK(shapley_kernel_weight(4, 1) == Catch::Approx(0.25).epsilon(1e-15));
  CHECK(shapley_kernel_weight(4, 2) == Catch::Approx(0.125).epsilon(1e-15));
  CHECK(shapley_kernel_weight(2, 1) == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(shapley_kernel_weight(10, 3) == Catch::Approx(9.0 / (120.0 * 3 * 7)));
  CHECK(shapley_kernel_weight(7, 2) == shapley_kernel_weight(7, 5));
  CHECK_THROWS_AS(shapley_kernel_weight(4, 0), Error);
  CHECK_THROWS_AS(shapley_kernel_weight(4, 4), Error);
  CHECK_THROWS_AS(shapley_kernel_weight(1, 1), Error);
}

TEST_CASE("linear two-player game", "[shapley]") {
  auto v = additive({0.3, 0.2}, 0.1);
  auto ex = exact_shapley(v);
  CHECK(ex.phi[0] == Catch::Approx(0.3).margin(1e-15));
  CHECK(ex.phi[1] == Catch::Approx(0.2).margin(1e-15));
  CHECK(ex.base_value == Catch::Approx(0.1));
  CHECK(ex.full_value == Catch::Approx(0.6));
  CHECK(ex.evaluations == 4);
  CHECK(ex.method == AttributionMethod::Exact);

  auto ks = kernel_shap(v, 4, 1);
  CHECK(ks.method == AttributionMethod::Kernel);
  CHECK(ks.evaluations == 4);
  CHECK(ks.phi[0] == Catch::Approx(0.3).margin(1e-6));
  CHECK(ks.phi[1] == Catch::Approx(0.2).margin(1e-6));
}

TEST_CASE("exact enumeration matches the permutation oracle", "[shapley]") {
  std::mt19937_64 rng(5);
  for (std::size_t m = 1; m <= 7; ++m) {
    for (int rep = 0; rep < 5; ++rep) {
      auto table = random_table(rng, m);
      TableGame g(m, table);
      auto ex = exact_shapley(g);
      CHECK(max_abs_diff(ex.phi, permutation_oracle(m, table)) <= 1e-12);
    }
  }
}

TEST_CASE("Shapley axioms on random tables", "[shapley]") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t m = 2 + rng() % 7;
    auto table = random_table(rng, m);
    // Player 0 becomes a dummy; players 1 and 2 (when present) symmetric.
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
      if (mask & 1) table[mask] = table[mask & ~std::size_t{1}];
    }
    if (m >= 3) {
      for (std::size_t mask = 0; mask < table.size(); ++mask) {
        const bool b1 = mask & 2, b2 = mask & 4;
        if (b1 && !b2) table[mask] = table[(mask & ~std::size_t{2}) | 4];
      }
    }
    auto ex = exact_shapley(TableGame(m, table));
    const double total = std::accumulate(ex.phi.begin(), ex.phi.end(), 0.0);
    CHECK(std::abs(total - (table.back() - table.front())) <= 1e-10);
    CHECK(std::abs(ex.phi[0]) <= 1e-12);
    if (m >= 3) CHECK(std::abs(ex.phi[1] - ex.phi[2]) <= 1e-12);
  }
}

TEST_CASE("exhaustive kernel agrees with exact", "[shapley]") {
  std::mt19937_64 rng(23);
  for (std::size_t m = 2; m <= 9; ++m) {
    auto table = random_table(rng, m);
    TableGame g(m, table);
    auto ex = exact_shapley(g);
    auto ks = kernel_shap(g, std::max<std::size_t>(std::size_t{1} << m, 2 * m), 0);
    CHECK(ks.evaluations == (std::size_t{1} << m));
    CHECK(max_abs_diff(ex.phi, ks.phi) <= 1e-9);
    const double total = std::accumulate(ks.phi.begin(), ks.phi.end(), 0.0);
    CHECK(std::abs(total - (ks.full_value - ks.base_value)) <= 1e-12);
  }
}

TEST_CASE("sampled kernel recovers additive games and respects the budget", "[shapley]") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (std::size_t m : {13u, 16u, 20u}) {
    std::vector<double> w(m);
    for (double& x : w) x = u(rng);
    auto g = additive(w, 0.25);
    for (std::size_t budget : {std::size_t{2 * m}, std::size_t{4 * m + 3}, std::size_t{500}}) {
      auto ks = kernel_shap(g, budget, 99);
      CHECK(ks.evaluations <= budget);
      CHECK(max_abs_diff(ks.phi, w) <= 1e-9);
    }
  }
}

TEST_CASE("sampled kernel is efficient and seeded", "[shapley]") {
  std::mt19937_64 rng(41);
  const std::size_t m = 14;
  auto table = random_table(rng, m);
  TableGame g(m, table);
  auto a = kernel_shap(g, 600, 7);
  auto b = kernel_shap(g, 600, 7);
  auto c = kernel_shap(g, 600, 8);
  CHECK(a.phi == b.phi);
  CHECK(a.phi != c.phi);
  const double total = std::accumulate(a.phi.begin(), a.phi.end(), 0.0);
  CHECK(std::abs(total - (table.back() - table.front())) <= 1e-10);

  // Coalitions are distinct, so a budget larger than 2^M still stops at 2^M.
  TableGame small(3, random_table(rng, 3));
  CHECK(kernel_shap(small, 1000, 1).evaluations == 8);
}

TEST_CASE("Serial and Parallel give identical bits", "[shapley]") {
  std::mt19937_64 rng(47);
  for (std::size_t m : {3u, 8u, 11u}) {
    TableGame g(m, random_table(rng, m));
    CHECK(exact_shapley(g, 12, Execution::Serial).phi == exact_shapley(g, 12, Execution::Parallel).phi);
  }
  TableGame big(14, random_table(rng, 14));
  CHECK(kernel_shap(big, 700, 3, Execution::Serial).phi == kernel_shap(big, 700, 3, Execution::Parallel).phi);
}

TEST_CASE("argument errors", "[shapley]") {
  auto kind = [](auto&& f) -> std::optional<ErrorKind> {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return std::nullopt;
  };
  TableGame g13(13, std::vector<double>(std::size_t{1} << 13, 0.0));
  CHECK(kind([&] { exact_shapley(g13); }) == ErrorKind::TooManyTokens);
  CHECK_NOTHROW(exact_shapley(g13, 13));
  TableGame g1(1, {0.0, 1.0});
  CHECK(exact_shapley(g1).phi == std::vector<double>{1.0});
  CHECK(kind([&] { kernel_shap(g1, 10, 0); }) == ErrorKind::InvalidArgument);
  TableGame g4(4, std::vector<double>(16, 0.0));
  CHECK(kind([&] { kernel_shap(g4, 7, 0); }) == ErrorKind::InvalidArgument);
  CHECK_THROWS_AS(TableGame(3, std::vector<double>(7, 0.0)), Error);
}
