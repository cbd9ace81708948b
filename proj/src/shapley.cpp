#include "msacheck/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/Dense>
#include <omp.h>

#include "msacheck/error.hpp"

namespace msacheck {

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

Coalition from_mask(std::uint64_t mask, std::size_t m) {
  Coalition c(m);
  for (std::size_t i = 0; i < m; ++i) c[i] = (mask >> i) & 1u;
  return c;
}

int thread_bound(const ValueFunction& v) {
  int threads = omp_get_max_threads();
  if (auto cap = v.max_concurrency(); cap > 0) threads = std::min<int>(threads, static_cast<int>(cap));
  return threads;
}

std::vector<double> evaluate_all(const ValueFunction& v, const std::vector<Coalition>& cs,
                                 Execution execution) {
  std::vector<double> out(cs.size());
  const long n = static_cast<long>(cs.size());
  if (execution == Execution::Serial) {
    for (long k = 0; k < n; ++k) out[k] = v.value(cs[k]);
    return out;
  }
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_bound(v))
  for (long k = 0; k < n; ++k) out[k] = v.value(cs[k]);
  return out;
}

}  // namespace

TableGame::TableGame(std::size_t players, std::vector<double> values)
    : players_(players), values_(std::move(values)) {
  if (players >= 63 || values_.size() != (std::size_t{1} << players)) {
    throw Error(ErrorKind::LengthMismatch, "table size must be 2^players");
  }
}

double TableGame::value(const Coalition& s) const {
  if (s.size() != players_) throw Error(ErrorKind::LengthMismatch, "coalition size != players");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < players_; ++i) {
    if (s[i]) mask |= std::uint64_t{1} << i;
  }
  return values_[mask];
}

double shapley_kernel_weight(std::size_t m, std::size_t s) {
  if (m < 2 || s == 0 || s >= m) {
    throw Error(ErrorKind::DomainError, "kernel weight undefined for M=" + std::to_string(m) +
                                            ", s=" + std::to_string(s));
  }
  return static_cast<double>(m - 1) /
         (binomial(m, s) * static_cast<double>(s) * static_cast<double>(m - s));
}

ShapleyValues exact_shapley(const ValueFunction& v, std::size_t limit, Execution execution) {
  const std::size_t m = v.players();
  if (m > limit || m >= 63) {
    throw Error(ErrorKind::TooManyTokens, std::to_string(m) + " players exceed the exact limit of " +
                                              std::to_string(limit));
  }
  const std::uint64_t n = std::uint64_t{1} << m;

  std::vector<double> table(n);
  const long total = static_cast<long>(n);
  if (execution == Execution::Serial) {
    for (long k = 0; k < total; ++k) table[k] = v.value(from_mask(k, m));
  } else {
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_bound(v))
    for (long k = 0; k < total; ++k) table[k] = v.value(from_mask(k, m));
  }

  // |S|! (M-|S|-1)! / M!  ==  1 / (M * C(M-1, |S|))
  std::vector<double> w(m > 0 ? m : 1);
  for (std::size_t s = 0; s < m; ++s) w[s] = 1.0 / (static_cast<double>(m) * binomial(m - 1, s));

  ShapleyValues out;
  out.phi.assign(m, 0.0);
  out.base_value = table[0];
  out.full_value = table[n - 1];
  out.method = AttributionMethod::Exact;
  out.evaluations = n;
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < n; ++mask) {
      if (mask & bit) continue;
      acc += w[std::popcount(mask)] * (table[mask | bit] - table[mask]);
    }
    out.phi[i] = acc;
  }
  return out;
}

ShapleyValues kernel_shap(const ValueFunction& v, std::size_t budget, std::uint64_t seed,
                          Execution execution) {
  const std::size_t m = v.players();
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "kernel SHAP needs at least 2 players");
  if (budget < 2 * m) {
    throw Error(ErrorKind::InvalidArgument, "sample budget must be >= 2M (" + std::to_string(2 * m) + ")");
  }

  std::vector<Coalition> coalitions;
  std::vector<double> weights;

  const bool exhaustive = m < 63 && (std::uint64_t{1} << m) <= budget;
  if (exhaustive) {
    const std::uint64_t n = std::uint64_t{1} << m;
    for (std::uint64_t mask = 1; mask + 1 < n; ++mask) {
      coalitions.push_back(from_mask(mask, m));
      weights.push_back(shapley_kernel_weight(m, std::popcount(mask)));
    }
  } else {
    // Sizes s and M-s are handled together; mass[s] is the kernel mass of one size.
    const std::size_t half = m / 2;
    std::vector<double> mass(m, 0.0);
    for (std::size_t s = 1; s < m; ++s) {
      mass[s] = static_cast<double>(m - 1) / (static_cast<double>(s) * static_cast<double>(m - s));
    }
    auto paired = [&](std::size_t s) { return s != m - s; };
    auto pair_mass = [&](std::size_t s) { return paired(s) ? 2.0 * mass[s] : mass[s]; };

    std::size_t left = budget - 2;
    std::size_t s_next = 1;
    for (; s_next <= half; ++s_next) {
      double rest = 0.0;
      for (std::size_t t = s_next; t <= half; ++t) rest += pair_mass(t);
      const double cap = binomial(m, s_next) * (paired(s_next) ? 2.0 : 1.0);
      if (static_cast<double>(left) * pair_mass(s_next) / rest + 1e-9 < cap) break;
      std::vector<bool> sel(m, false);
      std::fill(sel.begin(), sel.begin() + static_cast<long>(s_next), true);
      // Enumerate all subsets of this size (and their complements).
      std::vector<bool> perm(sel);
      std::sort(perm.begin(), perm.end());
      do {
        Coalition c(perm.begin(), perm.end());
        coalitions.push_back(c);
        weights.push_back(shapley_kernel_weight(m, s_next));
        if (paired(s_next)) {
          c.flip();
          coalitions.push_back(std::move(c));
          weights.push_back(shapley_kernel_weight(m, m - s_next));
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      left -= static_cast<std::size_t>(cap);
    }

    if (s_next <= half && left > 0) {
      // Allocate remaining draws to the open strata by largest remainder.
      double rest = 0.0;
      for (std::size_t t = s_next; t <= half; ++t) rest += pair_mass(t);
      std::vector<std::size_t> alloc(half + 1, 0);
      std::vector<std::pair<double, std::size_t>> remainders;
      std::size_t given = 0;
      // Draw counts are in units of evaluations; paired strata consume two.
      std::vector<double> exact(half + 1, 0.0);
      for (std::size_t t = s_next; t <= half; ++t) {
        exact[t] = static_cast<double>(left) * pair_mass(t) / rest;
        const std::size_t step = paired(t) ? 2 : 1;
        alloc[t] = static_cast<std::size_t>(exact[t] / static_cast<double>(step)) * step;
        given += alloc[t];
        remainders.emplace_back(exact[t] - static_cast<double>(alloc[t]), t);
      }
      std::stable_sort(remainders.begin(), remainders.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      for (const auto& [r, t] : remainders) {
        const std::size_t step = paired(t) ? 2 : 1;
        if (given + step <= left) {
          alloc[t] += step;
          given += step;
        }
      }

      std::mt19937_64 rng(seed);
      std::vector<std::size_t> idx(m);
      for (std::size_t t = s_next; t <= half; ++t) {
        const std::size_t step = paired(t) ? 2 : 1;
        const double cap = binomial(m, t);
        const std::size_t draws =
            static_cast<std::size_t>(std::min(static_cast<double>(alloc[t] / step), cap));
        if (draws == 0) continue;
        std::set<Coalition> seen;
        std::size_t attempts = 0;
        const std::size_t max_attempts = 64 * draws + 1024;
        while (seen.size() < draws && attempts++ < max_attempts) {
          std::iota(idx.begin(), idx.end(), std::size_t{0});
          Coalition c(m, false);
          for (std::size_t k = 0; k < t; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, m - 1);
            std::swap(idx[k], idx[pick(rng)]);
            c[idx[k]] = true;
          }
          seen.insert(std::move(c));
        }
        // Each drawn stratum carries its kernel mass, split evenly over its samples.
        const double w_each = mass[t] / static_cast<double>(seen.size());
        for (const auto& c : seen) {
          coalitions.push_back(c);
          weights.push_back(w_each);
          if (paired(t)) {
            Coalition comp = c;
            comp.flip();
            coalitions.push_back(std::move(comp));
            weights.push_back(mass[m - t] / static_cast<double>(seen.size()));
          }
        }
      }
    }
  }

  // v(empty) and v(all) go through the same evaluator as the interior.
  coalitions.push_back(Coalition(m, false));
  coalitions.push_back(Coalition(m, true));
  const auto values = evaluate_all(v, coalitions, execution);
  const double v0 = values[values.size() - 2];
  const double v1 = values.back();
  const double delta = v1 - v0;

  const std::size_t rows = coalitions.size() - 2;
  const std::size_t cols = m - 1;
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& z = coalitions[r];
    const double sw = std::sqrt(weights[r]);
    const double zm = z[m - 1] ? 1.0 : 0.0;
    for (std::size_t j = 0; j < cols; ++j) a(r, j) = sw * ((z[j] ? 1.0 : 0.0) - zm);
    b(r) = sw * (values[r] - v0 - zm * delta);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (rows < cols || static_cast<std::size_t>(qr.rank()) < cols) {
    throw Error(ErrorKind::SingularSystem, "sampled coalition design is rank deficient; raise the budget");
  }
  const Eigen::VectorXd x = qr.solve(b);

  ShapleyValues out;
  out.phi.resize(m);
  double sum = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    out.phi[j] = x(static_cast<long>(j));
    sum += out.phi[j];
  }
  out.phi[m - 1] = delta - sum;
  out.base_value = v0;
  out.full_value = v1;
  out.method = AttributionMethod::Kernel;
  out.evaluations = coalitions.size();
  return out;
}

}  // namespace msacheck
