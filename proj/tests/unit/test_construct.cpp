#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "ridgeapprox/construct.hpp"
#include "ridgeapprox/errors.hpp"
#include "ridgeapprox/metrics.hpp"

using namespace ridge;

namespace {

constexpr double kPi = std::numbers::pi;

StratifiedPlan plan_with_masses(std::vector<double> masses) {
  StratifiedPlan plan;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    Stratum st;
    st.id = k;
    st.mass = masses[k];
    plan.strata.push_back(st);
  }
  return plan;
}

std::vector<double> random_masses(CounterRng& rng, std::size_t n) {
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) {
    x = rng.bernoulli(0.2) ? 0.0 : -std::log(1.0 - rng.uniform());
    s += x;
  }
  if (s == 0.0) {
    w[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : w) x /= s;
  return w;
}

}  // namespace

TEST_CASE("build_iid with one term") {
  const auto rep = IntegralRepresentation::exact_sine({1});
  const auto f = TargetFunction::scaled_sine({1});
  const auto c = build_iid(rep, 1, f, 3);
  REQUIRE(c.size() == 1);
  CHECK(c.v == doctest::Approx(rep.scale()));
  CHECK(std::abs(c.terms[0].b) == 1.0);
  CHECK(c.b0 == 0.0);
  CHECK(c.a0[0] == doctest::Approx(0.25));
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(build_iid(rep, 0, f, 3), UsageError);
  CHECK_THROWS_AS(build_iid(rep, 4, TargetFunction::scaled_sine({1, 1}), 3), UsageError);
}

TEST_CASE("constant target via the simplified sampler has no error") {
  const SpectralMeasure c(2, {{{0.0, 0.0}, 1.5, 0.3}});
  const auto f = TargetFunction::from_spectral(c);
  const auto comb = build_iid_simplified(c, 2, 32, f, 1);
  CHECK(comb.size() == 0);
  CHECK(l2_error(f, comb) <= 1e-15);
}

TEST_CASE("build_iid L2 error on the (1,1) sine at m = 256") {
  const auto rep = IntegralRepresentation::exact_sine({1, 1});
  const auto f = TargetFunction::scaled_sine({1, 1});
  double mean = 0.0;
  for (std::uint64_t s = 7; s < 27; ++s) mean += l2_error(f, build_iid(rep, 256, f, s));
  mean /= 20;
  CHECK(mean <= 3.0 * rep.scale() / std::sqrt(256.0));
}

TEST_CASE("build_iid is unbiased at fixed points") {
  const SpectralMeasure m(2, {{{1.0, 2.0}, 0.5, 0.3}, {{-2.5, 1.0}, 0.25, -1.1}});
  for (int s : {2, 3}) {
    const auto rep = IntegralRepresentation::from_spectral(m, s);
    const auto f = TargetFunction::from_spectral(m);
    std::vector<std::vector<double>> xs;
    for (int k = 0; k < 10; ++k) xs.push_back({-0.95 + 0.2 * k, 0.9 - 0.17 * k});
    std::vector<double> sum(10, 0.0), sq(10, 0.0);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto c = build_iid(rep, 16, f, seed);
      for (int k = 0; k < 10; ++k) {
        const double v = eval_combination(c, xs[k]);
        sum[k] += v;
        sq[k] += v * v;
      }
    }
    for (int k = 0; k < 10; ++k) {
      const double mean = sum[k] / 200, var = sq[k] / 200 - mean * mean;
      CHECK(std::abs(mean - f(xs[k])) <= 4 * std::sqrt(var / 200) + 1e-14);
    }
  }
}

TEST_CASE("partition counts") {
  CHECK(ParameterPartition(1, 2, 0.5).stratum_count() == 32);
  CHECK(partition_parameters(1, 2, 0.5).stratum_count() == 32);
  CHECK(ParameterPartition(1, 3, 0.5).stratum_count() == 64);
  CHECK(ParameterPartition(2, 2, 3.5).stratum_count() == 1);
  CHECK(ParameterPartition(2, 2, 3.5).degenerate());
  CHECK_THROWS_AS(ParameterPartition(1, 2, 0.0), UsageError);
  CHECK_THROWS_AS(ParameterPartition(1, 2, -1.0), UsageError);

  // d = 2: M grows like eps^-2
  std::vector<double> ratios;
  for (double eps : {0.5, 0.25, 0.125}) {
    const ParameterPartition p(2, 2, eps);
    CHECK(p.enumerate().size() == p.stratum_count());
    ratios.push_back(static_cast<double>(p.stratum_count()) * eps * eps);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo <= 4.0);
}

TEST_CASE("bins are half-open and ids agree with the enumeration") {
  const ParameterPartition p(1, 2, 0.5);
  CHECK(p.t_bin(0.0) == 0);
  CHECK(p.t_bin(0.125) == 1);
  CHECK(p.t_bin(1.0) == p.t_bins() - 1);
  const auto ids = p.enumerate();
  const std::set<std::uint64_t> all(ids.begin(), ids.end());
  CounterRng rng(4);
  for (int k = 0; k < 1000; ++k) {
    const double t = rng.uniform();
    const std::vector<double> a{rng.rademacher() * 1.0};
    CHECK(all.count(p.locate(rng.rademacher(), t, a)) == 1);
  }
}

TEST_CASE("atoms sharing a stratum are closer than epsilon") {
  CounterRng rng(6);
  for (int order : {2, 3}) {
    for (int dim : {1, 2, 3}) {
      for (double eps : {0.9, 0.4}) {
        const ParameterPartition p(dim, order, eps);
        std::map<std::uint64_t, std::vector<RidgeAtom>> cells;
        for (int k = 0; k < 20000; ++k) {
          RidgeAtom at;
          at.order = order;
          at.sign = rng.rademacher();
          at.t = rng.uniform();
          double l1 = 0.0;
          for (int i = 0; i < dim; ++i) {
            at.a.push_back(2 * rng.uniform() - 1);
            l1 += std::abs(at.a.back());
          }
          for (auto& x : at.a) x /= l1;
          cells[p.locate(at)].push_back(at);
        }
        double worst = 0.0;
        for (const auto& [id, atoms] : cells)
          for (std::size_t i = 0; i + 1 < atoms.size() && i < 30; ++i)
            for (std::size_t j = i + 1; j < atoms.size() && j < 30; ++j)
              worst = std::max(worst, atom_sup_distance(atoms[i], atoms[j]));
        CHECK(worst < eps);
      }
    }
  }
}

TEST_CASE("signed allocation with all mass in one stratum") {
  auto plan = allocate(plan_with_masses({1.0, 0.0, 0.0}), 37, AllocationMode::Signed, 1);
  CHECK(plan.strata[0].allocation == 37);
  CHECK(plan.strata[0].sample_size == 37);
  CHECK(plan.strata[1].allocation == 0);
  CHECK(plan.strata[1].sample_size == 1);
}

TEST_CASE("allocation rejects unnormalized masses") {
  CHECK_THROWS_AS(allocate(plan_with_masses({0.5, 0.4}), 10, AllocationMode::Signed, 1), UsageError);
  CHECK_THROWS_AS(allocate(plan_with_masses({}), 10, AllocationMode::Signed, 1), UsageError);
}

TEST_CASE("randomized rounding has mean m L_k") {
  CounterRng rng(8);
  const auto masses = random_masses(rng, 12);
  const long m = 50;
  std::vector<double> sum(masses.size(), 0.0), sq(masses.size(), 0.0);
  constexpr int runs = 10000;
  for (int r = 0; r < runs; ++r) {
    const auto plan = allocate(plan_with_masses(masses), m, AllocationMode::Signed, 1000 + r);
    for (std::size_t k = 0; k < masses.size(); ++k) {
      sum[k] += plan.strata[k].allocation;
      sq[k] += plan.strata[k].allocation * plan.strata[k].allocation;
    }
  }
  for (std::size_t k = 0; k < masses.size(); ++k) {
    const double mean = sum[k] / runs, var = sq[k] / runs - mean * mean;
    CHECK(std::abs(mean - m * masses[k]) <= 3 * std::sqrt(std::max(var, 0.0) / runs) + 1e-12);
  }
}

TEST_CASE("sample sizes sum to at most m + M") {
  CounterRng rng(9);
  for (int r = 0; r < 100; ++r) {
    const std::size_t M = 1 + rng.below(60);
    const long m = 1 + static_cast<long>(rng.below(500));
    const auto masses = random_masses(rng, M);
    for (auto mode : {AllocationMode::Signed, AllocationMode::Fractional}) {
      const auto plan = allocate(plan_with_masses(masses), m, mode, r);
      CHECK(plan.total_samples() <= m + static_cast<long>(M));
      for (const auto& st : plan.strata) {
        if (mode == AllocationMode::Signed)
          CHECK(st.sample_size == static_cast<long>(st.allocation) + (st.allocation == 0 ? 1 : 0));
        else
          CHECK(st.sample_size == static_cast<long>(std::ceil(st.allocation)));
      }
    }
  }
}

TEST_CASE("exact stratum masses sum to one") {
  const SpectralMeasure m(2, {{{1.0, 2.0}, 0.5, 0.3}, {{-2.5, 1.0}, 0.25, -1.1}});
  for (int s : {2, 3}) {
    const auto rep = IntegralRepresentation::from_spectral(m, s);
    const ParameterPartition p(2, s, 0.3);
    const auto plan = measure_strata(p, rep, MassMode::Exact, 1);
    CHECK(plan.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    const auto est = measure_strata(p, rep, MassMode::Estimated, 1);
    CHECK(est.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.mass_draws >= 100 * p.stratum_count());
    // both estimates of each stratum's mass agree within sampling error
    std::map<std::uint64_t, double> exact;
    for (const auto& st : plan.strata) exact[st.id] = st.mass;
    for (const auto& st : est.strata) {
      REQUIRE(exact.count(st.id) == 1);
      const double se = std::sqrt(exact[st.id] * (1 - exact[st.id]) / est.mass_draws);
      CHECK(std::abs(st.mass - exact[st.id]) <= 5 * se + 1e-12);
    }
  }
}

TEST_CASE("stratified builds respect coefficient and budget bounds") {
  const auto rep = IntegralRepresentation::exact_sine({1, 2});
  const auto f = TargetFunction::scaled_sine({1, 2});
  for (auto mode : {AllocationMode::Signed, AllocationMode::Fractional}) {
    for (auto mass : {MassMode::Exact, MassMode::Estimated}) {
      const long m = 200;
      const double eps = 0.6;
      StratifiedOptions opt;
      opt.mass_mode = mass;
      const auto b = build_stratified_detailed(rep, m, eps, mode, f, 5, opt);
      const auto M = static_cast<long>(ParameterPartition(2, 2, eps).stratum_count());
      CHECK(static_cast<long>(b.combination.size()) <= m + M);
      CHECK_NOTHROW(b.combination.validate());
      for (const auto& t : b.combination.terms) {
        CHECK(std::abs(t.b) <= 1.0);
        CHECK(t.atom.l1_norm() == doctest::Approx(1.0).epsilon(1e-15));
        if (mode == AllocationMode::Signed) CHECK(std::abs(t.b) == 1.0);
      }
      // within-stratum spread at a fixed point is below eps^2
      const std::vector<double> x{0.3, -0.6};
      for (std::size_t k = 0; k < b.stratum_terms.size(); ++k) {
        const auto& idx = b.stratum_terms[k];
        if (idx.size() < 2) continue;
        double mean = 0.0, sq = 0.0;
        for (auto i : idx) {
          const double v = eval_atom(b.combination.terms[i].atom, x);
          mean += v;
          sq += v * v;
        }
        mean /= idx.size();
        CHECK(sq / idx.size() - mean * mean <= eps * eps);
        if (mode == AllocationMode::Fractional) {
          const auto& st = b.plan.strata[k];
          CHECK(std::abs(b.combination.terms[idx[0]].b) == doctest::Approx(st.allocation / st.sample_size));
        }
      }
    }
  }
}

TEST_CASE("degenerate partition reduces to i.i.d. sampling") {
  const auto rep = IntegralRepresentation::exact_sine({1});
  const auto f = TargetFunction::scaled_sine({1});
  const auto b = build_stratified_detailed(rep, 64, 3.5, AllocationMode::Signed, f, 2);
  CHECK(b.plan.stratum_count() == 1);
  CHECK(b.combination.size() == 64);
  CHECK(b.combination.v == doctest::Approx(rep.scale()));
  CHECK(b.combination.outer_factor() == doctest::Approx(1.0 / 64));
  CHECK(l2_error(f, b.combination) <= 3.0 / std::sqrt(64.0) * 3);
}

TEST_CASE("stratified sup error beats i.i.d. on the one-dimensional sine") {
  const auto rep = IntegralRepresentation::exact_sine({1});
  const auto f = TargetFunction::scaled_sine({1});
  GridSpec grid;
  grid.resolution = 512;
  for (long m : {64L, 256L, 1024L}) {
    double iid = 0.0, strat = 0.0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
      iid += linf_error(f, build_iid(rep, m, f, s), grid);
      strat += linf_error(f, build_stratified(rep, m, std::pow(m, -1.0 / 3), AllocationMode::Fractional, f, s), grid);
    }
    CHECK(strat < iid);
  }
}

TEST_CASE("estimated masses fail cleanly when the retry budget runs out") {
  const auto rep = IntegralRepresentation::exact_sine({1});
  const auto f = TargetFunction::scaled_sine({1});
  StratifiedOptions opt;
  opt.mass_mode = MassMode::Estimated;
  opt.retry_budget = 0;
  CHECK_THROWS_AS(build_stratified(rep, 30000, 0.5, AllocationMode::Fractional, f, 1, opt), BuildFailure);
  opt.retry_budget = 1'000'000;
  const auto c = build_stratified(rep, 30000, 0.5, AllocationMode::Fractional, f, 1, opt);
  CHECK(c.size() >= 30000);
}

TEST_CASE("default epsilon schedule") {
  CHECK(default_epsilon(64, 1, AllocationMode::Fractional) == doctest::Approx(1.0 / 64));
  CHECK(default_epsilon(64, 2, AllocationMode::Fractional) == doctest::Approx(1.0 / 8));
  CHECK(default_epsilon(64, 4, AllocationMode::Signed) == doctest::Approx(std::pow(64.0, -1.0 / 6)));
}

TEST_CASE("signed basis draws are unbiased") {
  const std::vector<double> a{0.5, -0.2, 0.0, 0.3};
  CounterRng rng(12);
  constexpr int n = 100000;
  std::vector<double> sum(4, 0.0), sq(4, 0.0);
  for (int k = 0; k < n; ++k) {
    const auto [j, s] = draw_signed_basis(a, rng);
    CHECK(a[j] != 0.0);
    CHECK(s == (a[j] < 0 ? -1 : 1));
    sum[j] += s;
    sq[j] += 1.0;
  }
  for (int j = 0; j < 4; ++j) {
    const double mean = sum[j] / n, var = sq[j] / n - mean * mean;
    CHECK(std::abs(mean - a[j]) <= 4 * std::sqrt(var / n) + 1e-15);
  }
}

TEST_CASE("projection of a signed basis draw has variance at most one") {
  CounterRng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(5), x(5);
    double l1 = 0.0;
    for (auto& ai : a) {
      ai = 2 * rng.uniform() - 1;
      l1 += std::abs(ai);
    }
    for (auto& ai : a) ai /= l1;
    for (auto& xi : x) xi = 2 * rng.uniform() - 1;
    double mean = 0.0, sq = 0.0;
    for (int k = 0; k < 20000; ++k) {
      const auto [j, s] = draw_signed_basis(a, rng);
      const double v = s * x[j];
      mean += v;
      sq += v * v;
    }
    mean /= 20000;
    CHECK(sq / 20000 - mean * mean <= 1.0);
  }
}

TEST_CASE("sparsify contract") {
  const SpectralMeasure m(3, {{{1.0, -2.0, 0.5}, 0.5, 0.3}, {{0.1, 0.7, 4.0}, 0.2, -3.0}});
  const auto rep = IntegralRepresentation::from_spectral(m, 3);
  const auto f = TargetFunction::from_spectral(m);
  const auto dense = build_iid(rep, 100, f, 3);
  for (int m0 : {1, 2, 4, 64}) {
    const auto sparse = sparsify(dense, {m0, 17});
    REQUIRE(sparse.size() == dense.size());
    CHECK(sparse.v == dense.v);
    CHECK(sparse.b0 == dense.b0);
    CHECK(sparse.a0 == dense.a0);
    CHECK(sparse.A0 == dense.A0);
    for (std::size_t k = 0; k < sparse.size(); ++k) {
      const auto& t = sparse.terms[k];
      CHECK(t.atom.nonzeros() <= static_cast<std::size_t>(m0));
      CHECK(t.atom.l1_norm() == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(t.atom.t == dense.terms[k].atom.t);
      CHECK(t.atom.sign == dense.terms[k].atom.sign);
      CHECK(t.b == dense.terms[k].b);
      for (std::size_t j = 0; j < 3; ++j)
        if (t.atom.a[j] != 0.0) CHECK((t.atom.a[j] > 0) == (dense.terms[k].atom.a[j] > 0));
    }
  }
  auto bad = dense;
  bad.terms[0].atom.a[0] *= 0.5;
  CHECK_THROWS_AS(sparsify(bad, {4, 1}), UsageError);
  CHECK_THROWS_AS(sparsify(dense, {0, 1}), UsageError);
}

TEST_CASE("sparsify leaves 1-sparse vectors alone") {
  const auto rep = IntegralRepresentation::exact_sine({3});
  const auto f = TargetFunction::scaled_sine({3});
  const auto dense = build_iid(rep, 50, f, 4);
  const auto sparse = build_sparse(rep, 50, 1, f, 4);
  REQUIRE(sparse.size() == dense.size());
  for (std::size_t k = 0; k < dense.size(); ++k) CHECK(sparse.terms[k].atom.a == dense.terms[k].atom.a);
}

TEST_CASE("sparse build meets the two-term bound at m0 = 16") {
  const auto meas = scaled_sine_measure({1, 2, 1});
  const auto rep = IntegralRepresentation::from_spectral(meas, 3);
  const auto f = TargetFunction::from_spectral(meas);
  const double v = rep.scale() / 2;  // the combination's v/(2m) factor in v/m form
  double mse = 0.0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const double e = l2_error(f, build_sparse(rep, 256, 16, f, s));
    mse += e * e;
  }
  mse /= 20;
  CHECK(mse <= 4 * v * v * (1.0 / 256 + 1.0 / 256));
}
