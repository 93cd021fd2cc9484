#include <doctest.h>

#include "test_data.hpp"
#include "test_util.hpp"
#include "tvsar/gof.hpp"

using namespace tvsar;

namespace {

struct Fitted {
  testdata::SmallPanel sim;
  FitResult f;
  TvFitResult tv;
};

Fitted small_fit(std::uint64_t seed, int m = 2, int t_len = 3) {
  Fitted out{testdata::small_sar_panel(seed, m, t_len), {}, {}};
  const Bandwidth h = rot_bandwidth(out.sim.data.n, out.sim.data.t_len);
  const Stage1Fit s1 =
      stage1_fit(out.sim.data, out.sim.weights, h, KernelSpec{});
  out.f = stage2_fit(out.sim.data, out.sim.spec, s1, h, KernelSpec{});
  out.tv = fit_full_tv(out.sim.data, s1, h, KernelSpec{});
  return out;
}

}  // namespace

TEST_CASE("w statistic arithmetic") {
  CHECK(w_statistic(3.5, 3.5, 7, 4) == 0.0);
  CHECK(w_statistic(2.0, 1.0, 10, 5) == doctest::Approx(25.0));
  CHECK(w_statistic(0.5, 1.0, 10, 5) == doctest::Approx(-12.5));
  CHECK_THROWS_AS(w_statistic(1.0, 0.0, 10, 5), InvalidRss);
  CHECK_THROWS_AS(w_statistic(1.0, -2.0, 10, 5), InvalidRss);
}

TEST_CASE("decide uses a strict threshold") {
  TestResult r;
  r.p_value = 0.204;
  CHECK(decide(r, 0.05) == Decision::FailToReject);
  r.p_value = 0.0;
  CHECK(decide(r, 0.01) == Decision::Reject);
  r.p_value = 0.05;
  CHECK(decide(r, 0.05) == Decision::FailToReject);  // p = alpha exactly
  CHECK_THROWS_AS(decide(r, 0.0), DimensionError);
  CHECK_THROWS_AS(decide(r, 1.0), DimensionError);
}

TEST_CASE("bootstrap is deterministic and worker-count independent") {
  const Fitted ft = small_fit(42);
  TestConfig cfg;
  cfg.n_bootstrap = 24;
  cfg.seed = 1234;

  cfg.parallel = 1;
  const TestResult serial = bootstrap_test(ft.sim.data, ft.sim.spec,
                                           ft.sim.weights, KernelSpec{}, ft.f,
                                           ft.tv, cfg);
  for (int workers : {2, 3, 8}) {
    cfg.parallel = workers;
    const TestResult par = bootstrap_test(ft.sim.data, ft.sim.spec,
                                          ft.sim.weights, KernelSpec{}, ft.f,
                                          ft.tv, cfg);
    CHECK((serial.w_bootstrap - par.w_bootstrap).cwiseAbs().maxCoeff() == 0.0);
    CHECK(serial.p_value == par.p_value);
  }

  // same seed twice: identical vectors
  cfg.parallel = 1;
  const TestResult again = bootstrap_test(ft.sim.data, ft.sim.spec,
                                          ft.sim.weights, KernelSpec{}, ft.f,
                                          ft.tv, cfg);
  CHECK((serial.w_bootstrap - again.w_bootstrap).cwiseAbs().maxCoeff() == 0.0);

  // a different seed gives a different draw
  cfg.seed = 999;
  const TestResult other = bootstrap_test(ft.sim.data, ft.sim.spec,
                                          ft.sim.weights, KernelSpec{}, ft.f,
                                          ft.tv, cfg);
  CHECK((serial.w_bootstrap - other.w_bootstrap).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("p-value is the exact exceedance count") {
  const Fitted ft = small_fit(7);
  TestConfig cfg;
  cfg.n_bootstrap = 50;
  cfg.seed = 5;
  const TestResult r = bootstrap_test(ft.sim.data, ft.sim.spec, ft.sim.weights,
                                      KernelSpec{}, ft.f, ft.tv, cfg);
  REQUIRE(r.w_bootstrap.size() == 50);
  int count = 0;
  for (int j = 0; j < 50; ++j)
    if (r.w_bootstrap(j) >= r.w_observed) ++count;
  CHECK(r.p_value == doctest::Approx(count / 50.0).epsilon(1e-15));
  CHECK(r.p_value >= 0.0);
  CHECK(r.p_value <= 1.0);

  // exceedance counts are monotone non-increasing in the observed statistic
  auto p_at = [&](double w) {
    return static_cast<double>((r.w_bootstrap.array() >= w).count()) / 50.0;
  };
  CHECK(p_at(r.w_observed - 1.0) >= r.p_value);
  CHECK(p_at(r.w_observed + 1.0) <= r.p_value);
}

TEST_CASE("k = 1 gives a degenerate p-value") {
  const Fitted ft = small_fit(3);
  TestConfig cfg;
  cfg.n_bootstrap = 1;
  cfg.seed = 17;
  const TestResult r = bootstrap_test(ft.sim.data, ft.sim.spec, ft.sim.weights,
                                      KernelSpec{}, ft.f, ft.tv, cfg);
  CHECK((r.p_value == 0.0 || r.p_value == 1.0));
}

TEST_CASE("centered residual pool has mean zero") {
  const Fitted ft = small_fit(11);
  Eigen::VectorXd pool = ft.tv.residuals;
  pool.array() -= pool.mean();
  CHECK(std::abs(pool.mean()) < 1e-12);
}
