#include <doctest.h>

#include <cmath>
#include <vector>

#include "survx/numerics.hpp"

using namespace survx;

TEST_CASE("sum_kahan is exact where naive summation drifts") {
  std::vector<double> xs;
  xs.push_back(1.0);
  for (int i = 0; i < 1000; ++i) xs.push_back(1e-16);
  // naive left-to-right addition loses every tiny term
  double naive = 0.0;
  for (double x : xs) naive += x;
  CHECK(naive == 1.0);
  CHECK(sum_kahan(xs) == doctest::Approx(1.0 + 1000e-16).epsilon(1e-15));
}

TEST_CASE("mean and sample dispersion") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(xs) == 2.5);
  CHECK(sample_variance(xs) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(sample_sd(xs) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  CHECK(sample_variance(std::vector<double>{7.0}) == 0.0);
}

TEST_CASE("normal distribution helpers match frozen values") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
  CHECK(normal_cdf(2.5) == doctest::Approx(0.9937903346742238).epsilon(1e-14));
  CHECK(normal_logpdf(0.0) == doctest::Approx(-0.9189385332046727).epsilon(1e-15));
  CHECK(normal_logcdf(0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  // deep tail stays finite and matches the asymptotic regime
  CHECK(normal_logcdf(-10.0) == doctest::Approx(-53.23128515051247).epsilon(1e-9));
}

TEST_CASE("nelder_mead minimizes a shifted quadratic") {
  const auto objective = [](std::span<const double> x) {
    const double a = x[0] - 1.5;
    const double b = x[1] + 0.75;
    return 3.0 * a * a + b * b + 0.25 * a * b + 2.0;
  };
  // gradient zero at a = b = 0, i.e. x = (1.5, -0.75), objective value 2
  const std::vector<double> start{0.0, 0.0};
  const NelderMeadResult result = nelder_mead(objective, start);
  CHECK(result.converged);
  CHECK(result.x[0] == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(result.x[1] == doctest::Approx(-0.75).epsilon(1e-4));
  CHECK(result.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("nelder_mead on the Rosenbrock valley") {
  const auto rosenbrock = [](std::span<const double> x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  NelderMeadOptions options;
  options.max_iterations = 20000;
  const NelderMeadResult result =
      nelder_mead(rosenbrock, std::vector<double>{-1.2, 1.0}, options);
  CHECK(result.converged);
  CHECK(result.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(result.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("adaptive_simpson integrates smooth functions to tolerance") {
  CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(adaptive_simpson([](double x) { return std::exp(-0.1 * x); }, 0.0, 72.0) ==
        doctest::Approx(9.992534141916233).epsilon(1e-9));
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, 3.141592653589793) ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("finite differences recover analytic derivatives") {
  const auto f = [](std::span<const double> x) {
    return x[0] * x[0] * x[1] + std::exp(x[1]);
  };
  const std::vector<double> at{1.5, 0.5};
  const std::vector<double> grad = fd_gradient(f, at);
  CHECK(grad[0] == doctest::Approx(2.0 * 1.5 * 0.5).epsilon(1e-6));
  CHECK(grad[1] == doctest::Approx(1.5 * 1.5 + std::exp(0.5)).epsilon(1e-6));
  const std::vector<double> hess = fd_hessian(f, at);
  CHECK(hess[0] == doctest::Approx(1.0).epsilon(1e-4));          // d2/dx2 = 2y
  CHECK(hess[1] == doctest::Approx(3.0).epsilon(1e-4));          // d2/dxdy = 2x
  CHECK(hess[3] == doctest::Approx(std::exp(0.5)).epsilon(1e-4));
}

TEST_CASE("invert_spd inverts a 2x2 and rejects indefinite input") {
  std::vector<double> m{4.0, 1.0, 1.0, 3.0};
  REQUIRE(invert_spd(m, 2));
  // inverse of [[4,1],[1,3]] = [[3,-1],[-1,4]]/11
  CHECK(m[0] == doctest::Approx(3.0 / 11.0).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(-1.0 / 11.0).epsilon(1e-12));
  CHECK(m[3] == doctest::Approx(4.0 / 11.0).epsilon(1e-12));
  std::vector<double> bad{1.0, 5.0, 5.0, 1.0};
  CHECK_FALSE(invert_spd(bad, 2));
}

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("Rng streams are deterministic and independent") {
  Rng a(42, 1), b(42, 1), c(42, 2);
  std::vector<double> ua, ub, uc;
  for (int i = 0; i < 64; ++i) {
    ua.push_back(a.uniform());
    ub.push_back(b.uniform());
    uc.push_back(c.uniform());
  }
  CHECK(ua == ub);
  CHECK(ua != uc);
  for (double u : ua) {
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("Rng normals have roughly standard moments") {
  Rng rng(7, 1);
  std::vector<double> zs;
  for (int i = 0; i < 20000; ++i) zs.push_back(rng.normal());
  CHECK(std::abs(mean(zs)) < 0.03);
  CHECK(sample_sd(zs) == doctest::Approx(1.0).epsilon(0.05));
}
