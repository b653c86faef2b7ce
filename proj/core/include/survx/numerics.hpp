#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace survx {

double sum_kahan(std::span<const double> xs);
double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // n-1 denominator; 0 for n < 2
double sample_sd(std::span<const double> xs);

/// Standard normal CDF via erfc; accurate to well below 1e-12 across the
/// usable double range.
double normal_cdf(double z);
double normal_logpdf(double z);
/// log Phi(z); returns -inf once erfc underflows (z < about -38).
double normal_logcdf(double z);

struct NelderMeadOptions {
  int max_iterations = 2000;
  double simplex_tolerance = 1e-8;  // max vertex spread, per coordinate
  double initial_step = 0.25;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Derivative-free simplex minimizer.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start,
                             const NelderMeadOptions& options = {});

/// Adaptive Simpson quadrature with an absolute error target.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-8);

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x, double step_scale = 1e-5);
/// Dense row-major Hessian by central second differences.
std::vector<double> fd_hessian(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> x, double step_scale = 1e-4);

/// Inverts a small (dim <= 2) symmetric matrix in place. Returns false if the
/// matrix is not positive definite.
bool invert_spd(std::vector<double>& matrix, int dim);

std::uint64_t fnv1a(std::string_view text);

/// Deterministic RNG stream. The normal sampler is a hand-rolled Box-Muller so
/// seeded output is bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double uniform();              // (0, 1)
  double normal();               // standard normal
  std::uint64_t integer();       // raw 64 bits

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace survx
