#include "survx/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace survx {

double sum_kahan(std::span<const double> xs) {
  double sum = 0.0, carry = 0.0;
  for (double x : xs) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty range");
  return sum_kahan(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0, carry = 0.0;
  for (double x : xs) {
    double d = (x - m) * (x - m) - carry;
    double t = ss + d;
    carry = (t - ss) - d;
    ss = t;
  }
  return ss / static_cast<double>(n - 1);
}

double sample_sd(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_logpdf(double z) {
  constexpr double log_sqrt_2pi = 0.9189385332046727;  // log(sqrt(2*pi))
  return -0.5 * z * z - log_sqrt_2pi;
}

double normal_logcdf(double z) {
  const double p = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  if (p > 0.0) return std::log(p);
  return -std::numeric_limits<double>::infinity();
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead: empty start point");

  using Vertex = std::vector<double>;
  std::vector<Vertex> simplex;
  simplex.reserve(dim + 1);
  simplex.emplace_back(start.begin(), start.end());
  for (std::size_t i = 0; i < dim; ++i) {
    Vertex v(start.begin(), start.end());
    v[i] += options.initial_step * (1.0 + std::abs(v[i]));
    simplex.push_back(std::move(v));
  }

  std::vector<double> fvals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) fvals[i] = objective(simplex[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    std::vector<Vertex> s2(dim + 1);
    std::vector<double> f2(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      s2[i] = simplex[idx[i]];
      f2[i] = fvals[idx[i]];
    }
    simplex = std::move(s2);
    fvals = std::move(f2);
  };

  NelderMeadResult result;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    order();

    double spread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        spread = std::max(spread, std::abs(simplex[i][j] - simplex[0][j]));
      }
    }
    if (spread < options.simplex_tolerance) {
      result.converged = true;
      break;
    }

    // centroid of all but the worst vertex
    Vertex centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend_point = [&](double coef) {
      Vertex v(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        v[j] = centroid[j] + coef * (simplex[dim][j] - centroid[j]);
      }
      return v;
    };

    Vertex reflected = blend_point(-1.0);
    double f_reflected = objective(reflected);
    if (f_reflected < fvals[0]) {
      Vertex expanded = blend_point(-2.0);
      double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        simplex[dim] = std::move(expanded);
        fvals[dim] = f_expanded;
      } else {
        simplex[dim] = std::move(reflected);
        fvals[dim] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fvals[dim - 1]) {
      simplex[dim] = std::move(reflected);
      fvals[dim] = f_reflected;
      continue;
    }

    Vertex contracted = blend_point(f_reflected < fvals[dim] ? -0.5 : 0.5);
    double f_contracted = objective(contracted);
    if (f_contracted < std::min(f_reflected, fvals[dim])) {
      simplex[dim] = std::move(contracted);
      fvals[dim] = f_contracted;
      continue;
    }

    // shrink toward the best vertex
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
      }
      fvals[i] = objective(simplex[i]);
    }
  }

  order();
  result.x = simplex[0];
  result.value = fvals[0];
  result.iterations = iter;
  return result;
}

namespace {

double simpson_rule(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_step(const std::function<double(double)>& f, double a, double b,
                             double fa, double fm, double fb, double whole, double tol,
                             int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(fa, flm, fm, m - a);
  const double right = simpson_rule(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol) {
  if (!(b >= a)) throw std::invalid_argument("adaptive_simpson: b < a");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = simpson_rule(fa, fm, fb, b - a);
  return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, 48);
}

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x, double step_scale) {
  const std::size_t dim = x.size();
  std::vector<double> grad(dim);
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < dim; ++i) {
    const double h = step_scale * (1.0 + std::abs(x[i]));
    const double xi = p[i];
    p[i] = xi + h;
    const double fp = f(p);
    p[i] = xi - h;
    const double fm = f(p);
    p[i] = xi;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

std::vector<double> fd_hessian(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> x, double step_scale) {
  const std::size_t dim = x.size();
  std::vector<double> hess(dim * dim, 0.0);
  std::vector<double> p(x.begin(), x.end());
  std::vector<double> h(dim);
  for (std::size_t i = 0; i < dim; ++i) h[i] = step_scale * (1.0 + std::abs(x[i]));

  const double f0 = f(p);
  for (std::size_t i = 0; i < dim; ++i) {
    const double xi = p[i];
    p[i] = xi + h[i];
    const double fp = f(p);
    p[i] = xi - h[i];
    const double fm = f(p);
    p[i] = xi;
    hess[i * dim + i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double xi = p[i], xj = p[j];
      p[i] = xi + h[i];
      p[j] = xj + h[j];
      const double fpp = f(p);
      p[j] = xj - h[j];
      const double fpm = f(p);
      p[i] = xi - h[i];
      const double fmm = f(p);
      p[j] = xj + h[j];
      const double fmp = f(p);
      p[i] = xi;
      p[j] = xj;
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess[i * dim + j] = v;
      hess[j * dim + i] = v;
    }
  }
  return hess;
}

bool invert_spd(std::vector<double>& matrix, int dim) {
  if (dim == 1) {
    if (!(matrix[0] > 0.0)) return false;
    matrix[0] = 1.0 / matrix[0];
    return true;
  }
  if (dim == 2) {
    const double a = matrix[0], b = matrix[1], c = matrix[2], d = matrix[3];
    const double det = a * d - b * c;
    if (!(a > 0.0) || !(det > 0.0)) return false;
    matrix[0] = d / det;
    matrix[1] = -b / det;
    matrix[2] = -c / det;
    matrix[3] = a / det;
    return true;
  }
  throw std::invalid_argument("invert_spd: only dim <= 2 supported");
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  gen_.seed(seq);
}

double Rng::uniform() {
  // 53-bit mantissa, shifted into (0, 1) so log() is always safe.
  const double u = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  return u;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::integer() { return gen_(); }

}  // namespace survx
