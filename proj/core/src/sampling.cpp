#include "finsler/sampling.hpp"

#include "finsler/errors.hpp"

#include <cmath>
#include <numbers>

namespace finsler {

std::uint64_t Rng::next_u64() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector sample_point(Rng& rng, int dim, double lo, double hi) {
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x(i) = rng.uniform(lo, hi);
  return x;
}

VelocitySample sample_velocity(Rng& rng, const Site& site, int max_tries) {
  const int n = site.dim();
  VelocitySample out;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    Vector z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    const double norm = std::sqrt(z.dot(site.a * z));
    const double scale = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    if (!(norm > 0.0)) {
      ++out.rejections;
      continue;
    }
    const Vector y = z * (scale / norm);
    const double S = std::sqrt(y.dot(site.a * y));
    const double q = std::sqrt(std::max(0.0, y.dot(site.r_dn * y)));
    if (q > kQMinRatio * S) {
      out.y = y;
      return out;
    }
    ++out.rejections;
  }
  throw DomainError("sample_velocity: every draw was collinear with b");
}

}  // namespace finsler
