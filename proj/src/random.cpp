#include "vrjp/random.hpp"

#include <cmath>
#include <stdexcept>

namespace vrjp {

double sample_inverse_gaussian(double mu, double lambda, Rng& rng) {
  if (!(mu > 0.0) || !(lambda > 0.0)) throw std::invalid_argument("inverse Gaussian needs mu > 0, lambda > 0");
  const double z = standard_normal(rng);
  const double y = z * z;
  double x = mu;
  if (y > 0.0) {
    // Smaller root of the MSH quadratic, written without cancellation:
    // x = mu * q / (1 + sqrt(1 + q))^2 with q = 4 lambda / (mu y).
    const double q = 4.0 * lambda / (mu * y);
    const double r = 1.0 + std::sqrt(1.0 + q);
    x = std::isfinite(q) ? mu * q / (r * r) : mu;
  }
  return uniform01(rng) * (mu + x) <= mu ? x : mu * mu / x;
}

}  // namespace vrjp
