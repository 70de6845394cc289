#include "nvdr/bessel.hpp"

#include <cmath>
#include <sstream>

#include "nvdr/errors.hpp"

namespace nvdr {

namespace {

// sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!); terms fall below 1e-18 well before
// k = 40 anywhere in |x| <= 12
double j1_series(double x) {
  const double half = 0.5 * x;
  double term = half;
  double sum = term;
  for (int k = 1; k <= 40; ++k) {
    term *= -(half * half) / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

// Hankel expansion: J1(x) = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)],
// chi = x - 3 pi/4, asymptotic series in 1/(8x) with mu = 4
double j1_asymptotic(double x) {
  const double mu = 4.0;
  const double invy = 1.0 / (8.0 * x);

  double p = 1.0, q = 0.0;
  double term = 1.0;
  // a_k = prod_{m odd, m < 2k} (mu - m^2); alternate terms feed P and Q
  for (int k = 1; k <= 20; ++k) {
    const double m = 2.0 * k - 1.0;
    term *= (mu - m * m) * invy / k;
    const double mag = std::abs(term);
    if (k % 2 == 1)
      q += (k % 4 == 1) ? term : -term;
    else
      p += (k % 4 == 2) ? -term : term;
    if (mag < 1e-17) break;
  }

  const double chi = x - 2.356194490192344929;  // 3 pi / 4
  return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j1(double x) {
  if (!(std::abs(x) <= 100.0)) {
    std::ostringstream msg;
    msg << "bessel_j1 argument " << x << " outside the supported domain |x| <= 100";
    throw ConfigError(msg.str());
  }
  const double ax = std::abs(x);
  const double val = (ax <= 12.0) ? j1_series(ax) : j1_asymptotic(ax);
  return x < 0.0 ? -val : val;  // J1 is odd
}

}  // namespace nvdr
