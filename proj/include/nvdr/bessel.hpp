#pragma once

namespace nvdr {

// cylindrical Bessel function of the first kind, order one.
// ascending power series for |x| <= 12, Hankel asymptotic expansion beyond;
// absolute error below 1e-10 on the supported domain |x| <= 100.
double bessel_j1(double x);

}  // namespace nvdr
