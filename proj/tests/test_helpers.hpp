#pragma once

#include <random>

#include "nvdr/hamiltonian.hpp"
#include "nvdr/spin_system.hpp"

namespace nvdr::test {

inline SpinSystemSpec bare_electron(double bz = 1840.0) {
  SpinSystemSpec sys;
  sys.bz_gauss = bz;
  return sys;
}

// single 13C with the -11.3 kHz parallel coupling used throughout the tests
inline SpinSystemSpec one_carbon(double azz_khz = -11.3, double azx_khz = 0.0,
                                 double bz = 1840.0) {
  SpinSystemSpec sys;
  sys.bz_gauss = bz;
  sys.nuclei.push_back({"C1", {azx_khz, 0.0, azz_khz}, false});
  return sys;
}

inline Matrix random_hermitian(int dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + Matrix(a.adjoint()));
}

}  // namespace nvdr::test
