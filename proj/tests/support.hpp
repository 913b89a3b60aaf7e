#pragma once

#include "modscat/grid.hpp"

#include <cmath>
#include <random>

namespace modscat::testing {

inline ComplexField gaussian(const Grid1D& g, double amp = 1.0, double width = 1.0, double center = 0.0) {
  return ComplexField::sample(g, [&](double y) {
    const double z = (y - center) / width;
    return cplx(amp * std::exp(-0.5 * z * z), 0.0);
  });
}

/// Smooth random field: a few Gaussian packets with random carrier waves.
inline ComplexField random_smooth(const Grid1D& g, std::mt19937_64& rng, double max_amp = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ComplexField f(g);
  const int packets = 1 + static_cast<int>(rng() % 3);
  for (int p = 0; p < packets; ++p) {
    const double amp = max_amp * (0.1 + 0.9 * u(rng));
    const double w = 0.7 + 1.5 * u(rng);
    const double c = (u(rng) - 0.5) * 0.4 * g.half_length();
    const double k = (u(rng) - 0.5) * 4.0;
    const double th = 6.283185307179586 * u(rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double z = (g.point(i) - c) / w;
      f[i] += std::polar(amp * std::exp(-0.5 * z * z), k * g.point(i) + th);
    }
  }
  return f;
}

inline double max_abs_diff(const ComplexField& a, const ComplexField& b) { return linf_norm(a - b); }

}  // namespace modscat::testing
