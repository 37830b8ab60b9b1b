#pragma once

#include <cstdint>
#include <string_view>

#include "kslab/grid.hpp"

namespace kslab {

enum class Family {
  Gaussian,
  BandLimitedDelta,
  Chandrasekhar,
  RandomSignChanging,
  CosineMode,
  Uniform,
};

std::string_view to_string(Family f);
// Throws ConfigError.
Family parse_family(std::string_view name);

struct InitSpec {
  Family family = Family::Gaussian;
  double amplitude = 1.0;  // M
  double width = 1.0;      // epsilon, Gaussian and RandomSignChanging
  std::uint64_t seed = 0;  // RandomSignChanging
  int bumps = 6;           // RandomSignChanging

  void validate() const;
};

// Gaussian:            M exp(-|x|^2 / eps^2)
// BandLimitedDelta:    coefficient M on every retained mode (d = 2)
// Chandrasekhar:       M c_d |xi|^{2-d} on retained nonzero modes (d >= 3),
//                      the transform of M |x|^-2
// RandomSignChanging:  M d/dx_1 of a seeded sum of Gaussian bumps
// CosineMode:          M cos(2 pi x_1 / L)
// Uniform:             u = M
// Throws FamilyMismatch for an unsupported dimension.
SpectralField make(const InitSpec& spec, const GridSpec& grid);

// Fourier constant of |x|^-2 in R^d: pi^{d/2} 2^{d-2} Gamma(d/2 - 1).
double chandrasekhar_constant(int d);

}  // namespace kslab
