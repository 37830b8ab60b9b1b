#include "kslab/initdata.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "kslab/error.hpp"

namespace kslab {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Gaussian: return "Gaussian";
    case Family::BandLimitedDelta: return "BandLimitedDelta";
    case Family::Chandrasekhar: return "Chandrasekhar";
    case Family::RandomSignChanging: return "RandomSignChanging";
    case Family::CosineMode: return "CosineMode";
    case Family::Uniform: return "Uniform";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::Gaussian, Family::BandLimitedDelta, Family::Chandrasekhar,
                   Family::RandomSignChanging, Family::CosineMode, Family::Uniform}) {
    if (to_string(f) == name) return f;
  }
  fail(ErrorKind::ConfigError, "unknown init family '" + std::string(name) + "'");
}

void InitSpec::validate() const {
  std::ostringstream why;
  if (!std::isfinite(amplitude)) {
    why << "init.amplitude must be finite";
  } else if ((family == Family::Gaussian || family == Family::RandomSignChanging) &&
             !(width > 0.0 && std::isfinite(width))) {
    why << "init.width must be positive for " << to_string(family);
  } else if (family == Family::RandomSignChanging && bumps < 1) {
    why << "init.bumps must be positive";
  } else {
    return;
  }
  fail(ErrorKind::ConfigError, why.str());
}

double chandrasekhar_constant(int d) {
  require(d >= 3, ErrorKind::FamilyMismatch, "|x|^-2 is locally integrable only for d >= 3");
  return std::pow(kPi, d / 2.0) * std::pow(2.0, d - 2) * std::tgamma(d / 2.0 - 1.0);
}

namespace {

std::array<int, kMaxDim> unflatten(const GridSpec& g, std::size_t flat) {
  std::array<int, kMaxDim> idx{};
  for (int j = g.d - 1; j >= 0; --j) {
    idx[j] = static_cast<int>(flat % g.n);
    flat /= g.n;
  }
  return idx;
}

// Sum of weighted Gaussian bumps, periodic distance to each center.
PhysicalField bumps(const GridSpec& g, const std::vector<std::array<double, kMaxDim>>& centers,
                    const std::vector<double>& weights, double width) {
  PhysicalField f(g);
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    const auto idx = unflatten(g, flat);
    double v = 0.0;
    for (std::size_t b = 0; b < centers.size(); ++b) {
      double r2 = 0.0;
      for (int j = 0; j < g.d; ++j) {
        double x = node_coordinate(g, idx[j]) - centers[b][j];
        x -= g.box_length * std::round(x / g.box_length);
        r2 += x * x;
      }
      v += weights[b] * std::exp(-r2 / (width * width));
    }
    f.values[flat] = v;
  }
  return f;
}

SpectralField unit_shape(const InitSpec& spec, const GridSpec& g) {
  const auto table = wave_table(g);
  switch (spec.family) {
    case Family::Gaussian:
      return to_spectral(bumps(g, {std::array<double, kMaxDim>{}}, {1.0}, spec.width));

    case Family::BandLimitedDelta: {
      require(g.d == 2, ErrorKind::FamilyMismatch, "BandLimitedDelta is defined for d = 2");
      SpectralField F(g);
      for (std::size_t i = 0; i < F.size(); ++i) F[i] = table->keep[i] ? 1.0 : 0.0;
      return F;
    }

    case Family::Chandrasekhar: {
      require(g.d >= 3, ErrorKind::FamilyMismatch, "Chandrasekhar data needs d >= 3");
      const double c = chandrasekhar_constant(g.d);
      SpectralField F(g);
      for (std::size_t i = 1; i < F.size(); ++i) {
        if (table->keep[i]) F[i] = c * std::pow(table->ksq[i], -(g.d - 2) / 2.0);
      }
      return F;
    }

    case Family::RandomSignChanging: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> pos(-g.box_length / 8.0, g.box_length / 8.0);
      std::uniform_real_distribution<double> weight(0.5, 1.0);
      std::vector<std::array<double, kMaxDim>> centers(spec.bumps);
      std::vector<double> weights(spec.bumps);
      for (int b = 0; b < spec.bumps; ++b) {
        for (int j = 0; j < g.d; ++j) centers[b][j] = pos(rng);
        weights[b] = weight(rng);
      }
      const SpectralField psi = to_spectral(bumps(g, centers, weights, spec.width));
      SpectralField F(g);
      for (std::size_t i = 0; i < F.size(); ++i) F[i] = cplx(0.0, table->kvec[0][i]) * psi[i];
      return F;
    }

    case Family::CosineMode: {
      SpectralField F(g);
      const double half = g.volume() / 2.0;
      const std::array<int, 1> plus{1}, minus{-1};
      F[mode_index(g, plus)] = half;
      F[mode_index(g, minus)] = half;
      return F;
    }

    case Family::Uniform: {
      SpectralField F(g);
      F[0] = g.volume();
      return F;
    }
  }
  return SpectralField(g);
}

}  // namespace

SpectralField make(const InitSpec& spec, const GridSpec& grid) {
  spec.validate();
  grid.validate();
  SpectralField F = unit_shape(spec, grid);
  F *= spec.amplitude;
  return F;
}

}  // namespace kslab
