#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "kslab/error.hpp"
#include "kslab/grid.hpp"
#include "kslab/snapshot.hpp"

using namespace kslab;

namespace {

PhysicalField random_field(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  PhysicalField f(g);
  for (double& v : f.values) v = N(rng);
  return f;
}

PhysicalField sampled(const GridSpec& g, double (*fn)(const double*, int)) {
  PhysicalField f(g);
  std::array<double, kMaxDim> x{};
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    std::size_t rem = flat;
    for (int j = g.d - 1; j >= 0; --j) {
      x[j] = node_coordinate(g, static_cast<int>(rem % g.n));
      rem /= g.n;
    }
    f.values[flat] = fn(x.data(), g.d);
  }
  return f;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace

TEST(GridSpec, Validation) {
  EXPECT_NO_THROW(default_grid(2, 64).validate());
  for (GridSpec g : {GridSpec{1, 64}, GridSpec{5, 8}, GridSpec{2, 6}, GridSpec{2, 48},
                     GridSpec{2, 64, -1.0}, GridSpec{2, 64, 1.0, 0.0}, GridSpec{2, 64, 1.0, 1.5}}) {
    try {
      g.validate();
      ADD_FAILURE() << "accepted d=" << g.d << " n=" << g.n;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
  }
}

TEST(GridSpec, Derived) {
  const GridSpec g = default_grid(3, 32);
  EXPECT_DOUBLE_EQ(g.box_length, 8.0 * kPi);
  EXPECT_DOUBLE_EQ(default_grid(2, 32).box_length, 20.0 * kPi);
  EXPECT_EQ(g.size(), 32u * 32u * 32u);
  EXPECT_NEAR(g.max_wavenumber(), kPi * 32 / g.box_length * std::sqrt(3.0), 1e-12);
  EXPECT_EQ(default_grid(2, 128).dealias_cutoff(), 42);
}

TEST(Transform, ConstantField) {
  const GridSpec g{2, 16, 5.0};
  PhysicalField f(g);
  for (double& v : f.values) v = 3.0;
  const SpectralField F = to_spectral(f);
  EXPECT_NEAR(F[0].real(), 3.0 * 25.0, 1e-12);
  for (std::size_t i = 1; i < F.size(); ++i) EXPECT_LT(std::abs(F[i]), 1e-12);
}

TEST(Transform, CosineMode) {
  const GridSpec g{2, 16, 7.0};
  PhysicalField f(g);
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    const int k0 = static_cast<int>(flat / g.n);
    f.values[flat] = std::cos(2.0 * kPi * node_coordinate(g, k0) / g.box_length);
  }
  const SpectralField F = to_spectral(f);
  const std::array<int, 2> plus{1, 0}, minus{-1, 0};
  const std::size_t ip = mode_index(g, plus), im = mode_index(g, minus);
  EXPECT_NEAR(F[ip].real(), 49.0 / 2.0, 1e-12);
  EXPECT_NEAR(F[im].real(), 49.0 / 2.0, 1e-12);
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (i != ip && i != im) EXPECT_LT(std::abs(F[i]), 1e-12);
  }
}

TEST(Transform, GaussianZeroMode) {
  const GridSpec g{2, 64, 40.0};
  const auto f = sampled(g, [](const double* x, int d) {
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) r2 += x[j] * x[j];
    return std::exp(-r2);
  });
  EXPECT_NEAR(to_spectral(f)[0].real(), kPi, 1e-8 * kPi);
}

TEST(Transform, ZeroInverse) {
  const GridSpec g{3, 8, 1.0};
  const PhysicalField f = from_spectral(SpectralField(g));
  for (double v : f.values) EXPECT_EQ(v, 0.0);
}

TEST(Transform, RoundTrip) {
  for (int d : {2, 3, 4}) {
    const GridSpec g = default_grid(d, d == 4 ? 8 : 16);
    const PhysicalField f = random_field(g, 11 + d);
    const PhysicalField back = from_spectral(to_spectral(f));
    EXPECT_LE(max_rel(back.values, f.values), 1e-12) << "d=" << d;
  }
}

TEST(Transform, NonHermitianRejected) {
  const GridSpec g{2, 8, 1.0};
  SpectralField F(g);
  const std::array<int, 2> k{1, 2};
  F[mode_index(g, k)] = cplx(1.0, 0.0);
  try {
    from_spectral(F);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SymmetryViolation);
  }
}

TEST(Transform, Parseval) {
  const GridSpec g{2, 32, 3.0};
  const PhysicalField f = random_field(g, 5);
  const SpectralField F = to_spectral(f);
  double phys = 0.0, spec = 0.0;
  for (double v : f.values) phys += v * v * g.cell_volume();
  for (const cplx& c : F.coeffs) spec += std::norm(c);
  spec /= g.volume();
  EXPECT_NEAR(phys, spec, 1e-10 * phys);
}

TEST(Transform, Linearity) {
  const GridSpec g{3, 8, 2.0};
  const PhysicalField f = random_field(g, 1), h = random_field(g, 2);
  PhysicalField c(g);
  for (std::size_t i = 0; i < g.size(); ++i) c.values[i] = 2.5 * f.values[i] - 0.7 * h.values[i];
  const SpectralField lhs = to_spectral(c);
  const SpectralField rhs = 2.5 * to_spectral(f) - (0.7 * to_spectral(h));
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(lhs[i] - rhs[i]));
    scale = std::max(scale, std::abs(rhs[i]));
  }
  EXPECT_LE(err, 1e-12 * scale);
}

TEST(Dealias, CutoffEdge) {
  const GridSpec g{2, 128, 1.0};
  SpectralField F(g);
  const std::array<int, 2> edge{42, 0}, over{43, 0}, top{63, 0};
  F[mode_index(g, edge)] = 1.0;
  F[mode_index(g, over)] = 1.0;
  F[mode_index(g, top)] = 1.0;
  const SpectralField D = dealias(F);
  EXPECT_EQ(D[mode_index(g, edge)], cplx(1.0));
  EXPECT_EQ(D[mode_index(g, over)], cplx(0.0));
  EXPECT_EQ(D[mode_index(g, top)], cplx(0.0));
}

TEST(Dealias, LowModesAndConstantUntouched) {
  const GridSpec g{2, 32, 1.0};
  SpectralField F(g);
  F[0] = 4.0;
  const std::array<int, 2> k{3, -5}, mk{-3, 5};
  F[mode_index(g, k)] = cplx(1.0, 2.0);
  F[mode_index(g, mk)] = cplx(1.0, -2.0);
  const SpectralField D = dealias(F);
  EXPECT_EQ(D.coeffs, F.coeffs);
}

TEST(Dealias, PreservesHermitianSymmetry) {
  const GridSpec g{3, 16, 1.0};
  const SpectralField F = to_spectral(random_field(g, 9));
  EXPECT_LT(hermitian_defect(F), 1e-14);
  EXPECT_LT(hermitian_defect(dealias(F)), 1e-14);
  EXPECT_LT(hermitian_defect(heat_flow(F, 0.01)), 1e-14);
}

TEST(HeatFlow, ExactFactor) {
  const GridSpec g{2, 16, 2.0 * kPi};
  SpectralField F(g, 0.5);
  const std::array<int, 2> k{2, 1}, mk{-2, -1};
  F[mode_index(g, k)] = 3.0;
  F[mode_index(g, mk)] = 3.0;
  const SpectralField H = heat_flow(F, 0.1);
  EXPECT_NEAR(H[mode_index(g, k)].real(), 3.0 * std::exp(-0.5), 1e-14);
  EXPECT_DOUBLE_EQ(H.time_tag, 0.6);
}

TEST(Grid, MismatchDetected) {
  try {
    require_same_grid(GridSpec{2, 16, 1.0}, GridSpec{2, 32, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridMismatch);
  }
}

TEST(Snapshot, RoundTripAndLayout) {
  const GridSpec g{2, 8, 3.5};
  SpectralField F = to_spectral(random_field(g, 3), 0.25);
  std::stringstream ss;
  write_ksf1(ss, F);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4 + 4 + 4 + 8 + 8 + 64 * 16u);
  EXPECT_EQ(bytes.substr(0, 4), "KSF1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 8u);
  double L = 0.0;
  std::memcpy(&L, bytes.data() + 12, 8);
  EXPECT_EQ(L, 3.5);
  const SpectralField back = read_ksf1(ss);
  EXPECT_EQ(back.grid.d, 2);
  EXPECT_EQ(back.grid.n, 8);
  EXPECT_EQ(back.time_tag, 0.25);
  EXPECT_EQ(back.coeffs, F.coeffs);
}

TEST(Snapshot, BadMagic) {
  std::stringstream ss("KSF2garbage");
  try {
    read_ksf1(ss);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}
