#pragma once

// Periodic spectral discretization of R^d.
//
// Transform convention: coefficients approximate the continuum transform
//   F(xi) = \int f(x) exp(-i xi.x) dx
// by the rectangle rule with weight (L/n)^d, and the inverse is the Fourier
// series f(x) = L^{-d} sum_xi F(xi) exp(i xi.x). Band-limited continuum
// transforms are therefore matched exactly.
//
// Storage is a dense n^d array in row-major order (axis 0 slowest); index k
// on each axis maps to the signed wavenumber index wrap(k) in
// {-n/2, ..., n/2-1} and xi_j = 2 pi wrap(k_j) / L.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace kslab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kMaxDim = 4;

struct GridSpec {
  int d = 2;
  int n = 64;
  double box_length = 20.0 * kPi;
  double dealias_fraction = 2.0 / 3.0;

  // Throws ConfigError when the invariants do not hold.
  void validate() const;

  std::size_t size() const;
  double spacing() const { return box_length / n; }
  double volume() const;
  double cell_volume() const;
  double max_wavenumber() const;
  double fundamental() const { return 2.0 * kPi / box_length; }
  int dealias_cutoff() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Default box: 20 pi for d = 2, 8 pi otherwise.
GridSpec default_grid(int d, int n);

inline int wrap_index(int k, int n) { return k < n / 2 ? k : k - n; }

// Physical node coordinate on one axis, centered so the origin is node 0.
inline double node_coordinate(const GridSpec& g, int k) {
  return wrap_index(k, g.n) * g.spacing();
}

// Per-grid wavenumber tables, built once and shared.
struct WaveTable {
  std::vector<double> ksq;                        // |xi|^2
  std::array<std::vector<double>, kMaxDim> kvec;  // xi_j, Nyquist index zeroed
  std::vector<std::uint8_t> keep;                 // 1 below the dealias cutoff
  std::vector<std::size_t> mirror;                // flat index of -xi
};

std::shared_ptr<const WaveTable> wave_table(const GridSpec& g);

// Flat index of the mode with signed per-axis indices `wrapped`.
std::size_t mode_index(const GridSpec& g, std::span<const int> wrapped);

struct SpectralField {
  GridSpec grid;
  std::vector<cplx> coeffs;
  double time_tag = 0.0;

  SpectralField() = default;
  explicit SpectralField(const GridSpec& g, double t = 0.0)
      : grid(g), coeffs(g.size()), time_tag(t) {}

  std::size_t size() const { return coeffs.size(); }
  cplx& operator[](std::size_t i) { return coeffs[i]; }
  const cplx& operator[](std::size_t i) const { return coeffs[i]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

struct PhysicalField {
  GridSpec grid;
  std::vector<double> values;

  PhysicalField() = default;
  explicit PhysicalField(const GridSpec& g) : grid(g), values(g.size()) {}
};

SpectralField to_spectral(const PhysicalField& f, double time_tag = 0.0);

// Discards an imaginary residue up to 1e-10 relative to the largest value;
// anything larger raises SymmetryViolation.
PhysicalField from_spectral(const SpectralField& F);

// Zeros every mode with some |wrap(k_j)| > floor(fraction * n / 2).
SpectralField dealias(SpectralField F);
void dealias_in_place(SpectralField& F);

// max |F(-xi) - conj F(xi)| relative to max |F|; 0 for the zero field.
double hermitian_defect(const SpectralField& F);

// Exact heat semigroup e^{t Delta}; the result's time_tag advances by t.
SpectralField heat_flow(const SpectralField& F, double t);

// Throws GridMismatch unless both grids agree.
void require_same_grid(const GridSpec& a, const GridSpec& b);

}  // namespace kslab
