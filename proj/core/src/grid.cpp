#include "kslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "fft.hpp"
#include "kslab/error.hpp"

namespace kslab {

void GridSpec::validate() const {
  std::ostringstream why;
  if (d < 2 || d > kMaxDim) {
    why << "grid.d must be in [2, " << kMaxDim << "], got " << d;
  } else if (n < 8 || (n & (n - 1)) != 0) {
    why << "grid.n must be a power of two >= 8, got " << n;
  } else if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    why << "grid.box_length must be positive, got " << box_length;
  } else if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    why << "grid.dealias_fraction must be in (0, 1], got " << dealias_fraction;
  } else {
    return;
  }
  fail(ErrorKind::ConfigError, why.str());
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int j = 0; j < d; ++j) s *= static_cast<std::size_t>(n);
  return s;
}

double GridSpec::volume() const { return std::pow(box_length, d); }

double GridSpec::cell_volume() const { return std::pow(spacing(), d); }

double GridSpec::max_wavenumber() const {
  return kPi * n / box_length * std::sqrt(static_cast<double>(d));
}

int GridSpec::dealias_cutoff() const {
  return static_cast<int>(std::floor(dealias_fraction * n / 2.0));
}

GridSpec default_grid(int d, int n) {
  GridSpec g;
  g.d = d;
  g.n = n;
  g.box_length = d == 2 ? 20.0 * kPi : 8.0 * kPi;
  return g;
}

namespace {

std::shared_ptr<const WaveTable> build_table(const GridSpec& g) {
  auto t = std::make_shared<WaveTable>();
  const std::size_t total = g.size();
  const int n = g.n;
  const int cutoff = g.dealias_cutoff();
  const double k0 = g.fundamental();

  t->ksq.assign(total, 0.0);
  t->keep.assign(total, 1);
  t->mirror.assign(total, 0);
  for (int j = 0; j < g.d; ++j) t->kvec[j].assign(total, 0.0);

  std::array<int, kMaxDim> idx{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int j = g.d - 1; j >= 0; --j) {
      idx[j] = static_cast<int>(rem % n);
      rem /= n;
    }
    double ksq = 0.0;
    std::size_t mirror = 0;
    bool keep = true;
    for (int j = 0; j < g.d; ++j) {
      const int w = wrap_index(idx[j], n);
      const double xi = k0 * w;
      ksq += xi * xi;
      t->kvec[j][flat] = (idx[j] == n / 2) ? 0.0 : xi;
      if (std::abs(w) > cutoff) keep = false;
      mirror = mirror * n + static_cast<std::size_t>((n - idx[j]) % n);
    }
    t->ksq[flat] = ksq;
    t->keep[flat] = keep ? 1 : 0;
    t->mirror[flat] = mirror;
  }
  return t;
}

}  // namespace

std::shared_ptr<const WaveTable> wave_table(const GridSpec& g) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, double, double>,
                  std::shared_ptr<const WaveTable>>
      tables;
  const auto key =
      std::make_tuple(g.d, g.n, g.box_length, g.dealias_fraction);
  std::lock_guard lock(mu);
  auto it = tables.find(key);
  if (it != tables.end()) return it->second;
  auto t = build_table(g);
  tables.emplace(key, t);
  return t;
}

std::size_t mode_index(const GridSpec& g, std::span<const int> wrapped) {
  std::size_t flat = 0;
  for (int j = 0; j < g.d; ++j) {
    const int w = j < static_cast<int>(wrapped.size()) ? wrapped[j] : 0;
    const int k = ((w % g.n) + g.n) % g.n;
    flat = flat * g.n + static_cast<std::size_t>(k);
  }
  return flat;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) fail(ErrorKind::GridMismatch, "fields live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(grid, o.grid);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(grid, o.grid);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

SpectralField to_spectral(const PhysicalField& f, double time_tag) {
  const std::size_t total = f.grid.size();
  std::vector<cplx> buf(total);
  for (std::size_t i = 0; i < total; ++i) buf[i] = f.values[i];
  SpectralField F(f.grid, time_tag);
  detail::dft_forward(f.grid, buf.data(), F.coeffs.data());
  F *= f.grid.cell_volume();
  return F;
}

PhysicalField from_spectral(const SpectralField& F) {
  const std::size_t total = F.grid.size();
  std::vector<cplx> buf(total);
  detail::dft_backward(F.grid, F.coeffs.data(), buf.data());
  const double scale = 1.0 / F.grid.volume();

  double max_abs = 0.0;
  double max_imag = 0.0;
  PhysicalField f(F.grid);
  for (std::size_t i = 0; i < total; ++i) {
    const cplx z = buf[i] * scale;
    max_abs = std::max(max_abs, std::abs(z));
    max_imag = std::max(max_imag, std::abs(z.imag()));
    f.values[i] = z.real();
  }
  if (max_imag > 1e-10 * max_abs) {
    std::ostringstream why;
    why << "imaginary residue " << max_imag << " exceeds 1e-10 of " << max_abs;
    fail(ErrorKind::SymmetryViolation, why.str());
  }
  return f;
}

void dealias_in_place(SpectralField& F) {
  const auto table = wave_table(F.grid);
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    if (!table->keep[i]) F.coeffs[i] = 0.0;
  }
}

SpectralField dealias(SpectralField F) {
  dealias_in_place(F);
  return F;
}

double hermitian_defect(const SpectralField& F) {
  const auto table = wave_table(F.grid);
  double max_abs = 0.0;
  double defect = 0.0;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    max_abs = std::max(max_abs, std::abs(F.coeffs[i]));
    defect = std::max(defect,
                      std::abs(F.coeffs[table->mirror[i]] - std::conj(F.coeffs[i])));
  }
  return max_abs > 0.0 ? defect / max_abs : 0.0;
}

SpectralField heat_flow(const SpectralField& F, double t) {
  const auto table = wave_table(F.grid);
  SpectralField out(F.grid, F.time_tag + t);
  for (std::size_t i = 0; i < F.size(); ++i) out[i] = std::exp(-t * table->ksq[i]) * F[i];
  return out;
}

}  // namespace kslab
