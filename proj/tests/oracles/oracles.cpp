#include "oracles.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

namespace oracle {

namespace bq = boost::math::quadrature;
constexpr double pi = 3.14159265358979323846;

double integral_lemma_1f1(double s, double A, double delta) {
  const double c = s * A;
  // Kummer transform keeps the series positive: e^{-c} 1F1(d; d+1; c) = 1F1(1; d+1; -c)
  return std::pow(s, delta) / delta * boost::math::hypergeometric_1F1(1.0, delta + 1.0, -c);
}

namespace {

double sphere_area(int d) { return 2.0 * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0); }

// int_0^inf f(r, |1 - r|) dr. The pieces next to r = 1 are integrated in
// u = |1 - r| so a singularity there keeps full resolution. Below u = 1e-280
// the integrand may overflow; an integrable u^(s-1) with s >= 0.05 loses
// under 1e-12 there.
template <class F>
double radial(F f, double tol) {
  bq::tanh_sinh<double> ts;
  constexpr double u_min = 1e-280;
  const double a = ts.integrate([&](double r) { return f(r, 1.0 - r); }, 0.0, 0.5, tol);
  const double b = ts.integrate([&](double u) { return u < u_min ? 0.0 : f(1.0 - u, u); }, 0.0, 0.5, tol);
  const double c = ts.integrate([&](double u) { return u < u_min ? 0.0 : f(1.0 + u, u); }, 0.0, 1.0, tol);
  auto g = [&](double x) {
    const double r = 1.0 / x;
    return x <= 0.0 || !std::isfinite(r) ? 0.0 : f(r, r - 1.0) * r * r;
  };
  const double e = ts.integrate(g, 0.0, 0.5, tol);
  return a + b + c + e;
}

}  // namespace

double riesz_convolution(double alpha, double beta, int d) {
  // For r > 1 the powers of r are pulled out so nothing overflows near the
  // far end of the mapped tail.
  if (d == 3) {
    // Spherical average of |r w - e|^-beta in closed form.
    const double c = 2.0 - beta;
    const bool log_case = std::abs(c) < 1e-12;
    auto shell = [&](double r, double u) {
      if (r <= 0.0) return 0.0;
      // log(1 +- x) with x = min(r, 1/r), each taken from whichever of r
      // and u carries the digits
      const double x = r < 1.0 ? r : 1.0 / r;
      const double lp = std::log1p(x);
      const double lm = x < 0.5 ? std::log1p(-x) : std::log(u / std::max(r, 1.0));
      const double diff = log_case ? lp - lm : (std::expm1(c * lp) - std::expm1(c * lm)) / c;
      if (r < 1.0) return 2.0 * pi * std::pow(r, 2.0 - alpha) * (diff / r);
      return 2.0 * pi * std::pow(r, 3.0 - alpha - beta) * diff;
    };
    return radial(shell, 1e-10);
  }
  bq::tanh_sinh<double> inner;
  auto ring = [&](double r, double u) {
    if (r <= 0.0) return 0.0;
    // |r w - e|^2 = u^2 (1 + v^2) with v = 2 sqrt(r) sin(th / 2) / u
    auto f = [&](double th) {
      const double v = 2.0 * std::sqrt(r) * std::sin(th / 2.0) / u;
      return std::pow(1.0 + v * v, -beta / 2.0);
    };
    const double I = inner.integrate(f, 0.0, pi, 1e-10);
    return 2.0 * std::exp((1.0 - alpha) * std::log(r) - beta * std::log(u) + std::log(I));
  };
  return radial(ring, 1e-8);
}

double gaussian_lr_norm(double r, int d) {
  bq::exp_sinh<double> es;
  const double I = sphere_area(d) * es.integrate(
      [&](double rho) { return std::exp(-r * rho * rho) * std::pow(rho, d - 1); }, 0.0,
      std::numeric_limits<double>::infinity());
  return std::pow(I, 1.0 / r);
}

double heat_young_constant(double p, double q, int d) {
  const double inv_r = 1.0 + (std::isinf(q) ? 0.0 : 1.0 / q) - 1.0 / p;
  const double r = 1.0 / inv_r;
  bq::exp_sinh<double> es;
  auto g = [&](double rho) {
    return std::pow(std::pow(4.0 * pi, -d / 2.0) * std::exp(-rho * rho / 4.0), r) *
           std::pow(rho, d - 1);
  };
  const double I = sphere_area(d) * es.integrate(g, 0.0, std::numeric_limits<double>::infinity());
  return std::pow(I, inv_r);
}

double besov_pm_constant(double p, int d) {
  const double pp = p / (p - 1.0);
  bq::tanh_sinh<double> ts;
  bq::exp_sinh<double> es;
  auto g = [&](double rho) {
    if (rho <= 0.0 || !std::isfinite(rho)) return 0.0;
    return std::exp(-pp * rho * rho + ((2.0 - d) * pp + d - 1.0) * std::log(rho));
  };
  const double I = sphere_area(d) * (ts.integrate(g, 0.0, 1.0) +
                                     es.integrate(g, 1.0, std::numeric_limits<double>::infinity()));
  return std::pow(2.0 * pi, -d / pp) * std::pow(I, 1.0 / pp);
}

std::vector<Mode> modes_of(const kslab::SpectralField& F, double cutoff) {
  const auto& g = F.grid;
  std::vector<Mode> out;
  for (std::size_t flat = 0; flat < F.size(); ++flat) {
    if (std::abs(F[flat]) <= cutoff) continue;
    Mode m;
    std::size_t rem = flat;
    for (int j = g.d - 1; j >= 0; --j) {
      m.k[j] = kslab::wrap_index(static_cast<int>(rem % g.n), g.n);
      rem /= g.n;
    }
    m.value = F[flat];
    out.push_back(m);
  }
  return out;
}

namespace {

double dot(const kslab::GridSpec& g, const std::array<int, kslab::kMaxDim>& a,
           const std::array<int, kslab::kMaxDim>& b) {
  const double k0 = 2.0 * pi / g.box_length;
  double s = 0.0;
  for (int j = 0; j < g.d; ++j) s += k0 * a[j] * k0 * b[j];
  return s;
}

std::array<int, kslab::kMaxDim> add(const std::array<int, kslab::kMaxDim>& a,
                                    const std::array<int, kslab::kMaxDim>& b) {
  std::array<int, kslab::kMaxDim> c{};
  for (int j = 0; j < kslab::kMaxDim; ++j) c[j] = a[j] + b[j];
  return c;
}

bool retained(const kslab::GridSpec& g, const std::array<int, kslab::kMaxDim>& k) {
  const int cut = static_cast<int>(std::floor(g.dealias_fraction * g.n / 2.0));
  for (int j = 0; j < g.d; ++j) {
    if (std::abs(k[j]) > cut) return false;
  }
  return true;
}

}  // namespace

kslab::SpectralField pp_nonlinearity_by_convolution(const kslab::SpectralField& u,
                                                    const kslab::SpectralField& phi) {
  const auto& g = u.grid;
  kslab::SpectralField N(g);
  const double vol = std::pow(g.box_length, g.d);
  for (const Mode& mu : modes_of(u)) {
    for (const Mode& mp : modes_of(phi)) {
      const auto xi = add(mu.k, mp.k);
      if (!retained(g, xi)) continue;
      const double w = dot(g, xi, mp.k);
      N[kslab::mode_index(g, std::span<const int>(xi.data(), g.d))] += w * mu.value * mp.value / vol;
    }
  }
  return N;
}

cplx linear_kernel(const kslab::SpectralField& u0, const kslab::SpectralField& phi0, double tau,
                   const std::array<int, kslab::kMaxDim>& xi, double t) {
  const auto& g = u0.grid;
  const double vol = std::pow(g.box_length, g.d);
  const double xi2 = dot(g, xi, xi);
  cplx total = 0.0;
  for (const Mode& mu : modes_of(u0)) {
    for (const Mode& mp : modes_of(phi0)) {
      if (add(mu.k, mp.k) != xi) continue;
      const double ku2 = dot(g, mu.k, mu.k), kp2 = dot(g, mp.k, mp.k);
      auto f = [&](double s) {
        return std::exp(-(t - s) * xi2 - s * ku2 - s * kp2 / tau);
      };
      const double I = bq::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 15, 1e-14);
      total += dot(g, xi, mp.k) / vol * mu.value * mp.value * I;
    }
  }
  return total;
}

cplx bilinear_kernel(const kslab::SpectralField& u0, const kslab::SpectralField& v0, double tau,
                     const std::array<int, kslab::kMaxDim>& xi, double t) {
  using GK = bq::gauss_kronrod<double, 31>;
  const auto& g = u0.grid;
  const double vol = std::pow(g.box_length, g.d);
  const double xi2 = dot(g, xi, xi);
  cplx total = 0.0;
  for (const Mode& mu : modes_of(u0)) {
    for (const Mode& mv : modes_of(v0)) {
      if (add(mu.k, mv.k) != xi) continue;
      const double ku2 = dot(g, mu.k, mu.k), kv2 = dot(g, mv.k, mv.k);
      // psi(eta, s) = (1/tau) int_0^s e^{-(s - sigma)|eta|^2/tau} V e^{-sigma |eta|^2} dsigma
      auto psi = [&](double s) {
        if (s <= 0.0) return 0.0;
        auto h = [&](double sig) { return std::exp(-(s - sig) * kv2 / tau - sig * kv2); };
        return GK::integrate(h, 0.0, s, 15, 1e-14) / tau;
      };
      auto f = [&](double s) { return std::exp(-(t - s) * xi2 - s * ku2) * psi(s); };
      const double I = GK::integrate(f, 0.0, t, 15, 1e-13);
      total += dot(g, xi, mv.k) / vol * mu.value * mv.value * I;
    }
  }
  return total;
}

}  // namespace oracle
