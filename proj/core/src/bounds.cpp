#include "kslab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "kslab/error.hpp"
#include "kslab/grid.hpp"

namespace kslab {

void BoundCertificate::settle() { passed = std::isfinite(worst_ratio) && worst_ratio <= 1.0 + tol; }

nlohmann::json BoundCertificate::to_json() const {
  return {{"lemma_id", lemma_id}, {"samples", samples}, {"worst_ratio", worst_ratio},
          {"tol", tol},           {"passed", passed},   {"details", details}};
}

bool admissible(double a, double b, int d) {
  if (!(b > 0.0 && b <= 1.0)) return false;
  if (d >= 3) return d - 2.0 * b <= a && a < d - b && a != 1.0;
  if (d == 2) return 1.5 - b < a && a < 2.0 - b && 2.0 - 2.0 * b <= a;
  return false;
}

ThresholdParams ThresholdParams::make(int d, double tau, double b, double kappa_hat,
                                      double kappa_tilde_hat, AChoice choice) {
  ThresholdParams p;
  p.d = d;
  p.tau = tau;
  p.b = b;
  p.kappa_hat = kappa_hat;
  p.kappa_tilde_hat = kappa_tilde_hat;
  p.a = choice == AChoice::FourThirds ? d - 4.0 * b / 3.0 : d - 2.0 * b;
  p.validate();
  return p;
}

void ThresholdParams::validate() const {
  std::ostringstream why;
  if (!(tau > 0.0)) {
    why << "tau must be positive";
  } else if (!(kappa_hat > 0.0 && kappa_tilde_hat > 0.0)) {
    why << "kappa stand-ins must be positive";
  } else if (!admissible(a, b, d)) {
    why << "(a, b, d) = (" << a << ", " << b << ", " << d << ") is not admissible";
  } else {
    return;
  }
  fail(ErrorKind::DomainError, why.str());
}

double riesz_constant(double alpha, double beta, int d) {
  if (!(alpha > 0.0 && alpha < d && beta > 0.0 && beta < d && alpha + beta > d)) {
    std::ostringstream why;
    why << "riesz_constant needs 0 < alpha, beta < d < alpha + beta; got (" << alpha << ", "
        << beta << ", " << d << ")";
    fail(ErrorKind::DomainError, why.str());
  }
  const double lg = std::lgamma((d - alpha) / 2.0) + std::lgamma((d - beta) / 2.0) +
                    std::lgamma((alpha + beta - d) / 2.0) - std::lgamma(alpha / 2.0) -
                    std::lgamma(beta / 2.0) - std::lgamma(d - (alpha + beta) / 2.0);
  return std::pow(kPi, d / 2.0) * std::exp(lg);
}

double riesz_rhs(double alpha, double beta, int d) {
  return alpha * beta * (2.0 * d - alpha - beta) /
         ((d - alpha) * (d - beta) * (alpha + beta - d));
}

namespace {

struct SweepMax {
  double value = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t count = 0;
};

SweepMax riesz_sweep(int d, int grid, double alpha, double beta) {
  SweepMax m;
  auto visit = [&](double x, double y) {
    const double r = riesz_constant(x, y, d) / riesz_rhs(x, y, d);
    ++m.count;
    if (r > m.value) m = {r, x, y, m.count};
  };
  for (int i = 0; i < grid; ++i) {
    for (int j = grid - i; j < grid; ++j) {
      visit(d * (i + 0.5) / grid, d * (j + 0.5) / grid);
    }
  }
  visit(alpha, beta);
  return m;
}

}  // namespace

BoundCertificate riesz_bound_check(double alpha, double beta, int d, int grid) {
  riesz_constant(alpha, beta, d);
  require(grid >= 2, ErrorKind::PreconditionViolation, "riesz sweep grid must be >= 2");
  const SweepMax coarse = riesz_sweep(d, grid, alpha, beta);
  const SweepMax fine = riesz_sweep(d, 2 * grid, alpha, beta);

  BoundCertificate c;
  c.lemma_id = "riesz_bound";
  c.samples = coarse.count + fine.count;
  c.tol = 1e-2;
  c.worst_ratio = fine.value / coarse.value;
  c.details = {{"d", d},
               {"c_fit", coarse.value},
               {"c_refined", fine.value},
               {"query", {{"alpha", alpha}, {"beta", beta},
                          {"ratio", riesz_constant(alpha, beta, d) / riesz_rhs(alpha, beta, d)}}},
               {"argmax", {{"alpha", fine.alpha}, {"beta", fine.beta}}}};
  c.settle();
  return c;
}

IntegralValue integral_lemma_value(double s, double A, double delta) {
  require(s > 0.0 && A > 0.0 && delta > 0.0, ErrorKind::PreconditionViolation,
          "integral lemma needs s, A, delta > 0");
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double c = s * A;
  const double scale = std::pow(s, delta);

  if (c <= 30.0) {
    // e^{-c} sum_k c^k / (k! (delta + k)), positive terms
    double term = 1.0, sum = 0.0, rem = 0.0;
    int k = 0;
    for (;; ++k) {
      sum += term / (delta + k);
      term *= c / (k + 1);
      if (k + 1 > 2.0 * c && term / (delta + k + 1) < 1e-18 * sum) {
        rem = term / (delta + k + 1) * 2.0;  // ratio of later terms below 1/2
        break;
      }
    }
    const double e = std::exp(-c);
    return {scale * e * sum, scale * e * (rem + 4e-16 * (k + 1) * sum)};
  }

  // x = sigma / s. On [0, 1/2] write e^{-c(1-x)} = e^{-c} + e^{-c(1-x)}(1 - e^{-cx}).
  const double head = std::exp(-c) * std::pow(0.5, delta) / delta;
  auto rest = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::pow(x, delta - 1.0) * std::exp(-c * (1.0 - x)) * -std::expm1(-c * x);
  };
  // z = c (1 - x) on the upper half; the peak sits at z = 0 with unit width.
  auto tail = [&](double z) { return std::exp(-z) * std::pow(1.0 - z / c, delta - 1.0) / c; };

  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  boost::math::quadrature::tanh_sinh<double> ts(12);
  double r1 = 0.0;
  if (c < 1400.0) {
    r1 = ts.integrate(rest, 0.0, 0.5, 1e-13, &e1);
  } else {
    // e^{-c/2} underflows relative to the tail; bound the piece instead
    e1 = std::exp(-c / 2.0) * std::pow(0.5, delta) / delta;
  }
  const double z0 = std::min(0.5 * c, 40.0);
  double r2 = GK::integrate(tail, 0.0, z0, 12, 1e-13, &e2);
  if (z0 < 0.5 * c) r2 += GK::integrate(tail, z0, 0.5 * c, 12, 1e-13, &e3);

  IntegralValue out{scale * (head + r1 + r2), scale * (e1 + e2 + e3)};
  if (!(out.error <= 1e-10 * out.value)) {
    std::ostringstream why;
    why << "quadrature error " << out.error << " exceeds 1e-10 of " << out.value;
    fail(ErrorKind::QuadratureFailure, why.str());
  }
  return out;
}

double integral_lemma_bound(double s, double A, double delta, double b) {
  return 4.0 / std::min(delta, 1.0) * std::pow(A, -b) * std::pow(s, delta - b);
}

BoundCertificate integral_lemma_check(double s, double A, double delta, double b) {
  require(b >= 0.0 && b <= 1.0, ErrorKind::PreconditionViolation,
          "integral lemma needs 0 <= b <= 1");
  const IntegralValue v = integral_lemma_value(s, A, delta);
  const double bound = integral_lemma_bound(s, A, delta, b);
  BoundCertificate c;
  c.lemma_id = "integral_lemma";
  c.samples = 1;
  c.tol = 0.0;
  c.worst_ratio = (v.value + v.error) / bound;
  c.details = {{"s", s}, {"A", A}, {"delta", delta}, {"b", b},
               {"value", v.value}, {"error", v.error}, {"bound", bound}};
  c.settle();
  return c;
}

double bilinear_K(double a, double b, int d) {
  if (!admissible(a, b, d)) {
    std::ostringstream why;
    why << "bilinear_K: (a, b, d) = (" << a << ", " << b << ", " << d << ") is not admissible";
    fail(ErrorKind::DomainError, why.str());
  }
  const double C = riesz_constant(a, a - 1.0 + 2.0 * b, d);
  const double s1 = std::min(d - a, 1.0);
  const double s2 = std::min(d - a - b, 1.0);
  return 32.0 * C / (std::pow(2.0 * kPi, d) * s1 * s2);
}

double heat_constant(double a, int d) {
  if (!(a >= d - 2.0 && a < d)) {
    std::ostringstream why;
    why << "heat_constant needs d-2 <= a < d, got a=" << a;
    fail(ErrorKind::DomainError, why.str());
  }
  const double m = 1.0 + (a - d) / 2.0;
  return m == 0.0 ? 1.0 : std::pow(m, m) * std::exp(-m);
}

std::string_view to_string(LVariant v) {
  switch (v) {
    case LVariant::led1: return "led1";
    case LVariant::led2: return "led2";
    case LVariant::led3: return "led3";
    case LVariant::led4: return "led4";
  }
  return "?";
}

LVariant parse_lvariant(std::string_view name) {
  for (LVariant v : {LVariant::led1, LVariant::led2, LVariant::led3, LVariant::led4}) {
    if (to_string(v) == name) return v;
  }
  fail(ErrorKind::ConfigError, "unknown L-coefficient variant '" + std::string(name) + "'");
}

double linear_L_coefficient(double a, int d, double tau, LVariant variant) {
  auto reject = [&](const char* need) {
    std::ostringstream why;
    why << to_string(variant) << " needs " << need << "; got a=" << a << ", d=" << d
        << ", tau=" << tau;
    fail(ErrorKind::DomainError, why.str());
  };
  if (!(tau > 0.0)) reject("tau > 0");
  switch (variant) {
    case LVariant::led1:
      if (!(a > 1.0 && a < d)) reject("1 < a < d");
      return 1.0 / ((a - 1.0) * (d - a) * (d - a));
    case LVariant::led2:
      if (!(d >= 3 && a > 1.0 && a < d - 1.0)) reject("d >= 3 and 1 < a < d-1");
      return std::sqrt(tau) / ((a - 1.0) * (d - a - 1.0));
    case LVariant::led3:
      if (!(a > 1.0 && a < d && a >= d - 2.0)) reject("1 < a < d and a >= d-2");
      return 1.0 / ((a - 1.0) * (d - a) * (d - a));
    case LVariant::led4:
      if (!(std::abs(a - (d - 4.0 / 3.0)) <= 1e-12 && tau <= 1.0)) reject("a = d-4/3 and 0 < tau <= 1");
      return std::sqrt(tau) * std::abs(std::log(tau) - 1.0);
  }
  return 0.0;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::SatisfiesSmallTau: return "SatisfiesSmallTau";
    case Verdict::SatisfiesLargeTau: return "SatisfiesLargeTau";
    case Verdict::Fails: return "Fails";
  }
  return "?";
}

Verdict size_condition(const ThresholdParams& p, double u0_pm, double gphi0_pm) {
  p.validate();
  if (p.tau <= 1.0) {
    const double weight = p.d == 2 ? std::abs(std::log(p.tau) - 1.0) * std::sqrt(p.tau)
                                   : std::sqrt(p.tau);
    if (u0_pm < p.kappa_hat && weight * gphi0_pm < p.kappa_tilde_hat) {
      return Verdict::SatisfiesSmallTau;
    }
  }
  if (p.tau >= 1.0) {
    const double b3 = p.b * p.b * p.b;
    if (u0_pm < p.kappa_hat * b3 * std::pow(p.tau, 1.0 - p.b) &&
        gphi0_pm < p.kappa_tilde_hat * p.b * p.b) {
      return Verdict::SatisfiesLargeTau;
    }
  }
  return Verdict::Fails;
}

double optimal_b(double tau) {
  if (!(tau >= std::exp(3.0) * (1.0 - 1e-12))) {
    std::ostringstream why;
    why << "optimal_b needs tau >= e^3, got " << tau;
    fail(ErrorKind::DomainError, why.str());
  }
  return std::min(1.0, 3.0 / std::log(tau));
}

bool besov_admissible(double p, double q, int d) {
  if (d < 2) return false;
  const double p_lo = std::max(d / 2.0, 2.0 * d / (d + 1.0));
  if (!(p > p_lo && p < 2.0 * d)) return false;
  const double ip = 1.0 / p, iq = 1.0 / q, id = 1.0 / d;
  return std::abs(ip - id) < iq && iq <= std::min(ip, 1.0 - ip) && iq < id;
}

double besov_threshold(double p, double q, int d, double tau) {
  if (!(tau > 0.0) || !besov_admissible(p, q, d)) {
    std::ostringstream why;
    why << "besov_threshold: inadmissible (p, q, d, tau) = (" << p << ", " << q << ", " << d
        << ", " << tau << ")";
    fail(ErrorKind::DomainError, why.str());
  }
  return std::pow(tau, 0.5 - d / 2.0 * (1.0 / p - 1.0 / q));
}

double besov_threshold_critical(double q, int d, double tau) {
  if (!(d >= 2 && q > d && tau > 0.0)) {
    std::ostringstream why;
    why << "besov_threshold_critical needs 2 <= d < q and tau > 0; got q=" << q << ", d=" << d;
    fail(ErrorKind::DomainError, why.str());
  }
  return std::pow(tau, d / (2.0 * q));
}

BoundCertificate integral_lemma_sweep(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto open_draw = [&](double hi) { return hi * (1.0 - unit(rng)); };  // (0, hi]

  BoundCertificate c;
  c.lemma_id = "integral_lemma";
  c.tol = 0.0;
  nlohmann::json worst;
  for (std::size_t k = 0; k < samples; ++k) {
    const double s = open_draw(10.0), A = open_draw(100.0), delta = open_draw(3.0);
    const double b = unit(rng);
    const BoundCertificate one = integral_lemma_check(s, A, delta, b);
    if (k == 0 || one.worst_ratio > c.worst_ratio) {
      c.worst_ratio = one.worst_ratio;
      worst = one.details;
    }
  }
  c.samples = samples;
  c.details = {{"seed", seed}, {"worst", worst}};
  c.settle();
  return c;
}

namespace {

double scaled_K(double b, int d) { return bilinear_K(d - 4.0 * b / 3.0, b, d) * b * b * b; }

}  // namespace

BoundCertificate bilinear_K_band(int d) {
  const int count = 60;
  double lo = 0.0, hi = 0.0;
  for (int k = 0; k < count; ++k) {
    const double b = 0.05 * std::pow(20.0, static_cast<double>(k) / (count - 1));
    const double v = scaled_K(b, d);
    lo = k == 0 ? v : std::min(lo, v);
    hi = k == 0 ? v : std::max(hi, v);
  }
  BoundCertificate c;
  c.lemma_id = "bilinear_K_band_d" + std::to_string(d);
  c.samples = count;
  c.tol = 0.0;
  c.worst_ratio = hi / lo / 3.0;
  c.details = {{"d", d}, {"min_Kb3", lo}, {"max_Kb3", hi}};
  c.settle();
  return c;
}

BoundCertificate bilinear_K_slope(int d) {
  const std::vector<double> bs{0.2, 0.1, 0.05};
  double mx = 0.0, my = 0.0;
  std::vector<double> x, y;
  for (double b : bs) {
    x.push_back(std::log(b));
    y.push_back(std::log(bilinear_K(d - 4.0 * b / 3.0, b, d)));
    mx += x.back() / bs.size();
    my += y.back() / bs.size();
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  BoundCertificate c;
  c.lemma_id = "bilinear_K_slope_d" + std::to_string(d);
  c.samples = bs.size();
  c.tol = 0.0;
  c.worst_ratio = std::abs(slope + 3.0) / 0.1;
  c.details = {{"d", d}, {"slope", slope}};
  c.settle();
  return c;
}

BoundCertificate heat_constant_check(int d) {
  const int count = 200;
  BoundCertificate c;
  c.lemma_id = "heat_constant_d" + std::to_string(d);
  c.samples = count;
  c.tol = 0.0;
  for (int k = 0; k < count; ++k) {
    const double a = d - 2.0 + 2.0 * k / count;
    c.worst_ratio = std::max(c.worst_ratio, heat_constant(a, d));
  }
  c.details = {{"d", d}};
  c.settle();
  return c;
}

BoundCertificate riesz_identity_check() {
  const double expected = kPi * kPi * kPi;
  const double v = riesz_constant(2.0, 2.0, 3);
  BoundCertificate c;
  c.lemma_id = "riesz_constant";
  c.samples = 1;
  c.tol = 1e-10;
  c.worst_ratio = 1.0 + std::abs(v / expected - 1.0);
  c.details = {{"value", v}, {"expected", expected}};
  c.settle();
  return c;
}

std::vector<BoundCertificate> verify_bounds_suite(std::size_t lemma_samples, std::uint64_t seed) {
  std::vector<BoundCertificate> out;
  out.push_back(riesz_identity_check());
  for (int d : {2, 3}) {
    BoundCertificate c = riesz_bound_check(0.75 * d, 0.75 * d, d);
    c.lemma_id += "_d" + std::to_string(d);
    out.push_back(std::move(c));
  }
  out.push_back(integral_lemma_sweep(lemma_samples, seed));
  for (int d : {2, 3}) {
    out.push_back(bilinear_K_band(d));
    out.push_back(bilinear_K_slope(d));
    out.push_back(heat_constant_check(d));
  }
  return out;
}

}  // namespace kslab
