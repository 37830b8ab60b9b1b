#include "kslab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "fft.hpp"
#include "kslab/error.hpp"

namespace kslab {

double pm_norm(const SpectralField& F, double a) {
  const int d = F.grid.d;
  if (!(a >= 0.0 && a < d)) {
    std::ostringstream why;
    why << "pm exponent a=" << a << " outside [0, " << d << ")";
    fail(ErrorKind::BadExponent, why.str());
  }
  const auto table = wave_table(F.grid);
  double best = a == 0.0 ? std::abs(F[0]) : 0.0;
  for (std::size_t i = 1; i < F.size(); ++i) {
    const double mag = std::abs(F[i]);
    if (mag == 0.0) continue;
    best = std::max(best, std::pow(table->ksq[i], a / 2.0) * mag);
  }
  return best;
}

double grad_pm_norm(const SpectralField& phi, double a) {
  const int d = phi.grid.d;
  if (!(a >= 0.0 && a < d)) {
    std::ostringstream why;
    why << "pm exponent a=" << a << " outside [0, " << d << ")";
    fail(ErrorKind::BadExponent, why.str());
  }
  const auto table = wave_table(phi.grid);
  double best = 0.0;
  for (std::size_t i = 1; i < phi.size(); ++i) {
    best = std::max(best, std::pow(table->ksq[i], (a + 1.0) / 2.0) * std::abs(phi[i]));
  }
  return best;
}

double y_snapshot(const SpectralField& F, double a, double t) {
  const int d = F.grid.d;
  return std::pow(t, 1.0 + (a - d) / 2.0) * pm_norm(F, a);
}

double y_norm(const Trajectory& traj, double a) {
  double best = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] <= 0.0) continue;
    best = std::max(best, y_snapshot(traj.fields[k], a, traj.times[k]));
  }
  return best;
}

double lp_norm(const PhysicalField& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  require(p >= 1.0, ErrorKind::BadExponent, "L^p norm needs p >= 1");
  double sum = 0.0;
  if (p == 1.0) {
    for (double v : f.values) sum += std::abs(v);
    return sum * f.grid.cell_volume();
  }
  if (p == 2.0) {
    for (double v : f.values) sum += v * v;
    return std::sqrt(sum * f.grid.cell_volume());
  }
  // Scale by the max to keep |v|^p representable for large p.
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  for (double v : f.values) sum += std::pow(std::abs(v) / m, p);
  return m * std::pow(sum * f.grid.cell_volume(), 1.0 / p);
}

double ep_weight(double t, int d, double p) {
  const double expo = std::isinf(p) ? 1.0 : 1.0 - d / (2.0 * p);
  return std::pow(t, expo);
}

double ep_monitor(const Trajectory& traj, double p) {
  require(p >= 1.0, ErrorKind::BadExponent, "ep monitor needs p >= 1");
  double best = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t <= 0.0) continue;
    const double v = ep_weight(t, traj.fields[k].grid.d, p) *
                     lp_norm(from_spectral(traj.fields[k]), p);
    best = std::max(best, v);
  }
  return best;
}

double besov_norm(const SpectralField& u0, double p, const std::vector<double>& t_grid) {
  const int d = u0.grid.d;
  if (!(p > d / 2.0)) {
    std::ostringstream why;
    why << "Besov heat characterization needs p > d/2, got p=" << p;
    fail(ErrorKind::BadExponent, why.str());
  }
  double best = 0.0;
  for (double t : t_grid) {
    if (t <= 0.0) continue;
    const double v = ep_weight(t, d, p) * lp_norm(from_spectral(heat_flow(u0, t)), p);
    best = std::max(best, v);
  }
  return best;
}

namespace {

double periodic_distance_sq(const GridSpec& g, std::size_t flat) {
  double r2 = 0.0;
  for (int j = g.d - 1; j >= 0; --j) {
    const int k = static_cast<int>(flat % g.n);
    flat /= g.n;
    const double x = node_coordinate(g, k);
    r2 += x * x;
  }
  return r2;
}

}  // namespace

double morrey_ball_value(const PhysicalField& f, std::size_t center, double radius) {
  const GridSpec& g = f.grid;
  const std::size_t total = g.size();
  std::vector<int> c(g.d);
  std::size_t rem = center;
  for (int j = g.d - 1; j >= 0; --j) {
    c[j] = static_cast<int>(rem % g.n);
    rem /= g.n;
  }
  double sum = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    double dist2 = 0.0;
    for (int j = g.d - 1; j >= 0; --j) {
      const int k = static_cast<int>(r % g.n);
      r /= g.n;
      const double x = node_coordinate(g, (k - c[j] + g.n) % g.n);
      dist2 += x * x;
    }
    if (dist2 < radius * radius) sum += std::abs(f.values[flat]);
  }
  return std::pow(radius, 2.0 - g.d) * sum * g.cell_volume();
}

double morrey_norm_d2(const PhysicalField& f) {
  const GridSpec& g = f.grid;
  const std::size_t total = g.size();
  std::vector<cplx> absf(total), absf_hat(total), mask(total), mask_hat(total), conv(total);
  bool any = false;
  for (std::size_t i = 0; i < total; ++i) {
    absf[i] = std::abs(f.values[i]);
    any = any || f.values[i] != 0.0;
  }
  if (!any) return 0.0;
  detail::dft_forward(g, absf.data(), absf_hat.data());

  std::vector<double> dist2(total);
  for (std::size_t i = 0; i < total; ++i) dist2[i] = periodic_distance_sq(g, i);

  double best = 0.0;
  for (double radius = g.spacing(); radius <= g.box_length / 2.0 + 1e-12; radius *= 2.0) {
    for (std::size_t i = 0; i < total; ++i) mask[i] = dist2[i] < radius * radius ? 1.0 : 0.0;
    detail::dft_forward(g, mask.data(), mask_hat.data());
    for (std::size_t i = 0; i < total; ++i) mask_hat[i] *= absf_hat[i];
    detail::dft_backward(g, mask_hat.data(), conv.data());
    double peak = 0.0;
    for (const cplx& z : conv) peak = std::max(peak, z.real());
    peak /= static_cast<double>(total);
    best = std::max(best, std::pow(radius, 2.0 - g.d) * peak * g.cell_volume());
  }
  return best;
}

NormRequest default_norm_request(int d) {
  NormRequest r;
  r.pm_exponents = {0.0};
  if (d > 2) r.pm_exponents.push_back(d - 2.0);
  r.lp_exponents = {1.0, 2.0};
  if (d > 2) r.lp_exponents.push_back(static_cast<double>(d));
  r.lp_exponents.push_back(kInfinity);
  r.ep_exponents = {static_cast<double>(d)};
  return r;
}

NormReport make_report(const SpectralField& u, double t, const NormRequest& req) {
  NormReport r;
  r.time = t;
  const PhysicalField f = from_spectral(u);
  for (double a : req.pm_exponents) r.pm_norms[a] = pm_norm(u, a);
  for (double p : req.lp_exponents) r.lp_norms[p] = lp_norm(f, p);
  for (double p : req.ep_exponents) {
    r.ep_monitor[p] = t > 0.0 ? ep_weight(t, u.grid.d, p) * lp_norm(f, p) : 0.0;
  }
  if (req.morrey) r.morrey_d2 = morrey_norm_d2(f);

  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  r.finite = ok(r.morrey_d2);
  for (const auto* m : {&r.pm_norms, &r.lp_norms, &r.ep_monitor}) {
    for (const auto& [key, v] : *m) r.finite = r.finite && ok(v);
  }
  return r;
}

namespace {

std::string label(double x) {
  if (std::isinf(x)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_csv_header(std::ostream& os, const NormRequest& req) {
  // Rows come from sorted maps, so the header lists exponents sorted too.
  const std::set<double> pm(req.pm_exponents.begin(), req.pm_exponents.end());
  const std::set<double> lp(req.lp_exponents.begin(), req.lp_exponents.end());
  const std::set<double> ep(req.ep_exponents.begin(), req.ep_exponents.end());
  os << "time";
  for (double a : pm) os << ",pm_a=" << label(a);
  for (double p : lp) os << ",lp_p=" << label(p);
  for (double p : ep) os << ",ep_p=" << label(p);
  os << ",morrey\n";
}

void write_csv_row(std::ostream& os, const NormReport& r) {
  os << number(r.time);
  for (const auto& [a, v] : r.pm_norms) os << ',' << number(v);
  for (const auto& [p, v] : r.lp_norms) os << ',' << number(v);
  for (const auto& [p, v] : r.ep_monitor) os << ',' << number(v);
  os << ',' << number(r.morrey_d2) << '\n';
}

}  // namespace kslab
