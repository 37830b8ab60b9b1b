#pragma once

// Scale-invariant norm estimators. Suprema over xi and t in the continuum
// definitions become maxima over grid wavenumbers and supplied time nodes.

#include <iosfwd>
#include <limits>
#include <map>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/trajectory.hpp"

namespace kslab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// sup_xi |xi|^a |F(xi)|; the zero mode counts only when a == 0.
// Throws BadExponent unless 0 <= a < d.
double pm_norm(const SpectralField& F, double a);

// pm_norm of grad phi at order a: sup_{xi != 0} |xi|^{a+1} |phi(xi)|.
// Throws BadExponent unless 0 <= a < d.
double grad_pm_norm(const SpectralField& phi, double a);

// Snapshot of the time-weighted norm t^{1+(a-d)/2} sup |xi|^a |F(xi, t)|.
double y_snapshot(const SpectralField& F, double a, double t);

// Max of y_snapshot over the trajectory nodes with t > 0.
double y_norm(const Trajectory& traj, double a);

// Quadrature L^p norm with weight (L/n)^d; p = kInfinity gives the max.
double lp_norm(const PhysicalField& f, double p);

// t^{1 - d/(2p)} ||u(t)||_p at one time.
double ep_weight(double t, int d, double p);

// max over trajectory nodes (t > 0) of t^{1-d/(2p)} ||u(t)||_p.
// Throws BadExponent if p < 1.
double ep_monitor(const Trajectory& traj, double p);

// ep_monitor of the exact heat flow of u0 sampled on t_grid: the heat
// characterization of the homogeneous Besov norm of order -(2 - d/p).
// Throws BadExponent if p <= d/2.
double besov_norm(const SpectralField& u0, double p, const std::vector<double>& t_grid);

// Lower estimate of the Morrey M^{d/2} norm (q = 1): max over dyadic radii
// R = (L/n) 2^k <= L/2 and every grid center of R^{2-d} int_{|y-x|<R} |f|.
double morrey_norm_d2(const PhysicalField& f);

// Ball sum R^{2-d} sum_{|y-x|<R} |f(y)| (L/n)^d at one center index.
double morrey_ball_value(const PhysicalField& f, std::size_t center, double radius);

struct NormRequest {
  std::vector<double> pm_exponents;
  std::vector<double> lp_exponents;  // kInfinity allowed
  std::vector<double> ep_exponents;
  bool morrey = true;
};

// Default request for dimension d: a in {0, d-2}, p in {1, 2, d, inf},
// ep at p = d.
NormRequest default_norm_request(int d);

struct NormReport {
  double time = 0.0;
  std::map<double, double> pm_norms;
  std::map<double, double> lp_norms;
  std::map<double, double> ep_monitor;
  double morrey_d2 = 0.0;
  bool finite = true;
};

NormReport make_report(const SpectralField& u, double t, const NormRequest& req);

// CSV columns: time, pm_a=<a>..., lp_p=<p>..., ep_p=<p>..., morrey.
void write_csv_header(std::ostream& os, const NormRequest& req);
void write_csv_row(std::ostream& os, const NormReport& r);

}  // namespace kslab
