#pragma once

// Analytic constants of the mild-solution estimates and numerical
// certificates for the inequalities built from them. Implicit constants
// are normalized to 1; only relative comparisons are meaningful.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace kslab {

struct BoundCertificate {
  std::string lemma_id;
  std::size_t samples = 0;
  double worst_ratio = 0.0;  // max observed / claimed
  double tol = 1e-9;
  bool passed = false;
  nlohmann::json details;  // fitted constants, worst parameters

  // passed = worst_ratio <= 1 + tol
  void settle();
  nlohmann::json to_json() const;
};

enum class AChoice { FourThirds, Two };  // a = d - 4b/3 or a = d - 2b

struct ThresholdParams {
  int d = 3;
  double tau = 1.0;
  double b = 1.0;
  double kappa_hat = 0.0;        // empirical stand-in for kappa_d
  double kappa_tilde_hat = 0.0;  // empirical stand-in for the phi0 constant
  double a = 0.0;

  static ThresholdParams make(int d, double tau, double b, double kappa_hat,
                              double kappa_tilde_hat, AChoice choice = AChoice::FourThirds);
  // Throws DomainError when (a, b, d) is not admissible.
  void validate() const;
};

bool admissible(double a, double b, int d);

// C(alpha, beta, d) in |x|^-alpha * |x|^-beta = C |x|^{d-alpha-beta}.
// Requires 0 < alpha, beta < d < alpha + beta. Throws DomainError.
double riesz_constant(double alpha, double beta, int d);

// alpha beta (2d - alpha - beta) / ((d - alpha)(d - beta)(alpha + beta - d)).
double riesz_rhs(double alpha, double beta, int d);

// Fits c = max C / rhs on a grid of admissible (alpha, beta) at dimension
// d, then refines the grid and reports the refined maximum against c. The
// query point (alpha, beta) is validated and included in both samples.
BoundCertificate riesz_bound_check(double alpha, double beta, int d, int grid = 40);

struct IntegralValue {
  double value = 0.0;
  double error = 0.0;
};

// int_0^s e^{-(s - sigma) A} sigma^{delta - 1} dsigma. Power series for
// sA <= 30, otherwise Gauss-Kronrod on the peak and tanh-sinh on the
// singular remainder.
// Throws QuadratureFailure if the error estimate exceeds 1e-10 relative.
IntegralValue integral_lemma_value(double s, double A, double delta);

// 4 / min(delta, 1) * A^-b * s^(delta - b).
double integral_lemma_bound(double s, double A, double delta, double b);

// One-sided certificate: (value + error) / bound, tol = 0.
// Throws PreconditionViolation unless s, A, delta > 0 and 0 <= b <= 1.
BoundCertificate integral_lemma_check(double s, double A, double delta, double b);

// 32 C(a, a - 1 + 2b, d) / ((2 pi)^d (d - a)_* (d - a - b)_*), x_* = min(x, 1).
double bilinear_K(double a, double b, int d);

// sup_rho rho^m e^-rho = m^m e^-m, m = 1 + (a - d)/2, for d - 2 <= a < d.
double heat_constant(double a, int d);

enum class LVariant { led1, led2, led3, led4 };

std::string_view to_string(LVariant v);
LVariant parse_lvariant(std::string_view name);

// Coefficient of ||grad phi0||_{PM^{d-1}} in the bound on L.
double linear_L_coefficient(double a, int d, double tau, LVariant variant);

enum class Verdict { SatisfiesSmallTau, SatisfiesLargeTau, Fails };

std::string_view to_string(Verdict v);

// Small-data size conditions, using the empirical kappa stand-ins.
Verdict size_condition(const ThresholdParams& p, double u0_pm, double gphi0_pm);

// min(1, 3 / ln tau) for tau >= e^3.
double optimal_b(double tau);

// tau^{1/2 - (d/2)(1/p - 1/q)} under the exponent admissibility of the
// L^p theory. Throws DomainError.
double besov_threshold(double p, double q, int d, double tau);
bool besov_admissible(double p, double q, int d);

// tau^{d/(2q)} for 2 <= d < q, the Morrey-data variant.
double besov_threshold_critical(double q, int d, double tau);

// Certificates over parameter samples.

// Worst integral_lemma_check ratio over `samples` uniform draws of
// (s, A, delta, b) in (0, 10] x (0, 100] x (0, 3] x [0, 1].
BoundCertificate integral_lemma_sweep(std::size_t samples, std::uint64_t seed);

// K(d - 4b/3, b, d) b^3 over a log grid of b in [0.05, 1]; the ratio is
// (max / min) / 3.
BoundCertificate bilinear_K_band(int d);

// Log-log slope of K(d - 4b/3, b, d) over b in {0.2, 0.1, 0.05}; the ratio
// is |slope + 3| / 0.1.
BoundCertificate bilinear_K_slope(int d);

// max heat_constant(a, d) over a in [d-2, d) against 1.
BoundCertificate heat_constant_check(int d);

// riesz_constant(2, 2, 3) against pi^3.
BoundCertificate riesz_identity_check();

std::vector<BoundCertificate> verify_bounds_suite(std::size_t lemma_samples, std::uint64_t seed);

}  // namespace kslab
