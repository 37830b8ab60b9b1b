#include "kslab/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kslab/error.hpp"

namespace kslab {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::PP: return "PP";
    case Model::PE: return "PE";
    case Model::TM: return "TM";
    case Model::TM2: return "TM2";
    case Model::NLH: return "NLH";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  if (name == "PP") return Model::PP;
  if (name == "PE") return Model::PE;
  if (name == "TM") return Model::TM;
  if (name == "TM2" || name == "TM'") return Model::TM2;
  if (name == "NLH") return Model::NLH;
  fail(ErrorKind::ConfigError, "unknown model '" + std::string(name) + "'");
}

bool SystemSpec::evolves_phi() const {
  return model == Model::PP || model == Model::TM || model == Model::TM2;
}

void SystemSpec::validate() const {
  std::ostringstream why;
  if (d < 2 || d > kMaxDim) {
    why << "system.d must be in [2, " << kMaxDim << "]";
  } else if (evolves_phi() && !(tau > 0.0 && std::isfinite(tau))) {
    why << "system.tau must be positive for " << to_string(model);
  } else if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    why << "system.alpha must be nonnegative";
  } else {
    return;
  }
  fail(ErrorKind::ConfigError, why.str());
}

CoupledState make_state(const SpectralField& u0, const SystemSpec& spec,
                        std::optional<SpectralField> phi0) {
  spec.validate();
  if (u0.grid.d != spec.d) fail(ErrorKind::ModelMismatch, "grid dimension differs from system.d");
  CoupledState s{u0, std::nullopt, u0.time_tag};
  switch (spec.model) {
    case Model::NLH:
      break;
    case Model::PE:
      s.phi = elliptic_phi(u0);
      break;
    default:
      if (phi0) {
        require_same_grid(u0.grid, phi0->grid);
        s.phi = std::move(*phi0);
      } else {
        s.phi = SpectralField(u0.grid);
      }
      s.phi->time_tag = s.time;
  }
  return s;
}

namespace {

// Physical values of i xi_j F (one axis).
PhysicalField derivative(const SpectralField& F, const WaveTable& t, int axis) {
  SpectralField D(F.grid, F.time_tag);
  const auto& k = t.kvec[axis];
  for (std::size_t i = 0; i < F.size(); ++i) D[i] = cplx(0.0, k[i]) * F[i];
  return from_spectral(D);
}

PhysicalField laplacian(const SpectralField& F, const WaveTable& t) {
  SpectralField D(F.grid, F.time_tag);
  for (std::size_t i = 0; i < F.size(); ++i) D[i] = -t.ksq[i] * F[i];
  return from_spectral(D);
}

SpectralField drift_term(const SpectralField& u, const SpectralField& phi,
                         NonlinearDiagnostics* diag) {
  const auto table = wave_table(u.grid);
  const PhysicalField up = from_spectral(dealias(u));
  const SpectralField phid = dealias(phi);

  SpectralField N(u.grid, u.time_tag);
  std::vector<double> grad_sq(u.grid.size(), 0.0);
  for (int j = 0; j < u.grid.d; ++j) {
    PhysicalField flux = derivative(phid, *table, j);
    for (std::size_t i = 0; i < flux.values.size(); ++i) {
      grad_sq[i] += flux.values[i] * flux.values[i];
      flux.values[i] *= up.values[i];
    }
    const SpectralField F = to_spectral(flux, u.time_tag);
    const auto& k = table->kvec[j];
    for (std::size_t i = 0; i < N.size(); ++i) N[i] -= cplx(0.0, k[i]) * F[i];
  }
  if (diag) {
    diag->max_grad_phi = std::sqrt(*std::max_element(grad_sq.begin(), grad_sq.end()));
  }
  return N;
}

}  // namespace

SpectralField nonlinearity(const CoupledState& state, const SystemSpec& spec,
                           NonlinearDiagnostics* diag) {
  const SpectralField& u = state.u;
  if (spec.uses_phi() && spec.model != Model::PE && !state.phi) {
    fail(ErrorKind::ModelMismatch,
         std::string(to_string(spec.model)) + " requires phi in the state");
  }
  if (state.phi) require_same_grid(u.grid, state.phi->grid);
  if (diag) *diag = {};

  SpectralField N;
  switch (spec.model) {
    case Model::PP:
      N = drift_term(u, *state.phi, diag);
      break;
    case Model::PE:
      N = drift_term(u, elliptic_phi(u), diag);
      break;
    case Model::TM: {
      const auto table = wave_table(u.grid);
      PhysicalField prod = laplacian(dealias(*state.phi), *table);
      const PhysicalField up = from_spectral(dealias(u));
      for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] *= -up.values[i];
      N = to_spectral(prod, u.time_tag);
      break;
    }
    case Model::TM2: {
      const auto table = wave_table(u.grid);
      PhysicalField prod = laplacian(dealias(*state.phi), *table);
      for (double& v : prod.values) v *= v;
      N = to_spectral(prod, u.time_tag);
      break;
    }
    case Model::NLH: {
      PhysicalField prod = from_spectral(dealias(u));
      for (double& v : prod.values) v *= v;
      N = to_spectral(prod, u.time_tag);
      break;
    }
  }
  dealias_in_place(N);
  N.time_tag = state.time;
  return N;
}

SpectralField elliptic_phi(const SpectralField& u) {
  const auto table = wave_table(u.grid);
  SpectralField phi(u.grid, u.time_tag);
  for (std::size_t i = 1; i < u.size(); ++i) phi[i] = u[i] / table->ksq[i];
  phi[0] = 0.0;
  return phi;
}

double etd_phi1(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

double etd_phi2(double z) {
  if (std::abs(z) < 1e-2) {
    return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z * (1.0 / 720.0 + z / 5040.0))));
  }
  return (std::expm1(z) - z) / (z * z);
}

SpectralField phi_exact_update(const SpectralField& phi,
                               const SpectralField& u_start,
                               const SpectralField& u_end, double tau,
                               double alpha, double dt) {
  require_same_grid(phi.grid, u_start.grid);
  require_same_grid(phi.grid, u_end.grid);
  require(tau > 0.0 && dt > 0.0, ErrorKind::PreconditionViolation,
          "phi_exact_update needs tau > 0 and dt > 0");
  const auto table = wave_table(phi.grid);
  const double h_over_tau = dt / tau;
  SpectralField out(phi.grid, phi.time_tag + dt);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double z = -(table->ksq[i] + alpha) * h_over_tau;
    const cplx du = u_end[i] - u_start[i];
    out[i] = std::exp(z) * phi[i] +
             h_over_tau * (etd_phi1(z) * u_start[i] + etd_phi2(z) * du);
  }
  return out;
}

}  // namespace kslab
