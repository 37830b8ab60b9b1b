#pragma once

#include <optional>
#include <string_view>

#include "kslab/grid.hpp"

namespace kslab {

// PP: u_t = Du - div(u grad phi),  tau phi_t = D phi + u - alpha phi
// PE: u_t = Du - div(u grad phi),  D phi + u = 0
// TM: u_t = Du - u D phi,          tau phi_t = D phi + u - alpha phi
// TM2: u_t = Du + (D phi)^2,       tau phi_t = D phi + u - alpha phi
// NLH: u_t = Du + u^2
enum class Model { PP, PE, TM, TM2, NLH };

std::string_view to_string(Model m);
// Accepts the names above plus "TM'" for TM2. Throws ConfigError.
Model parse_model(std::string_view name);

struct SystemSpec {
  Model model = Model::PP;
  int d = 2;
  double tau = 1.0;
  double alpha = 0.0;

  void validate() const;
  // phi is a dynamic unknown advanced in time.
  bool evolves_phi() const;
  // The u equation reads phi (true for all models except NLH).
  bool uses_phi() const { return model != Model::NLH; }
};

struct CoupledState {
  SpectralField u;
  std::optional<SpectralField> phi;  // absent for NLH; derived from u for PE
  double time = 0.0;
};

// Builds a consistent initial state: phi defaults to zero for parabolic
// models, is elliptic_phi(u) for PE, and is dropped for NLH.
CoupledState make_state(const SpectralField& u0, const SystemSpec& spec,
                        std::optional<SpectralField> phi0 = std::nullopt);

struct NonlinearDiagnostics {
  double max_grad_phi = 0.0;  // sup |grad phi|, PP/PE only
};

// Dealiased spectral nonlinear term of the u equation.
// Throws ModelMismatch if phi is missing for a phi-dependent model.
SpectralField nonlinearity(const CoupledState& state, const SystemSpec& spec,
                           NonlinearDiagnostics* diag = nullptr);

// Solves D phi + u = 0 with the zero-mean gauge phi(0) = 0.
SpectralField elliptic_phi(const SpectralField& u);

// Exponential-integrator update of tau phi_t = D phi + u - alpha phi over
// one step of length dt, with u linear in time between u_start and u_end.
// Exact when u is constant over the step.
SpectralField phi_exact_update(const SpectralField& phi,
                               const SpectralField& u_start,
                               const SpectralField& u_end, double tau,
                               double alpha, double dt);

// (e^z - 1)/z and (e^z - 1 - z)/z^2, accurate near z = 0.
double etd_phi1(double z);
double etd_phi2(double z);

}  // namespace kslab
