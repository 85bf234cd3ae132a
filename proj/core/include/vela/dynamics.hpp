#pragma once

#include <cstdint>
#include <vector>

#include "vela/constitutive.hpp"
#include "vela/grid.hpp"
#include "vela/spectral.hpp"

namespace vela {

/// Perturbation (H - I, v) at time t.
struct State {
  MatrixField hdot;
  VectorField vdot;
  double t = 0.0;

  explicit State(const Grid& g) : hdot(g), vdot(g) { hdot.gradient_flag = true; }
  const Grid& grid() const { return hdot.grid(); }
  FieldPair pair() const { return FieldPair(hdot, vdot); }
};

struct SolverConfig {
  double dt = 0.0;
  /// Apply the 2/3-rule mask to every nonlinear product.
  bool dealias = true;
  /// Drop all nonlinear terms (linearised system).
  bool linear = false;
  /// Integrate the energy flux and dissipation along the Runge-Kutta stages.
  bool track_energy = false;
};

/// Nonlinear parts of the right-hand side.
struct NonlinearTerms {
  MatrixField nh;       ///< transport terms of the H equation
  VectorField nv;       ///< convection and nonlinear stress of the v equation
  VectorField mh;       ///< -grad(((tr X)^2 - tr X^2)/2 + det X)
  VectorField forcing;  ///< nv - (c1^2 - 1) mh

  explicit NonlinearTerms(const Grid& g) : nh(g), nv(g), mh(g), forcing(g) {}
};

NonlinearTerms nonlinear_rhs(Spectral& sp, const State& s, const MaterialModel& model, bool dealias = true);

/// Pressure gradient removed by the projection: (I - P)(forcing - div hdot).
VectorField pressure_gradient(Spectral& sp, const State& s, const VectorField& forcing);
/// Pressure gradient from laplacian p = div nv - c1^2 div mh. Agrees with the
/// projection form up to the gradient of det(I + hdot) - 1.
VectorField pressure_gradient_poisson(Spectral& sp, const NonlinearTerms& terms, double c1);

/// 1/2 integral of ahat(I + hdot) hdot . hdot + |v|^2. With `at_identity`
/// the weight is frozen at ahat(I) (linearised energy).
double base_energy(const State& s, const MaterialModel& model, bool at_identity = false);

struct ConstraintResiduals {
  double div_v = 0.0;   ///< max |div v|
  double det = 0.0;     ///< max |det(I + hdot) - 1|
  double curl = 0.0;    ///< max |d_k H(i,j) - d_j H(i,k)|
};
ConstraintResiduals constraint_residuals(Spectral& sp, const State& s);

/// Integrating-factor RK4 in Fourier space: viscosity is integrated exactly,
/// everything else explicitly, with the Leray projection at every stage.
class Solver {
 public:
  Solver(const Grid& g, const MaterialModel& model, SolverConfig cfg);

  /// Advances by one step. Throws BlowUpError on non-finite values or a
  /// deformation that stops being invertible.
  State step(const State& s);
  /// Full time derivative including viscosity.
  FieldPair time_derivative(const State& s);

  Spectral& spectral() { return sp_; }
  const SolverConfig& config() const { return cfg_; }
  const MaterialModel& model() const { return model_; }

  /// Accumulated integral of d/dt of the base energy excluding viscosity.
  double flux_integral() const { return flux_; }
  /// Accumulated nu * integral of |grad v|^2.
  double dissipation_integral() const { return diss_; }
  void reset_integrals() { flux_ = diss_ = 0.0; }

 private:
  using Spec = std::vector<Spectrum>;  // 12 components, 9 of H then 3 of v
  struct StageScalars {
    double flux = 0.0, diss = 0.0;
  };

  void to_spectral(const State& s, Spec& u);
  void to_physical(const Spec& u, State& s);
  void rhs(const Spec& u, Spec& du, StageScalars* acc);
  void decay(Spec& u, const std::vector<double>& factor);

  Spectral sp_;
  const MaterialModel& model_;
  SolverConfig cfg_;
  Rank4Tensor id_;
  double c1_;
  std::vector<double> e_full_, e_half_;
  std::vector<double> phys_;  // scratch: 12 + 36 + 13 physical components
  double flux_ = 0.0, diss_ = 0.0;
};

struct InitialDataOptions {
  int blobs = 4;
  /// Gaussian width as a fraction of L.
  double width = 0.1;
  /// Blob centres lie within this fraction of L from the origin.
  double spread = 0.05;
  /// Linearised data: hdot is the gradient of a divergence-free field.
  bool linearized = false;
  int substeps = 8;
  /// Allowed max |det(I + hdot) - 1| after band limiting.
  double det_tolerance = 1e-8;
};

/// Band-limited, divergence-free v and curl-free, unimodular H = I + hdot,
/// scaled so that base_energy equals eps^2. H is the gradient of the time-one
/// flow of a divergence-free field, so it is a genuine volume-preserving map.
State generate_initial_data(const Grid& g, std::uint64_t seed, double eps, const MaterialModel& model,
                            const InitialDataOptions& opt = {});

}  // namespace vela
