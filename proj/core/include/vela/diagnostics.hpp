#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vela/constitutive.hpp"
#include "vela/dynamics.hpp"
#include "vela/spectral.hpp"
#include "vela/vector_fields.hpp"

namespace vela {

/// Eigenvalues of A(w) U = (v (x) w, H w) for the + / - / 0 families.
inline constexpr std::array<double, 3> kSplitEigenvalues{1.0, -1.0, 0.0};

/// Pointwise projections onto the eigenspaces of A(w), w = x/|x|.
struct SplitFields {
  FieldPair plus, minus, zero;
  explicit SplitFields(const Grid& g) : plus(g), minus(g), zero(g) {}
  const FieldPair& operator[](int i) const { return i == 0 ? plus : (i == 1 ? minus : zero); }
};

struct PointSplit {
  Mat3 h[3];
  Vec3 v[3];
};
PointSplit split_at(const Mat3& H, const Vec3& v, const Vec3& w);
SplitFields spectral_split(const FieldPair& u);
/// A(w) U with w = x/|x| (zero at the origin).
FieldPair symbol_apply(const FieldPair& u);

/// Energies and dissipation rates of every term S^a Y^alpha U, a + |alpha| <= 2,
/// a <= 1, from one pass. Index [s][a] holds the (sigma = s, theta = a) sum.
struct Hierarchy {
  std::array<std::array<double, 2>, 3> energy{};
  /// nu * sum |grad (S^a Y^alpha v)|^2 at this instant.
  std::array<std::array<double, 2>, 3> dissipation{};
  std::array<std::array<int, 2>, 3> terms{};
  /// 1/2 sum of plain squared norms (no ahat weight), same index.
  std::array<std::array<double, 2>, 3> plain{};
  /// sum over |beta| <= 2 of ||Y^beta U|| (norms, not squares).
  double upsilon_norm_sum = 0.0;

  // Weighted norms at (sigma, theta) = (2, 1): terms with a + |alpha| <= 1.
  double X = 0.0, Xi = 0.0, Psi = 0.0;
  /// Sums of per-summand checks: every Xi summand <= its X summand.
  bool xi_dominated = true;
};

struct HierarchyOptions {
  int sigma = 2;
  int theta = 1;
  bool dissipation = true;
  bool weighted_norms = true;
  /// Freeze the energy weight at ahat(I) (linearised energy).
  bool at_identity = false;
  /// Interior cutoff parameter m.
  double m = 5.0;
};

Hierarchy hierarchy(Spectral& sp, const State& s, const FieldPair& dudt, const MaterialModel& model,
                    const HierarchyOptions& opt = {});

/// E_{sigma,theta}. Throws CapabilityError unless 0 <= theta <= min(sigma, 1), sigma <= 2.
double energy(Spectral& sp, const State& s, const MaterialModel& model, int sigma, int theta,
              const FieldPair* dudt = nullptr, bool at_identity = false);

struct WeightedNorms {
  double X = 0.0, Xi = 0.0, Psi = 0.0;
};
WeightedNorms weighted_norms(Spectral& sp, const State& s, const FieldPair& dudt, double m = 5.0);

/// Measured sides of the two local energy decay bounds at n = 0.
struct DecayEntry {
  double t = 0.0;
  double int_lhs = 0.0, int_rhs = 0.0, int_ratio = 0.0;
  double ext_lhs = 0.0, ext_rhs = 0.0, ext_ratio = 0.0;
  /// Set when a right-hand side vanished; ratio reported as 0 (0/0) or +inf.
  bool int_flag = false, ext_flag = false;
};

/// f, g are the forcing terms of the H and v equations.
DecayEntry led_ratio(Spectral& sp, const State& s, const FieldPair& dudt, const MatrixField& f, const VectorField& g,
                     double nu, double m = 5.0);

/// Sup-norm ratios of the pointwise decay bounds with a = 0, alpha = 0.
struct CorollaryRatios {
  double sob4 = 0.0, sob5 = 0.0, sob6 = 0.0, sob7 = 0.0, sob8 = 0.0;
};
/// `upsilon_sum`, `X` and `Psi` come from hierarchy(); `mh` is the M^H field.
CorollaryRatios corollary_monitors(Spectral& sp, const State& s, const VectorField& mh, double upsilon_sum, double X,
                                   double Psi, double m = 5.0);

/// ||rho^{-1} f|| / ||d_rho f||. Throws DegenerateInputError if either vanishes.
double hardy_ratio(Spectral& sp, const ScalarField& f);
/// sup |f| over the sup-side product of the radial Sobolev bound with weight
/// exponent lambda in [0, 2]. Throws DegenerateInputError for f = 0.
double sobolev3_check(Spectral& sp, const ScalarField& f, double lambda);

/// Ratio of ||(lambda t - r) P d_j U|| summed over families and j to
/// ||(t A(grad) - r d_r) U|| + ||(t/r + 1) Omega U||.
double projection_bound_ratio(Spectral& sp, const FieldPair& u, double t);

/// Largest pointwise |U| over nodes with r >= fraction * L (boundary contamination).
double boundary_shell_max(const FieldPair& u, double fraction = 0.9);

struct MonitorSample {
  double t = 0.0;
  double e_low = 0.0;    ///< E_{2,1}
  double e_high = 0.0;   ///< E_{2,0}
  double d_low = 0.0;    ///< accumulated dissipation for the (2,1) terms
  double d_high = 0.0;   ///< accumulated dissipation for the (2,0) terms
};

struct TheoremVerdict {
  double c_low = 0.0;
  double c_high = 0.0;
  double delta = 0.5;
  double bound = 4.0;
  bool blew_up = false;
  double failure_time = 0.0;
  double c() const { return std::max(c_low, c_high); }
  bool pass() const { return !blew_up && c() <= bound; }
};

/// E_low(t) + D_low(t) <= C E_low(0) and E_high(t) + D_high(t) <= C E_high(0) <t>^delta.
TheoremVerdict theorem_monitor(const std::vector<MonitorSample>& history, double delta = 0.5, double bound = 4.0);

/// One CSV row per output time.
struct EnergyReport {
  double t = 0.0;
  double e00 = 0.0, e10 = 0.0, e20 = 0.0, e21 = 0.0;
  double dissip_int = 0.0;
  ConstraintResiduals residuals;
  double X = 0.0, Xi = 0.0, Psi = 0.0;
  double led_int = 0.0, led_ext = 0.0;
  double p_ratio = 0.0;
  CorollaryRatios sob;
};

std::string csv_header();
std::string csv_row(const EnergyReport& r);
/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace vela
