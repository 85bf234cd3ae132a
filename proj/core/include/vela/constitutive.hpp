#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vela/tensor.hpp"

namespace vela {

/// Wave speeds and viscosity. Speeds are normalised so that c2 = 1 in the
/// time-dependent solver; the constitutive routines accept any c1 >= c2 > 0.
struct MaterialParams {
  double c1 = 1.0;
  double c2 = 1.0;
  double nu = 0.0;

  /// Throws DomainError unless c1 >= c2 > 0 and nu >= 0.
  void validate() const;
};

/// Strain energy W(F) on deformation gradients.
class StrainEnergy {
 public:
  enum class Kind { BuiltinIsotropic, UserSupplied };
  using Function = std::function<double(const Mat3&)>;

  StrainEnergy(Function f, Kind kind) : f_(std::move(f)), kind_(kind) {}

  /// Throws EvaluationError if W is not finite at F.
  double operator()(const Mat3& F) const;
  Kind kind() const { return kind_; }

 private:
  Function f_;
  Kind kind_;
};

/// W = a (I1 - 3) + b (I2 - 3) + c (I1 - 3)^2 with I1 = tr C, I2 = tr C^2 and
/// C = F^T F. The three coefficients are fixed by requiring a stress-free
/// reference state and the prescribed wave speeds at F = I.
class IsotropicPolynomialEnergy {
 public:
  explicit IsotropicPolynomialEnergy(const MaterialParams& p);

  double value(const Mat3& F) const;
  /// First Piola stress dW/dF.
  Mat3 stress(const Mat3& F) const;
  /// t(i, p, n, k) = d^2 W / dF(i,p) dF(n,k).
  Rank4Tensor elasticity(const Mat3& F) const;
  StrainEnergy as_strain_energy() const;

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

 private:
  double a_, b_, c_;
};

/// Central differences of W with step h.
Mat3 piola_stress(const StrainEnergy& W, const Mat3& F, double h = 1e-5);
/// Nested central differences of W with step h; exactly symmetric under
/// exchange of the index pairs (i,p) <-> (n,k).
Rank4Tensor elasticity_tensor(const StrainEnergy& W, const Mat3& F, double h = 1e-4);

/// Elasticity tensor of any admissible energy at F = I:
/// (c1^2 - 2 c2^2) d(i,p) d(n,k) + c2^2 (d(p,k) d(i,n) + d(p,n) d(i,k)).
Rank4Tensor elasticity_identity(double c1, double c2);

/// Null-Lagrangian correction c2^2 (d(p,m) d(q,r) - d(p,r) d(q,m)).
Rank4Tensor null_lagrangian(double c2);

/// Transformed tensor stored as t(p, q, m, r):
///   sum_{i,j,n,k} A(i,j,n,k) F(i,m) F(p,j) F(n,r) F(q,k) + null_lagrangian(c2)
/// where F = H^{-1} is the deformation gradient. It satisfies
/// t(p,q,m,r) = t(q,p,r,m) for every F.
Rank4Tensor ahat_from_elasticity(const Rank4Tensor& A, const Mat3& F, double c2);

/// Closed form at H = I: (c1^2 - c2^2) d(p,m) d(q,r) + c2^2 d(p,q) d(m,r).
Rank4Tensor ahat_identity(double c1, double c2);

/// Oldroyd-B form (F F^T)(p,q) (F^T F)(m,r) with F = H^{-1}.
Rank4Tensor oldroyd_b_ahat(const Mat3& H);

/// sum t(p,q,m,r) M(m,p) M(r,q).
double contract_quadratic(const Rank4Tensor& ahat, const Mat3& M);
/// sum t(p,q,m,r) M(m,p) N(r,q).
double contract_bilinear(const Rank4Tensor& ahat, const Mat3& M, const Mat3& N);

/// Symmetric 9x9 flattening Q[(m,p),(r,q)] of the quadratic form and its
/// smallest eigenvalue.
double min_eigenvalue(const Rank4Tensor& ahat);

/// Constitutive law seen by the solver: the tensor field H -> ahat(H).
class MaterialModel {
 public:
  explicit MaterialModel(MaterialParams p) : params_(p) { params_.validate(); }
  virtual ~MaterialModel() = default;

  virtual std::string name() const = 0;
  virtual Rank4Tensor ahat(const Mat3& H) const = 0;

  /// sum_{p,q,m,r} ahat(H)(p,q,m,r) H(m,i) dH[p](r,q), where dH[p] holds the
  /// derivative along axis p. Equals minus the divergence of the Cauchy stress.
  virtual Vec3 stress_force(const Mat3& H, const Mat3* dH) const;
  virtual double quadratic(const Mat3& H, const Mat3& M) const { return contract_quadratic(ahat(H), M); }

  const MaterialParams& params() const { return params_; }

 protected:
  MaterialParams params_;
};

/// Builtin isotropic energy. The analytic path evaluates the Hessian in closed
/// form; the finite-difference path differentiates W numerically.
class IsotropicModel : public MaterialModel {
 public:
  enum class Path { Analytic, FiniteDifference };
  IsotropicModel(const MaterialParams& p, Path path = Path::Analytic);

  std::string name() const override { return path_ == Path::Analytic ? "builtin" : "builtin-fd"; }
  Rank4Tensor ahat(const Mat3& H) const override;
  const IsotropicPolynomialEnergy& energy() const { return energy_; }

 private:
  IsotropicPolynomialEnergy energy_;
  StrainEnergy W_;
  Path path_;
};

/// Arbitrary strain energy, differentiated numerically.
class StrainEnergyModel : public MaterialModel {
 public:
  StrainEnergyModel(const MaterialParams& p, StrainEnergy W, double h = 1e-4)
      : MaterialModel(p), W_(std::move(W)), h_(h) {}

  std::string name() const override { return "strain-energy"; }
  Rank4Tensor ahat(const Mat3& H) const override;

 private:
  StrainEnergy W_;
  double h_;
};

/// Incompressible Oldroyd-B limit; requires c1 = c2 = 1.
class OldroydBModel : public MaterialModel {
 public:
  explicit OldroydBModel(const MaterialParams& p);

  std::string name() const override { return "oldroyd-b"; }
  Rank4Tensor ahat(const Mat3& H) const override { return oldroyd_b_ahat(H); }
  Vec3 stress_force(const Mat3& H, const Mat3* dH) const override;
  double quadratic(const Mat3& H, const Mat3& M) const override;
};

/// ahat frozen at its value for H = I.
class ConstantModel : public MaterialModel {
 public:
  explicit ConstantModel(const MaterialParams& p) : MaterialModel(p), id_(vela::ahat_identity(p.c1, p.c2)) {}

  std::string name() const override { return "constant"; }
  Rank4Tensor ahat(const Mat3&) const override { return id_; }

 private:
  Rank4Tensor id_;
};

/// Test fixture that breaks the cancellation condition:
///   ahat(H) = ahat(I) + k (H - I)(0,0) d(l,m) d(p,j).
class NullViolatingModel : public MaterialModel {
 public:
  NullViolatingModel(const MaterialParams& p, double strength = 1.0)
      : MaterialModel(p), id_(vela::ahat_identity(p.c1, p.c2)), strength_(strength) {}

  std::string name() const override { return "null-violating"; }
  Rank4Tensor ahat(const Mat3& H) const override;

 private:
  Rank4Tensor id_;
  double strength_;
};

/// Known names: builtin, builtin-fd, oldroyd-b, constant, null-violating.
std::unique_ptr<MaterialModel> make_model(const std::string& name, const MaterialParams& p);
std::vector<std::string> model_names();

struct LegendreHadamardResult {
  double min_value = 0.0;
  Vec3 xi{};
  Vec3 omega{};
};

/// Minimum of sum A(i,j,n,k) xi_j xi_k w_i w_n over sampled unit vectors.
LegendreHadamardResult legendre_hadamard_check(const Rank4Tensor& A, std::size_t samples,
                                               std::uint64_t seed);

struct PositivityScan {
  std::vector<double> radii;
  /// Smallest eigenvalue of the quadratic form over sampled H = I + X, |X| = radius.
  std::vector<double> min_eigenvalue;
  /// Largest sampled radius whose minimum stays at or above `floor`.
  double radius = 0.0;
  double floor = 0.0;
};

PositivityScan positivity_scan(const MaterialModel& model, const std::vector<double>& radii,
                               std::size_t samples, std::uint64_t seed, double floor);

}  // namespace vela
