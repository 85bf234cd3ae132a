#include "vela/constitutive.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "vela/error.hpp"
#include "vela/rng.hpp"

namespace vela {

namespace {

double kd(int a, int b) { return a == b ? 1.0 : 0.0; }

Mat3 unit(int i, int j) {
  Mat3 e;
  e(i, j) = 1.0;
  return e;
}

}  // namespace

void MaterialParams::validate() const {
  if (!(c2 > 0.0) || !std::isfinite(c2)) throw DomainError("c2 must be positive");
  if (!(c1 >= c2) || !std::isfinite(c1)) throw DomainError("c1 must satisfy c1 >= c2");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("nu must be non-negative");
}

double StrainEnergy::operator()(const Mat3& F) const {
  const double w = f_(F);
  if (!std::isfinite(w)) throw EvaluationError("strain energy is not finite");
  return w;
}

// ---- builtin energy

IsotropicPolynomialEnergy::IsotropicPolynomialEnergy(const MaterialParams& p) {
  p.validate();
  // At F = I the Hessian is 8c d(i,p)d(n,k) + (2a + 8b) d(i,n)d(p,k) + 4b d(i,k)d(n,p)
  // and the stress is 2a + 4b; matching elasticity_identity with zero stress gives
  const double s2 = p.c2 * p.c2;
  b_ = s2 / 4.0;
  a_ = -2.0 * b_;
  c_ = (p.c1 * p.c1 - 2.0 * s2) / 8.0;
}

double IsotropicPolynomialEnergy::value(const Mat3& F) const {
  const Mat3 C = matmul(transpose(F), F);
  const double i1 = trace(C) - 3.0;
  const double i2 = frob(C, C) - 3.0;
  return a_ * i1 + b_ * i2 + c_ * i1 * i1;
}

Mat3 IsotropicPolynomialEnergy::stress(const Mat3& F) const {
  const Mat3 C = matmul(transpose(F), F);
  const double d1 = a_ + 2.0 * c_ * (trace(C) - 3.0);
  return 2.0 * d1 * F + 4.0 * b_ * matmul(F, C);
}

Rank4Tensor IsotropicPolynomialEnergy::elasticity(const Mat3& F) const {
  const Mat3 C = matmul(transpose(F), F);
  const Mat3 B = matmul(F, transpose(F));
  const double d1 = a_ + 2.0 * c_ * (trace(C) - 3.0);
  const double d11 = 2.0 * c_;
  Rank4Tensor t;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p)
      for (int n = 0; n < 3; ++n)
        for (int k = 0; k < 3; ++k) {
          t(i, p, n, k) = 4.0 * d11 * F(i, p) * F(n, k) + 2.0 * d1 * kd(i, n) * kd(p, k) +
                          4.0 * b_ * (kd(i, n) * C(k, p) + F(i, k) * F(n, p) + B(i, n) * kd(p, k));
        }
  return t;
}

StrainEnergy IsotropicPolynomialEnergy::as_strain_energy() const {
  IsotropicPolynomialEnergy copy = *this;
  return StrainEnergy([copy](const Mat3& F) { return copy.value(F); }, StrainEnergy::Kind::BuiltinIsotropic);
}

// ---- finite differences

Mat3 piola_stress(const StrainEnergy& W, const Mat3& F, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  Mat3 S;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p) {
      const Mat3 e = h * unit(i, p);
      S(i, p) = (W(F + e) - W(F - e)) / (2.0 * h);
    }
  return S;
}

Rank4Tensor elasticity_tensor(const StrainEnergy& W, const Mat3& F, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  Rank4Tensor t;
  for (int a = 0; a < 9; ++a)
    for (int b = a; b < 9; ++b) {
      const Mat3 ea = h * unit(a / 3, a % 3);
      const Mat3 eb = h * unit(b / 3, b % 3);
      const double v = (W(F + ea + eb) - W(F + ea - eb) - W(F - ea + eb) + W(F - ea - eb)) / (4.0 * h * h);
      t(a / 3, a % 3, b / 3, b % 3) = v;
      t(b / 3, b % 3, a / 3, a % 3) = v;
    }
  return t;
}

// ---- transformed tensor

Rank4Tensor elasticity_identity(double c1, double c2) {
  Rank4Tensor t;
  const double s2 = c2 * c2;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p)
      for (int n = 0; n < 3; ++n)
        for (int k = 0; k < 3; ++k)
          t(i, p, n, k) = (c1 * c1 - 2.0 * s2) * kd(i, p) * kd(n, k) +
                          s2 * (kd(p, k) * kd(i, n) + kd(p, n) * kd(i, k));
  return t;
}

Rank4Tensor null_lagrangian(double c2) {
  Rank4Tensor t;
  const double s2 = c2 * c2;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int m = 0; m < 3; ++m)
        for (int r = 0; r < 3; ++r) t(p, q, m, r) = s2 * (kd(p, m) * kd(q, r) - kd(p, r) * kd(q, m));
  return t;
}

Rank4Tensor ahat_from_elasticity(const Rank4Tensor& A, const Mat3& F, double c2) {
  // Contract one index at a time: 4 * 243 multiply-adds instead of 81 * 81.
  Rank4Tensor t1, t2, t3;
  for (int m = 0; m < 3; ++m)
    for (int j = 0; j < 3; ++j)
      for (int n = 0; n < 3; ++n)
        for (int k = 0; k < 3; ++k)
          t1(m, j, n, k) = F(0, m) * A(0, j, n, k) + F(1, m) * A(1, j, n, k) + F(2, m) * A(2, j, n, k);
  for (int m = 0; m < 3; ++m)
    for (int p = 0; p < 3; ++p)
      for (int n = 0; n < 3; ++n)
        for (int k = 0; k < 3; ++k)
          t2(m, p, n, k) = F(p, 0) * t1(m, 0, n, k) + F(p, 1) * t1(m, 1, n, k) + F(p, 2) * t1(m, 2, n, k);
  for (int m = 0; m < 3; ++m)
    for (int p = 0; p < 3; ++p)
      for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k)
          t3(m, p, r, k) = F(0, r) * t2(m, p, 0, k) + F(1, r) * t2(m, p, 1, k) + F(2, r) * t2(m, p, 2, k);
  Rank4Tensor out = null_lagrangian(c2);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int m = 0; m < 3; ++m)
        for (int r = 0; r < 3; ++r)
          out(p, q, m, r) += F(q, 0) * t3(m, p, r, 0) + F(q, 1) * t3(m, p, r, 1) + F(q, 2) * t3(m, p, r, 2);
  return out;
}

Rank4Tensor ahat_identity(double c1, double c2) {
  Rank4Tensor t;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int m = 0; m < 3; ++m)
        for (int r = 0; r < 3; ++r)
          t(p, q, m, r) = (c1 * c1 - c2 * c2) * kd(p, m) * kd(q, r) + c2 * c2 * kd(p, q) * kd(m, r);
  return t;
}

Rank4Tensor oldroyd_b_ahat(const Mat3& H) {
  const Mat3 F = inverse(H);
  const Mat3 B = matmul(F, transpose(F));
  const Mat3 C = matmul(transpose(F), F);
  Rank4Tensor t;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int m = 0; m < 3; ++m)
        for (int r = 0; r < 3; ++r) t(p, q, m, r) = B(p, q) * C(m, r);
  return t;
}

double contract_bilinear(const Rank4Tensor& ahat, const Mat3& M, const Mat3& N) {
  double s = 0.0;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int m = 0; m < 3; ++m)
        for (int r = 0; r < 3; ++r) s += ahat(p, q, m, r) * M(m, p) * N(r, q);
  return s;
}

double contract_quadratic(const Rank4Tensor& ahat, const Mat3& M) { return contract_bilinear(ahat, M, M); }

double min_eigenvalue(const Rank4Tensor& ahat) {
  Eigen::Matrix<double, 9, 9> q;
  for (int m = 0; m < 3; ++m)
    for (int p = 0; p < 3; ++p)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) q(m * 3 + p, r * 3 + s) = ahat(p, s, m, r);
  const Eigen::Matrix<double, 9, 9> sym = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---- models

Vec3 MaterialModel::stress_force(const Mat3& H, const Mat3* dH) const {
  const Rank4Tensor t = ahat(H);
  double w[3][3][3] = {};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int m = 0; m < 3; ++m)
        w[p][q][m] = t(p, q, m, 0) * dH[p](0, q) + t(p, q, m, 1) * dH[p](1, q) + t(p, q, m, 2) * dH[p](2, q);
  Vec3 f{};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 3; ++i) f[i] += w[p][q][m] * H(m, i);
  return f;
}

IsotropicModel::IsotropicModel(const MaterialParams& p, Path path)
    : MaterialModel(p), energy_(p), W_(energy_.as_strain_energy()), path_(path) {}

Rank4Tensor IsotropicModel::ahat(const Mat3& H) const {
  const Mat3 F = inverse(H);
  if (path_ == Path::FiniteDifference) return ahat_from_elasticity(elasticity_tensor(W_, F), F, params_.c2);
  // Push-forward of the analytic Hessian term by term:
  //   F(i,p) F(n,k)      -> (BF)(p,m) (BF)(q,r)
  //   d(i,n) d(p,k)      -> C(m,r) B(p,q)
  //   d(i,n) C(k,p)      -> C(m,r) B^2(p,q)
  //   F(i,k) F(n,p)      -> (FC)(q,m) (FC)(p,r)
  //   B(i,n) d(p,k)      -> C^2(m,r) B(p,q)
  const Mat3 C = matmul(transpose(F), F);
  const Mat3 B = matmul(F, transpose(F));
  const Mat3 BF = matmul(B, F), FC = matmul(F, C), B2 = matmul(B, B), C2 = matmul(C, C);
  const double d1 = energy_.a() + 2.0 * energy_.c() * (trace(C) - 3.0);
  const double d11 = 2.0 * energy_.c();
  const double b4 = 4.0 * energy_.b();
  const double c2 = params_.c2 * params_.c2;
  Rank4Tensor t;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int m = 0; m < 3; ++m)
        for (int r = 0; r < 3; ++r)
          t(p, q, m, r) = 4.0 * d11 * BF(p, m) * BF(q, r) + 2.0 * d1 * C(m, r) * B(p, q) +
                          b4 * (C(m, r) * B2(p, q) + FC(q, m) * FC(p, r) + C2(m, r) * B(p, q)) +
                          c2 * (kd(p, m) * kd(q, r) - kd(p, r) * kd(q, m));
  return t;
}

Rank4Tensor StrainEnergyModel::ahat(const Mat3& H) const {
  const Mat3 F = inverse(H);
  return ahat_from_elasticity(elasticity_tensor(W_, F, h_), F, params_.c2);
}

OldroydBModel::OldroydBModel(const MaterialParams& p) : MaterialModel(p) {
  if (p.c1 != 1.0 || p.c2 != 1.0) throw DomainError("oldroyd-b requires c1 = c2 = 1");
}

Vec3 OldroydBModel::stress_force(const Mat3& H, const Mat3* dH) const {
  // With F = H^{-1}: sum_m C(m,r) H(m,i) = F(i,r), so the force reduces to
  // sum B(p,q) F(i,r) dH[p](r,q).
  const Mat3 F = inverse(H);
  const Mat3 B = matmul(F, transpose(F));
  Mat3 g;  // g(r, p) = sum_q B(p,q) dH[p](r,q)
  for (int p = 0; p < 3; ++p)
    for (int r = 0; r < 3; ++r) g(r, p) = B(p, 0) * dH[p](r, 0) + B(p, 1) * dH[p](r, 1) + B(p, 2) * dH[p](r, 2);
  Vec3 f{};
  for (int i = 0; i < 3; ++i)
    for (int r = 0; r < 3; ++r) f[i] += F(i, r) * (g(r, 0) + g(r, 1) + g(r, 2));
  return f;
}

double OldroydBModel::quadratic(const Mat3& H, const Mat3& M) const {
  const Mat3 F = inverse(H);
  const Mat3 B = matmul(F, transpose(F));
  const Mat3 C = matmul(transpose(F), F);
  return frob(B, matmul(transpose(M), matmul(C, M)));
}

Rank4Tensor NullViolatingModel::ahat(const Mat3& H) const {
  Rank4Tensor t = id_;
  const double s = strength_ * (H(0, 0) - 1.0);
  for (int l = 0; l < 3; ++l)
    for (int p = 0; p < 3; ++p) t(l, l, p, p) += s;
  return t;
}

std::vector<std::string> model_names() { return {"builtin", "builtin-fd", "oldroyd-b", "constant", "null-violating"}; }

std::unique_ptr<MaterialModel> make_model(const std::string& name, const MaterialParams& p) {
  if (name == "builtin") return std::make_unique<IsotropicModel>(p, IsotropicModel::Path::Analytic);
  if (name == "builtin-fd") return std::make_unique<IsotropicModel>(p, IsotropicModel::Path::FiniteDifference);
  if (name == "oldroyd-b") return std::make_unique<OldroydBModel>(p);
  if (name == "constant") return std::make_unique<ConstantModel>(p);
  if (name == "null-violating") return std::make_unique<NullViolatingModel>(p);
  throw DomainError("unknown material model '" + name + "'");
}

// ---- checks

LegendreHadamardResult legendre_hadamard_check(const Rank4Tensor& A, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("need at least one sample");
  CounterRng rng(seed, 0x4c48);
  LegendreHadamardResult best;
  best.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec3 xi = rng.next_on_sphere();
    const Vec3 w = rng.next_on_sphere();
    double v = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int n = 0; n < 3; ++n)
          for (int k = 0; k < 3; ++k) v += A(i, j, n, k) * xi[j] * xi[k] * w[i] * w[n];
    if (v < best.min_value) best = {v, xi, w};
  }
  return best;
}

PositivityScan positivity_scan(const MaterialModel& model, const std::vector<double>& radii, std::size_t samples,
                               std::uint64_t seed, double floor) {
  PositivityScan out;
  out.radii = radii;
  out.floor = floor;
  CounterRng rng(seed, 0x504f53);
  bool intact = true;
  for (double r : radii) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
      Mat3 x;
      for (auto& v : x.a) v = rng.next_normal();
      const Mat3 H = Mat3::identity() + (r / frob_norm(x)) * x;
      lo = std::min(lo, min_eigenvalue(model.ahat(H)));
    }
    out.min_eigenvalue.push_back(lo);
    if (intact && lo >= floor)
      out.radius = r;
    else
      intact = false;
  }
  return out;
}

}  // namespace vela
