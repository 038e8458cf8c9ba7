#include "spinchain/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spinchain {

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    throw DimensionError("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

KrausMap::KrausMap(Index in, Index out, std::vector<Matrix> ops)
    : in_dim(in), out_dim(out), kraus(std::move(ops)) {
  for (const Matrix& k : kraus)
    if (k.rows() != out_dim || k.cols() != in_dim)
      throw DimensionError("KrausMap: operator shape mismatch");
}

Matrix KrausMap::apply(const Matrix& x) const {
  if (x.rows() != in_dim || x.cols() != in_dim)
    throw DimensionError("KrausMap::apply: dimension mismatch");
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (const Matrix& k : kraus) out += k * x * k.adjoint();
  return out;
}

KrausMap KrausMap::adjoint() const {
  std::vector<Matrix> ops;
  ops.reserve(kraus.size());
  for (const Matrix& k : kraus) ops.push_back(k.adjoint());
  return KrausMap(out_dim, in_dim, std::move(ops));
}

Matrix KrausMap::superoperator() const {
  // Column-major vec: vec(K X K^*) = (conj(K) kron K) vec(X), with
  // conj(K) indexing the column factor of the output/input indices.
  Matrix s = Matrix::Zero(out_dim * out_dim, in_dim * in_dim);
  for (const Matrix& k : kraus)
    for (Index b = 0; b < out_dim; ++b)
      for (Index j = 0; j < in_dim; ++j)
        s.block(b * out_dim, j * in_dim, out_dim, in_dim) +=
            std::conj(k(b, j)) * k;
  return s;
}

bool KrausMap::is_unital(double tol) const {
  return unitality_residual() <= tol;
}

double KrausMap::unitality_residual() const {
  return (apply(identity(in_dim)) - identity(out_dim)).cwiseAbs().maxCoeff();
}

Superoperator Superoperator::from_kraus(const KrausMap& k) {
  Superoperator s;
  s.in_dim = k.in_dim;
  s.out_dim = k.out_dim;
  s.mat = k.superoperator();
  return s;
}

Superoperator Superoperator::from_function(
    Index in_dim, Index out_dim,
    const std::function<Matrix(const Matrix&)>& f) {
  Superoperator s;
  s.in_dim = in_dim;
  s.out_dim = out_dim;
  s.mat = Matrix::Zero(out_dim * out_dim, in_dim * in_dim);
  Matrix e = Matrix::Zero(in_dim, in_dim);
  for (Index j = 0; j < in_dim; ++j)
    for (Index i = 0; i < in_dim; ++i) {
      e(i, j) = 1.0;
      s.mat.col(i + j * in_dim) = vec(f(e));
      e(i, j) = 0.0;
    }
  return s;
}

Matrix Superoperator::apply(const Matrix& x) const {
  if (x.rows() != in_dim || x.cols() != in_dim)
    throw DimensionError("Superoperator::apply: dimension mismatch");
  return unvec(mat * vec(x), out_dim, out_dim);
}

Superoperator Superoperator::adjoint() const {
  Superoperator s;
  s.in_dim = out_dim;
  s.out_dim = in_dim;
  s.mat = mat.adjoint();
  return s;
}

Superoperator Superoperator::compose(const Superoperator& inner) const {
  if (inner.out_dim != in_dim)
    throw DimensionError("Superoperator::compose: dimension mismatch");
  Superoperator s;
  s.in_dim = inner.in_dim;
  s.out_dim = out_dim;
  s.mat = mat * inner.mat;
  return s;
}

Superoperator Superoperator::scaled(double c) const {
  Superoperator s = *this;
  s.mat *= c;
  return s;
}

Matrix choi_matrix(const Superoperator& phi) {
  Index din = phi.in_dim, dout = phi.out_dim;
  Matrix c = Matrix::Zero(din * dout, din * dout);
  for (Index i = 0; i < din; ++i)
    for (Index j = 0; j < din; ++j) {
      Matrix block = unvec(phi.mat.col(i + j * din), dout, dout);
      c.block(i * dout, j * dout, dout, dout) = block;
    }
  return c;
}

Matrix choi_matrix(const KrausMap& k) {
  return choi_matrix(Superoperator::from_kraus(k));
}

ChoiReport choi_and_cp_check(const Superoperator& phi, double psd_tol) {
  ChoiReport r;
  r.choi = choi_matrix(phi);
  if (psd_tol < 0) psd_tol = scale_tol(r.choi);
  if (hermiticity_error(r.choi) > psd_tol) {
    r.min_eigenvalue = -std::numeric_limits<double>::infinity();
    r.completely_positive = false;
    return r;
  }
  Matrix h = 0.5 * (r.choi + r.choi.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.completely_positive = r.min_eigenvalue >= -psd_tol;
  return r;
}

ChoiReport choi_and_cp_check(const KrausMap& k, double psd_tol) {
  return choi_and_cp_check(Superoperator::from_kraus(k), psd_tol);
}

SpectrumReport superoperator_spectrum(const Superoperator& phi) {
  if (phi.in_dim != phi.out_dim)
    throw DimensionError("superoperator_spectrum: map is not square");
  Eigen::ComplexEigenSolver<Matrix> es(phi.mat, false);
  SpectrumReport r;
  r.eigenvalues = es.eigenvalues();
  r.spectral_radius = r.eigenvalues.cwiseAbs().maxCoeff();
  return r;
}

namespace {

struct PositivityCheck {
  Matrix hermitian_part;
  bool strictly_positive = false;
};

// Phase-fix an eigenvector candidate so its trace is real positive,
// take the Hermitian part and test strict positivity.
PositivityCheck strictly_positive_eigenvector(const Matrix& m,
                                              double strict_pos_tol) {
  PositivityCheck out;
  Complex tr = m.trace();
  Matrix rotated = m;
  if (std::abs(tr) > 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    rotated = (std::abs(tr) / tr) * m;
  out.hermitian_part = 0.5 * (rotated + rotated.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(out.hermitian_part,
                                           Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  out.strictly_positive = hi > 0 && lo > strict_pos_tol * hi;
  return out;
}

int rank_deficiency(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const RealVector& sv = svd.singularValues();
  double top = sv.size() ? sv[0] : 0.0;
  int n = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] <= rel_tol * std::max(top, 1.0)) ++n;
  return n;
}

}  // namespace

PositivityStructure classify_positivity_structure(const Superoperator& phi,
                                                  double peripheral_tol,
                                                  double eig_cluster_tol,
                                                  double strict_pos_tol) {
  if (phi.in_dim != phi.out_dim)
    throw DimensionError("classify_positivity_structure: map is not square");
  const Index d = phi.in_dim;

  Eigen::ComplexEigenSolver<Matrix> es(phi.mat, true);
  const Vector& ev = es.eigenvalues();
  double r = ev.cwiseAbs().maxCoeff();
  if (r < 1e-13)
    throw std::invalid_argument(
        "classify_positivity_structure: spectral radius is numerically zero");

  PositivityStructure out;
  out.perron.spectral_radius = r;

  for (Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i]) >= r * (1.0 - peripheral_tol))
      out.perron.peripheral_eigenvalues.push_back(ev[i]);

  // Eigenvalue cluster at the positive real value r.
  int cluster = 0;
  Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ev.size(); ++i) {
    double dist = std::abs(ev[i] - Complex(r, 0.0));
    if (dist <= eig_cluster_tol * r) ++cluster;
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }

  // Cross-check geometric multiplicity by the rank of (Phi - r id).
  Matrix shifted = phi.mat - r * Matrix::Identity(d * d, d * d);
  int svd_mult = rank_deficiency(shifted, eig_cluster_tol * std::max(r, 1.0));
  out.perron.geometric_multiplicity = svd_mult > 0 ? svd_mult : cluster;
  out.perron.conditioning_warning = (svd_mult != cluster);

  Matrix right = unvec(es.eigenvectors().col(best), d, d);
  PositivityCheck right_check =
      strictly_positive_eigenvector(right, strict_pos_tol);
  out.perron.right_vector = right_check.hermitian_part;
  out.perron.right_strictly_positive = right_check.strictly_positive;

  Eigen::ComplexEigenSolver<Matrix> esa(Matrix(phi.mat.adjoint()), true);
  Index besta = 0;
  double besta_dist = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < esa.eigenvalues().size(); ++i) {
    double dist = std::abs(esa.eigenvalues()[i] - Complex(r, 0.0));
    if (dist < besta_dist) {
      besta_dist = dist;
      besta = i;
    }
  }
  Matrix left = unvec(esa.eigenvectors().col(besta), d, d);
  PositivityCheck left_check =
      strictly_positive_eigenvector(left, strict_pos_tol);
  Matrix left_h = left_check.hermitian_part;
  double tr = left_h.trace().real();
  if (std::abs(tr) > 1e-14) left_h /= tr;
  out.perron.left_density = left_h;
  out.perron.left_strictly_positive = left_check.strictly_positive;

  bool simple = out.perron.geometric_multiplicity == 1 &&
                best_dist <= eig_cluster_tol * r &&
                besta_dist <= eig_cluster_tol * r;
  out.irreducible = simple && out.perron.right_strictly_positive &&
                    out.perron.left_strictly_positive;
  out.primitive =
      out.irreducible && out.perron.peripheral_eigenvalues.size() == 1;
  return out;
}

CpOrderResult cp_order_gap(const Superoperator& phi, const Superoperator& psi,
                           double psd_tol) {
  if (phi.in_dim != psi.in_dim || phi.out_dim != psi.out_dim)
    throw DimensionError("cp_order_gap: dimension mismatch");
  Matrix c_phi = 0.5 * (choi_matrix(phi) + choi_matrix(phi).adjoint());
  Matrix c_psi = 0.5 * (choi_matrix(psi) + choi_matrix(psi).adjoint());
  if (psd_tol < 0) psd_tol = std::max(scale_tol(c_phi), scale_tol(c_psi));

  CpOrderResult out;
  Matrix p = support_projection(c_psi, psd_tol);
  Matrix q = identity(p.rows()) - p;
  double leak = (q * c_phi * q).trace().real();
  if (leak > std::sqrt(psd_tol)) {
    out.finite = false;
    return out;
  }

  Matrix w = matrix_power(c_psi, -0.5, psd_tol);
  Matrix sandwich = w * c_phi * w;
  sandwich = 0.5 * (sandwich + sandwich.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sandwich, Eigen::EigenvaluesOnly);
  out.finite = true;
  out.beta = std::max(0.0, es.eigenvalues().maxCoeff());

  Matrix witness = out.beta * c_psi - c_phi;
  Eigen::SelfAdjointEigenSolver<Matrix> esw(
      Matrix(0.5 * (witness + witness.adjoint())), Eigen::EigenvaluesOnly);
  out.witness_min_eigenvalue = esw.eigenvalues().minCoeff();
  return out;
}

RateCurve asymptotic_rate_curve(const Superoperator& phi, const Matrix& weight,
                                const Matrix& x, int n_max) {
  if (phi.in_dim != phi.out_dim)
    throw DimensionError("asymptotic_rate_curve: map is not square");
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        Matrix(0.5 * (x + x.adjoint())), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0)
      throw std::invalid_argument(
          "asymptotic_rate_curve: x is not strictly positive");
  }
  if (weight.cwiseAbs().maxCoeff() <= 0)
    throw std::invalid_argument("asymptotic_rate_curve: zero functional");

  RateCurve out;
  out.limit_log_r = std::log(superoperator_spectrum(phi).spectral_radius);

  Matrix cur = x;
  double log_scale = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    cur = phi.apply(cur);
    double s = cur.cwiseAbs().maxCoeff();
    if (s > 0) {
      cur /= s;
      log_scale += std::log(s);
    }
    double val = (weight.adjoint() * cur).trace().real();
    out.values.push_back((log_scale + std::log(val)) / n);
  }
  out.deviation_at_end =
      std::abs(out.values.back() - out.limit_log_r);
  return out;
}

}  // namespace spinchain
