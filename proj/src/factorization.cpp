#include "spinchain/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spinchain {

namespace {

double per_root(double value, int k) {
  if (k <= 1) return value;
  if (std::isinf(value)) return value;
  return value > 0.0 ? std::pow(value, 1.0 / (k - 1)) : 0.0;
}

}  // namespace

FactorizationReport minimal_constants(const Matrix& omega_m,
                                      const Matrix& omega_km, int m, int k,
                                      double psd_tol) {
  if (m < 1 || k < 1)
    throw std::invalid_argument("minimal_constants: m, k must be >= 1");
  Matrix power = tensor_power(omega_m, k);
  if (power.rows() != omega_km.rows())
    throw DimensionError(
        "minimal_constants: omega_km does not act on k blocks of omega_m");

  Matrix w_km = 0.5 * (omega_km + omega_km.adjoint());
  power = 0.5 * (power + power.adjoint());
  const Index dim = power.rows();
  const double tol = psd_tol > 0 ? psd_tol : scale_tol(w_km);

  FactorizationReport out;
  out.m = m;
  out.k = k;

  Matrix q = support_projection(power);
  Matrix r = support_projection(w_km);
  Matrix cq = identity(dim) - q;
  Matrix cr = identity(dim) - r;
  out.support_ok_upper = (cq * w_km * cq).trace().real() <= tol;
  out.support_ok_lower = (cr * power * cr).trace().real() <= tol;

  Matrix inv_half = matrix_power(power, -0.5);
  Matrix sandwich = inv_half * w_km * inv_half;
  sandwich = 0.5 * (sandwich + sandwich.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sandwich);
  const int rank = static_cast<int>(std::lround(q.trace().real()));

  if (out.support_ok_upper) {
    out.beta_star = std::max(es.eigenvalues().maxCoeff(), 0.0);
    out.beta_star_root = per_root(out.beta_star, k);
    Matrix witness = out.beta_star * power - w_km;
    Eigen::SelfAdjointEigenSolver<Matrix> wit(witness, Eigen::EigenvaluesOnly);
    out.upper_witness_min_eigenvalue = wit.eigenvalues().minCoeff();
  } else {
    out.beta_star = std::numeric_limits<double>::infinity();
    out.beta_star_root = out.beta_star;
  }

  if (out.support_ok_lower) {
    // Smallest sandwich eigenvalue on the support of the tensor power:
    // the dim - rank trailing zeros off the support do not count.
    double alpha = std::max(es.eigenvalues()[dim - rank], 0.0);
    out.alpha_star = alpha;
    out.alpha_star_root = per_root(alpha, k);
    Matrix witness = w_km - alpha * power;
    Eigen::SelfAdjointEigenSolver<Matrix> wit(witness, Eigen::EigenvaluesOnly);
    out.lower_witness_min_eigenvalue = wit.eigenvalues().minCoeff();
  }
  return out;
}

FactorizationReport minimal_constants(const std::function<Matrix(int)>& omega_n,
                                      int m, int k, double psd_tol) {
  return minimal_constants(omega_n(m), omega_n(k * m), m, k, psd_tol);
}

FactorizationReport minimal_constants(const GeneratingTriple& triple, int m,
                                      int k, Index cap, double psd_tol) {
  return minimal_constants(local_density(triple, m, cap),
                           local_density(triple, k * m, cap), m, k, psd_tol);
}

UpperCertificate fcs_upper_certificate(const GeneratingTriple& triple, int m,
                                       int k, Index cap, double psd_tol) {
  Matrix w_m = local_density(triple, m, cap);
  Matrix w_km = local_density(triple, k * m, cap);

  UpperCertificate out;
  Eigen::SelfAdjointEigenSolver<Matrix> rho_es(triple.rho,
                                               Eigen::EigenvaluesOnly);
  out.rho_min_eigenvalue = rho_es.eigenvalues().minCoeff();
  if (out.rho_min_eigenvalue <= 0)
    throw std::invalid_argument("fcs_upper_certificate: rho is not faithful");
  out.beta_certified =
      static_cast<double>(triple.d_B) / out.rho_min_eigenvalue;

  Matrix power = tensor_power(w_m, k);
  Matrix witness =
      std::pow(out.beta_certified, k - 1) * power - w_km;
  witness = 0.5 * (witness + witness.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> wit(witness, Eigen::EigenvaluesOnly);
  out.witness_min_eigenvalue = wit.eigenvalues().minCoeff();
  const double tol = psd_tol > 0 ? psd_tol : scale_tol(witness);
  out.psd_ok = out.witness_min_eigenvalue >= -tol;

  out.measured = minimal_constants(w_m, w_km, m, k, psd_tol);
  out.beta_star_root = out.measured.beta_star_root;
  out.dominates = out.beta_certified >= out.beta_star_root - 1e-9;
  return out;
}

LowerCriteria hmm_lower_criteria(const HiddenMarkovSpec& spec,
                                 double entry_tol, double support_tol) {
  validate_hidden_markov(spec);
  const Index n = spec.T.rows();

  LowerCriteria out;
  out.markov_tp = spec.T.minCoeff() > entry_tol;
  if (!out.markov_tp) return out;

  auto supports_agree = [&](const Matrix& a, const Matrix& b) {
    Matrix pa = support_projection(a);
    Matrix pb = support_projection(b);
    return (pa - pb).cwiseAbs().maxCoeff() <= support_tol;
  };

  out.lf11 = true;  // supp theta_{xy} independent of the first index
  for (Index y = 0; y < n && out.lf11; ++y)
    for (Index x = 1; x < n && out.lf11; ++x)
      out.lf11 = supports_agree(spec.theta[0][y], spec.theta[x][y]);

  out.lf21 = true;  // supp theta_{xy} independent of the second index
  for (Index x = 0; x < n && out.lf21; ++x)
    for (Index y = 1; y < n && out.lf21; ++y)
      out.lf21 = supports_agree(spec.theta[x][0], spec.theta[x][y]);
  return out;
}

Matrix weak_block_restriction(const Matrix& omega_chain, Index d_A, int m,
                              int l, int k) {
  if (m < 1 || l < 0 || k < 1)
    throw std::invalid_argument(
        "weak_block_restriction: need m >= 1, l >= 0, k >= 1");
  const int n = k * m + (k - 1) * l;
  Index dim = 1;
  for (int i = 0; i < n; ++i) dim *= d_A;
  if (omega_chain.rows() != dim)
    throw DimensionError("weak_block_restriction: chain dimension mismatch");

  std::vector<Index> dims(static_cast<size_t>(n), d_A);
  std::vector<int> keep;
  for (int block = 0; block < k; ++block)
    for (int site = 0; site < m; ++site)
      keep.push_back(block * (m + l) + site);
  return partial_trace(omega_chain, dims, keep);
}

FactorizationReport weak_upper_check(const GeneratingTriple& triple, int m,
                                     int l, int k, Index cap,
                                     double psd_tol) {
  const int n = k * m + (k - 1) * l;
  Matrix chain = local_density(triple, n, cap);
  Matrix blocks = weak_block_restriction(chain, triple.d_A, m, l, k);
  FactorizationReport out =
      minimal_constants(local_density(triple, m, cap), blocks, m, k, psd_tol);
  out.l = l;
  return out;
}

GibbsFactorizationEstimate gibbs_factorization_estimate(
    const Interaction& phi, int m, int k, Index cap, double psd_tol) {
  Matrix g_m = gibbs_local_state(phi, m, cap);
  Matrix g_km = gibbs_local_state(phi, k * m, cap);
  GibbsFactorizationEstimate out;
  out.report = minimal_constants(g_m, g_km, m, k, psd_tol);
  out.beta_per_k_root = std::isinf(out.report.beta_star)
                            ? out.report.beta_star
                            : std::pow(std::max(out.report.beta_star, 0.0),
                                       1.0 / k);
  return out;
}

}  // namespace spinchain
