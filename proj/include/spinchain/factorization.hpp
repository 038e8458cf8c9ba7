#ifndef SPINCHAIN_FACTORIZATION_HPP
#define SPINCHAIN_FACTORIZATION_HPP

#include <optional>

#include "spinchain/ldp.hpp"

namespace spinchain {

// Minimal constants of the two operator inequalities
//   omega_{km} <= beta_star * omega_m^{(x) k}   (upper)
//   omega_{km} >= alpha_star * omega_m^{(x) k}  (lower)
// where beta_star / alpha_star are the extreme eigenvalues of the
// sandwiched ratio (omega_m^{(x)k})^{-1/2} omega_{km} (omega_m^{(x)k})^{-1/2}
// restricted to the support of the tensor power. beta_star carries the
// (k-1)-st power of the per-boundary constant; the per-(k-1)-root values
// are reported alongside.
struct FactorizationReport {
  int m = 0;
  int k = 0;
  int l = 0;  // gap length; 0 except for weak_upper_check

  double beta_star = 0.0;  // +infinity when the upper support check fails
  double beta_star_root = 0.0;
  // nullopt ("NONE") when supp omega_m^{(x)k} is not contained in
  // supp omega_{km}; 0 marks a vanishing minimum on the common support.
  std::optional<double> alpha_star;
  std::optional<double> alpha_star_root;

  bool support_ok_upper = false;  // supp omega_{km} <= supp omega_m^{(x)k}
  bool support_ok_lower = false;  // supp omega_m^{(x)k} <= supp omega_{km}

  // Independent re-verification: min eigenvalue of
  // beta_star * omega_m^{(x)k} - omega_{km} (resp. the lower witness).
  double upper_witness_min_eigenvalue = 0.0;
  double lower_witness_min_eigenvalue = 0.0;
};

// Core computation on explicit restriction densities.
FactorizationReport minimal_constants(const Matrix& omega_m,
                                      const Matrix& omega_km, int m, int k,
                                      double psd_tol = -1.0);

// Restrictions drawn from an arbitrary state source n -> omega_n.
FactorizationReport minimal_constants(const std::function<Matrix(int)>& omega_n,
                                      int m, int k, double psd_tol = -1.0);

// Restrictions of a finitely correlated state.
FactorizationReport minimal_constants(const GeneratingTriple& triple, int m,
                                      int k, Index cap = kDefaultCap,
                                      double psd_tol = -1.0);

// Uniform upper factorization certificate for a finitely correlated
// state: beta = d_K / min eigenvalue of rho works for every (m, k). The
// certificate is verified at the requested (m, k) by an eigensolve of
// the witness and compared against the minimal constant.
struct UpperCertificate {
  double beta_certified = 0.0;         // d_K / min eig rho
  double rho_min_eigenvalue = 0.0;
  double witness_min_eigenvalue = 0.0; // min eig of beta^{k-1} w^k - w_km
  bool psd_ok = false;
  double beta_star_root = 0.0;         // measured minimal per-root constant
  bool dominates = false;              // beta_certified >= beta_star_root
  FactorizationReport measured;
};

UpperCertificate fcs_upper_certificate(const GeneratingTriple& triple, int m,
                                       int k, Index cap = kDefaultCap,
                                       double psd_tol = -1.0);

// Lower-factorization criteria for hidden Markov states: strict
// positivity of the transition matrix, plus equality of the emission
// supports across the first (lf11) or second (lf21) index.
struct LowerCriteria {
  bool markov_tp = false;  // all T entries > entry_tol
  bool lf11 = false;       // markov_tp and supp theta_{xy} independent of x
  bool lf21 = false;       // markov_tp and supp theta_{xy} independent of y
};

LowerCriteria hmm_lower_criteria(const HiddenMarkovSpec& spec,
                                 double entry_tol = 1e-12,
                                 double support_tol = 1e-8);

// Restriction of a km + (k-1)l site density to k blocks of length m
// separated by gaps of length l (partial trace over the gap sites).
Matrix weak_block_restriction(const Matrix& omega_chain, Index d_A, int m,
                              int l, int k);

// Weak upper factorization probe: minimal constants of the gapped
// k-block restriction against the tensor power of the single block.
FactorizationReport weak_upper_check(const GeneratingTriple& triple, int m,
                                     int l, int k, Index cap = kDefaultCap,
                                     double psd_tol = -1.0);

// Minimal constants for local Gibbs states of a finite-range
// interaction; the per-k-root probes uniformity of the estimate in k.
struct GibbsFactorizationEstimate {
  FactorizationReport report;
  double beta_per_k_root = 0.0;
};

GibbsFactorizationEstimate gibbs_factorization_estimate(
    const Interaction& phi, int m, int k, Index cap = kDefaultCap,
    double psd_tol = -1.0);

}  // namespace spinchain

#endif
