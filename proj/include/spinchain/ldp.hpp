#ifndef SPINCHAIN_LDP_HPP
#define SPINCHAIN_LDP_HPP

#include <functional>
#include <utility>
#include <vector>

#include "spinchain/fcs.hpp"

namespace spinchain {

// Translation-invariant finite-range interaction. window_terms[L-1] is
// the term for the interval [1, L]; translation generates all others.
// Open boundary conditions: H_n sums the windows fully inside [1, n].
struct Interaction {
  Index d_A = 0;
  int range = 0;  // d(Phi)
  std::vector<Matrix> window_terms;  // L = 1 .. range + 1
};

void validate_interaction(const Interaction& phi, double tol = 1e-8);

Matrix local_hamiltonian(const Interaction& phi, int n,
                         Index cap = kDefaultCap);

// Mean-energy operator sum_{X ni c} Phi(X)/|X| assembled around the
// central site of a (2 range + 1)-site window; its operator norm bounds
// the pressure.
Matrix mean_energy_operator(const Interaction& phi);
double mean_energy_norm(const Interaction& phi);

// (1/n) sum_k gamma^k(a) for a one-site observable.
Matrix average_observable(const Matrix& a, int n, Index cap = kDefaultCap);

struct SpectralDistribution {
  std::vector<std::pair<double, double>> atoms;  // (value, mass), ascending

  double total_mass() const;
  double mass_in(double lo, double hi) const;  // closed interval
  double mean() const;
};

// Distribution of the observable X in the state with density rho.
SpectralDistribution spectral_distribution(const Matrix& rho, const Matrix& x,
                                           double atom_merge_tol = 1e-8);

// Exact moment generating data of the ergodic average of a one-site
// observable: m_n(t) = rho(E_{e^{ta}}^n(1)).
double log_mgf_exact(const GeneratingTriple& t, const Matrix& a, double s,
                     int n);
double mgf_exact(const GeneratingTriple& t, const Matrix& a, double s, int n);

// F(t) = log spectral radius of E_{e^{ta}}.
double log_mgf_limit(const GeneratingTriple& t, const Matrix& a, double s);

struct RateFunctionOptions {
  double t_cap = 50.0;
  double fd_step = 1e-5;
  double bisection_tol = 1e-11;
  int fallback_grid_points = 201;
};

// Legendre-Fenchel rate function I(x) = sup_t { t x - log r(t) } of an
// ergodic finitely correlated state. Requires E_1 irreducible.
class RateFunction {
 public:
  RateFunction(GeneratingTriple triple, Matrix a,
               RateFunctionOptions opt = {});

  double log_mgf(double t) const;     // F(t)
  double derivative(double t) const;  // F'(t), central difference
  double mean() const;                // F'(0) = omega(a)
  double evaluate(double x) const;    // I(x); +infinity outside the spectrum

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

 private:
  GeneratingTriple triple_;
  Matrix a_;
  RateFunctionOptions opt_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

struct PressureCurve {
  double t = 0.0;
  std::vector<int> brute_n;
  std::vector<double> brute_values;     // (1/n) log omega(e^{-t H_n})
  std::vector<int> transfer_m;
  std::vector<double> transfer_values;  // (1/m) log r(E_{e^{-t H_m}})
  double mean_energy_norm = 0.0;
  bool bound_satisfied = true;  // |last value| <= |t| * ||A_Phi|| + tol
};

PressureCurve pressure_curve(const std::function<Matrix(int)>& omega_n,
                             const Interaction& phi, double t, int n_max,
                             Index cap = kDefaultCap);
// Triple source: adds the transfer-operator estimates for m <= m_max.
PressureCurve pressure_curve(const GeneratingTriple& triple,
                             const Interaction& phi, double t, int n_max,
                             int m_max, Index cap = kDefaultCap);
// Trace state tau: (1/n) [log Tr e^{-t H_n} - n log d_A].
PressureCurve pressure_curve_tracial(const Interaction& phi, double t,
                                     int n_max, Index cap = kDefaultCap);

// Local Gibbs density e^{-H_n} / Tr e^{-H_n}.
Matrix gibbs_local_state(const Interaction& phi, int n,
                         Index cap = kDefaultCap);

}  // namespace spinchain

#endif
