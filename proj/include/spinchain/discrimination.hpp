#ifndef SPINCHAIN_DISCRIMINATION_HPP
#define SPINCHAIN_DISCRIMINATION_HPP

#include <functional>
#include <optional>
#include <vector>

#include "spinchain/ldp.hpp"

namespace spinchain {

struct ErrorReport {
  int n = 0;
  double kappa = 0.5;
  double p_min = 0.0;             // trace-norm formula
  double p_min_direct = 0.0;      // Bayesian value at the optimal test
  Matrix optimal_projection;
};

// Holevo-Helstrom optimum for discriminating omega (prior kappa) from
// sigma: the projection onto the strictly positive part of
// kappa omega - (1 - kappa) sigma.
ErrorReport min_error(const Matrix& omega, const Matrix& sigma,
                      double kappa = 0.5, int n = 0);

// Tr omega^{1-t} sigma^t with powers on supports (0^t := 0).
double quasi_trace(const Matrix& omega, const Matrix& sigma, double t);

struct ChernoffCurve {
  std::vector<double> t_grid;
  std::vector<int> n_values;
  // xi[i][j] = (1/n_i) log Tr omega_{n_i}^{1-t_j} sigma_{n_i}^{t_j};
  // -infinity marks vanishing quasi-traces.
  std::vector<std::vector<double>> xi;
  std::vector<double> upper_envelope;  // empty unless beta supplied
  std::vector<double> lower_envelope;  // empty unless alpha supplied
  double exponent_estimate = 0.0;
  double exponent_t = 0.0;
  bool exponent_minus_infinity = false;
};

ChernoffCurve chernoff_curve(const std::function<Matrix(int)>& omega_n,
                             const std::function<Matrix(int)>& sigma_n,
                             const std::vector<double>& t_grid,
                             const std::vector<int>& n_sweep,
                             std::optional<double> beta = std::nullopt,
                             std::optional<double> alpha = std::nullopt);

// Transfer-matrix model for the quasi-trace of a pair of hidden Markov
// states with orthogonal emission supports across first indices.
struct QMatrixModel {
  double t = 0.0;
  RealMatrix Q;        // |X||Y| x |X||Y|, nonnegative
  RealVector a, b;     // boundary vectors
  double xi = 0.0;     // log spectral radius of Q
  bool primitive_hypothesis = true;  // all quasi-trace entries > 0
};

QMatrixModel q_matrix_model(const HiddenMarkovSpec& spec_omega,
                            const HiddenMarkovSpec& spec_sigma, double t,
                            double orth_tol = 1e-9);

// log <a, Q^{n-1} b> evaluated with overflow-safe scaling.
double q_model_log_inner(const QMatrixModel& model, int n);

struct ChernoffExponent {
  double t_star = 0.0;
  double value = 0.0;
  bool minus_infinity = false;
};

// Minimum of xi over [0, 1]: grid scan plus golden-section refinement.
ChernoffExponent chernoff_exponent(const std::function<double(double)>& xi,
                                   int grid_points = 101);

struct GibbsBoundReport {
  double t = 0.0;
  std::vector<int> n_values;
  // (1/n)[log Tr e^{-(1-t)H_n(Phi) - t H_n(Psi)}
  //        - (1-t) log Tr e^{-H_n(Phi)} - t log Tr e^{-H_n(Psi)}]
  std::vector<double> bound_values;
  // Golden-Thompson witnesses Tr e^{-(1-t)H} e^{-tK} >= Tr e^{-(1-t)H - tK}.
  std::vector<double> gt_lhs, gt_rhs;
  bool golden_thompson_ok = true;
};

GibbsBoundReport gibbs_lower_bound(const Interaction& phi,
                                   const Interaction& psi, double t,
                                   const std::vector<int>& n_sweep,
                                   Index cap = kDefaultCap);

}  // namespace spinchain

#endif
