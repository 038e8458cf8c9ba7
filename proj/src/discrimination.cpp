#include "spinchain/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spinchain {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ErrorReport min_error(const Matrix& omega, const Matrix& sigma, double kappa,
                      int n) {
  if (omega.rows() != sigma.rows())
    throw DimensionError("min_error: dimension mismatch");
  if (kappa <= 0.0 || kappa >= 1.0)
    throw std::invalid_argument("min_error: kappa must lie in (0, 1)");

  Matrix d = kappa * omega - (1.0 - kappa) * sigma;
  d = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(d);

  ErrorReport r;
  r.n = n;
  r.kappa = kappa;
  Matrix proj = Matrix::Zero(d.rows(), d.cols());
  double abs_sum = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    abs_sum += std::abs(es.eigenvalues()[i]);
    if (es.eigenvalues()[i] > 0.0)
      proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  r.optimal_projection = proj;
  r.p_min = 0.5 - 0.5 * abs_sum;
  Matrix complement = identity(d.rows()) - proj;
  r.p_min_direct = kappa * (omega * complement).trace().real() +
                   (1.0 - kappa) * (sigma * proj).trace().real();
  return r;
}

double quasi_trace(const Matrix& omega, const Matrix& sigma, double t) {
  if (omega.rows() != sigma.rows())
    throw DimensionError("quasi_trace: dimension mismatch");
  Matrix a = matrix_power(omega, 1.0 - t);
  Matrix b = matrix_power(sigma, t);
  double val = (a * b).trace().real();
  return std::max(val, 0.0);
}

ChernoffCurve chernoff_curve(const std::function<Matrix(int)>& omega_n,
                             const std::function<Matrix(int)>& sigma_n,
                             const std::vector<double>& t_grid,
                             const std::vector<int>& n_sweep,
                             std::optional<double> beta,
                             std::optional<double> alpha) {
  if (t_grid.empty() || n_sweep.empty())
    throw std::invalid_argument("chernoff_curve: empty grid");

  ChernoffCurve out;
  out.t_grid = t_grid;
  out.n_values = n_sweep;
  out.xi.resize(n_sweep.size());
  for (size_t i = 0; i < n_sweep.size(); ++i) {
    int n = n_sweep[i];
    Matrix w = omega_n(n);
    Matrix s = sigma_n(n);
    out.xi[i].reserve(t_grid.size());
    for (double t : t_grid) {
      double q = quasi_trace(w, s, t);
      out.xi[i].push_back(q > 0.0 ? std::log(q) / n : kNegInf);
    }
  }

  if (beta) {
    out.upper_envelope.assign(t_grid.size(),
                              std::numeric_limits<double>::infinity());
    for (size_t i = 0; i < n_sweep.size(); ++i)
      for (size_t j = 0; j < t_grid.size(); ++j) {
        double env = (std::log(*beta) + n_sweep[i] * out.xi[i][j]) /
                     n_sweep[i];
        out.upper_envelope[j] = std::min(out.upper_envelope[j], env);
      }
  }
  if (alpha && *alpha > 0.0) {
    out.lower_envelope.assign(t_grid.size(), kNegInf);
    for (size_t i = 0; i < n_sweep.size(); ++i)
      for (size_t j = 0; j < t_grid.size(); ++j) {
        double env = (std::log(*alpha) + n_sweep[i] * out.xi[i][j]) /
                     n_sweep[i];
        out.lower_envelope[j] = std::max(out.lower_envelope[j], env);
      }
  }

  // Exponent estimate: best available value at the largest n.
  const std::vector<double>& final_xi = out.xi.back();
  auto it = std::min_element(final_xi.begin(), final_xi.end());
  out.exponent_estimate = *it;
  out.exponent_t = t_grid[static_cast<size_t>(it - final_xi.begin())];
  out.exponent_minus_infinity = std::isinf(*it) && *it < 0;
  return out;
}

QMatrixModel q_matrix_model(const HiddenMarkovSpec& spec_omega,
                            const HiddenMarkovSpec& spec_sigma, double t,
                            double orth_tol) {
  validate_hidden_markov(spec_omega);
  validate_hidden_markov(spec_sigma);
  HiddenMarkovSpec so = spec_omega, ss = spec_sigma;
  if (so.r.size() == 0) so.r = stationary_distribution(so.T);
  if (ss.r.size() == 0) ss.r = stationary_distribution(ss.T);
  if (so.d_A != ss.d_A)
    throw DimensionError("q_matrix_model: site dimensions differ");

  auto check_orthogonality = [&](const HiddenMarkovSpec& spec,
                                 const char* name) {
    const Index m = spec.T.rows();
    for (Index x = 0; x < m; ++x)
      for (Index u = 0; u < m; ++u) {
        if (x == u) continue;
        for (Index w = 0; w < m; ++w)
          for (Index v = 0; v < m; ++v) {
            if (spec.T(x, w) <= 0 || spec.T(u, v) <= 0) continue;
            Matrix px = support_projection(spec.theta[x][w]);
            Matrix pu = support_projection(spec.theta[u][v]);
            if ((px * pu).cwiseAbs().maxCoeff() > orth_tol)
              throw std::invalid_argument(
                  std::string("q_matrix_model: emission supports of ") + name +
                  " are not orthogonal across first indices; "
                  "use chernoff_curve instead");
          }
      }
  };
  check_orthogonality(so, "omega");
  check_orthogonality(ss, "sigma");

  const Index mx = so.T.rows(), my = ss.T.rows(), d = so.d_A;
  auto theta_mix = [&](const HiddenMarkovSpec& spec, Index x) {
    Matrix out = Matrix::Zero(d, d);
    for (Index w = 0; w < spec.T.rows(); ++w)
      if (spec.T(x, w) > 0) out += spec.T(x, w) * spec.theta[x][w];
    return out;
  };

  auto pw = [](double base, double e) {
    return base > 0.0 ? std::pow(base, e) : 0.0;  // 0^t := 0
  };

  QMatrixModel model;
  model.t = t;
  model.Q = RealMatrix::Zero(mx * my, mx * my);
  model.a = RealVector::Zero(mx * my);
  model.b = RealVector::Zero(mx * my);
  for (Index x = 0; x < mx; ++x)
    for (Index y = 0; y < my; ++y) {
      Index row = x * my + y;
      model.a[row] = pw(so.r[x], 1.0 - t) * pw(ss.r[y], t);
      model.b[row] = quasi_trace(theta_mix(so, x), theta_mix(ss, y), t);
      for (Index w = 0; w < mx; ++w)
        for (Index z = 0; z < my; ++z) {
          if (so.T(x, w) <= 0 || ss.T(y, z) <= 0) continue;
          double q = quasi_trace(so.theta[x][w], ss.theta[y][z], t);
          if (q <= 0.0) {
            model.primitive_hypothesis = false;
            continue;
          }
          model.Q(row, w * my + z) =
              pw(so.T(x, w), 1.0 - t) * pw(ss.T(y, z), t) * q;
        }
    }
  Eigen::EigenSolver<RealMatrix> es(model.Q, false);
  model.xi = std::log(es.eigenvalues().cwiseAbs().maxCoeff());
  return model;
}

double q_model_log_inner(const QMatrixModel& model, int n) {
  if (n < 1) throw std::invalid_argument("q_model_log_inner: n must be >= 1");
  RealVector v = model.b;
  double log_scale = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    v = model.Q * v;
    double s = v.cwiseAbs().maxCoeff();
    if (s > 0) {
      v /= s;
      log_scale += std::log(s);
    }
  }
  return log_scale + std::log(model.a.dot(v));
}

ChernoffExponent chernoff_exponent(const std::function<double(double)>& xi,
                                   int grid_points) {
  if (grid_points < 2)
    throw std::invalid_argument("chernoff_exponent: empty grid");
  ChernoffExponent out;
  double best_t = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    double t = static_cast<double>(i) / (grid_points - 1);
    double v = xi(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  if (std::isinf(best) && best < 0) {
    out.minus_infinity = true;
    out.t_star = best_t;
    out.value = kNegInf;
    return out;
  }

  double step = 1.0 / (grid_points - 1);
  double lo = std::max(0.0, best_t - step), hi = std::min(1.0, best_t + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = xi(c), fd = xi(d);
  for (int iter = 0; iter < 80 && hi - lo > 1e-12; ++iter) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = xi(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = xi(d);
    }
  }
  out.t_star = 0.5 * (lo + hi);
  out.value = std::min(best, xi(out.t_star));
  if (xi(out.t_star) > best) out.t_star = best_t;
  return out;
}

GibbsBoundReport gibbs_lower_bound(const Interaction& phi,
                                   const Interaction& psi, double t,
                                   const std::vector<int>& n_sweep,
                                   Index cap) {
  validate_interaction(phi);
  validate_interaction(psi);
  if (phi.d_A != psi.d_A)
    throw DimensionError("gibbs_lower_bound: site dimensions differ");

  GibbsBoundReport out;
  out.t = t;
  for (int n : n_sweep) {
    Matrix h = local_hamiltonian(phi, n, cap);
    Matrix k = local_hamiltonian(psi, n, cap);
    Matrix mixed = (1.0 - t) * h + t * k;

    double log_z_mixed = std::log(matrix_exp(-mixed).trace().real());
    double log_z_h = std::log(matrix_exp(-h).trace().real());
    double log_z_k = std::log(matrix_exp(-k).trace().real());
    out.n_values.push_back(n);
    out.bound_values.push_back(
        (log_z_mixed - (1.0 - t) * log_z_h - t * log_z_k) / n);

    double lhs =
        (matrix_exp(-(1.0 - t) * h) * matrix_exp(-t * k)).trace().real();
    double rhs = matrix_exp(-mixed).trace().real();
    out.gt_lhs.push_back(lhs);
    out.gt_rhs.push_back(rhs);
    if (lhs < rhs - 1e-9 * std::max(1.0, std::abs(rhs)))
      out.golden_thompson_ok = false;
  }
  return out;
}

}  // namespace spinchain
