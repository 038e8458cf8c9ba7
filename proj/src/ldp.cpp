#include "spinchain/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spinchain {

namespace {

Index pow_index(Index d, int n, Index cap, const char* what) {
  Index dim = 1;
  for (int i = 0; i < n; ++i) {
    dim *= d;
    if (cap > 0 && dim > cap)
      throw CapExceededError(std::string(what) + ": d_A^n exceeds the cap");
  }
  return dim;
}

}  // namespace

void validate_interaction(const Interaction& phi, double tol) {
  if (phi.d_A < 2) throw DimensionError("interaction: d_A must be >= 2");
  if (phi.range < 0 ||
      static_cast<int>(phi.window_terms.size()) != phi.range + 1)
    throw DimensionError("interaction: window term count must be range + 1");
  Index dim = phi.d_A;
  for (int l = 1; l <= phi.range + 1; ++l) {
    const Matrix& term = phi.window_terms[l - 1];
    if (term.rows() != dim || term.cols() != dim)
      throw DimensionError("interaction: window term has wrong dimension");
    require_hermitian(term, tol * std::max(1.0, term.cwiseAbs().maxCoeff()));
    dim *= phi.d_A;
  }
  if (phi.range > 0 &&
      phi.window_terms.back().cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument(
        "interaction: declared range exceeds the largest nonzero window");
}

Matrix local_hamiltonian(const Interaction& phi, int n, Index cap) {
  validate_interaction(phi);
  Index dim = pow_index(phi.d_A, n, cap, "local_hamiltonian");
  Matrix h = Matrix::Zero(dim, dim);
  for (int l = 1; l <= phi.range + 1; ++l) {
    if (l > n) break;
    const Matrix& term = phi.window_terms[l - 1];
    for (int k = 0; k + l <= n; ++k)
      h += shift_embed(term, k, n, phi.d_A);
  }
  return h;
}

Matrix mean_energy_operator(const Interaction& phi) {
  validate_interaction(phi);
  const int n = 2 * phi.range + 1;
  const int center = phi.range;  // 0-based
  Index dim = pow_index(phi.d_A, n, 0, "mean_energy_operator");
  Matrix a = Matrix::Zero(dim, dim);
  for (int l = 1; l <= phi.range + 1; ++l) {
    const Matrix& term = phi.window_terms[l - 1];
    for (int s = 0; s + l <= n; ++s) {
      if (s > center || s + l - 1 < center) continue;
      a += shift_embed(term, s, n, phi.d_A) / static_cast<double>(l);
    }
  }
  return a;
}

double mean_energy_norm(const Interaction& phi) {
  return operator_norm(mean_energy_operator(phi));
}

Matrix average_observable(const Matrix& a, int n, Index cap) {
  require_hermitian(a);
  Index dim = pow_index(a.rows(), n, cap, "average_observable");
  Matrix out = Matrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k) out += shift_embed(a, k, n, a.rows());
  return out / static_cast<double>(n);
}

double SpectralDistribution::total_mass() const {
  double s = 0.0;
  for (const auto& [v, m] : atoms) s += m;
  return s;
}

double SpectralDistribution::mass_in(double lo, double hi) const {
  double s = 0.0;
  for (const auto& [v, m] : atoms)
    if (v >= lo && v <= hi) s += m;
  return s;
}

double SpectralDistribution::mean() const {
  double s = 0.0;
  for (const auto& [v, m] : atoms) s += v * m;
  return s;
}

SpectralDistribution spectral_distribution(const Matrix& rho, const Matrix& x,
                                           double atom_merge_tol) {
  if (rho.rows() != x.rows())
    throw DimensionError("spectral_distribution: dimension mismatch");
  SpectralDecomposition sd = spectral_decomposition(x, atom_merge_tol);
  SpectralDistribution out;
  for (size_t i = 0; i < sd.projectors.size(); ++i) {
    double mass = (rho * sd.projectors[i]).trace().real();
    out.atoms.emplace_back(sd.eigenvalues[static_cast<Index>(i)],
                           std::max(mass, 0.0));
  }
  return out;
}

double log_mgf_exact(const GeneratingTriple& t, const Matrix& a, double s,
                     int n) {
  Superoperator transfer = block_transfer_map(t, matrix_exp(s * a));
  Vector v = vec(identity(t.d_B));
  double log_scale = 0.0;
  for (int i = 0; i < n; ++i) {
    v = transfer.mat * v;
    double norm = v.cwiseAbs().maxCoeff();
    if (norm > 0) {
      v /= norm;
      log_scale += std::log(norm);
    }
  }
  double val = (t.rho.adjoint() * unvec(v, t.d_B, t.d_B)).trace().real();
  return log_scale + std::log(val);
}

double mgf_exact(const GeneratingTriple& t, const Matrix& a, double s,
                 int n) {
  return std::exp(log_mgf_exact(t, a, s, n));
}

double log_mgf_limit(const GeneratingTriple& t, const Matrix& a, double s) {
  Superoperator transfer = block_transfer_map(t, matrix_exp(s * a));
  return std::log(superoperator_spectrum(transfer).spectral_radius);
}

RateFunction::RateFunction(GeneratingTriple triple, Matrix a,
                           RateFunctionOptions opt)
    : triple_(std::move(triple)), a_(std::move(a)), opt_(opt) {
  require_hermitian(a_);
  if (a_.rows() != triple_.d_A)
    throw DimensionError("RateFunction: observable must act on one site");
  PositivityStructure s =
      classify_positivity_structure(unit_transfer_map(triple_));
  if (!s.irreducible)
    throw std::invalid_argument(
        "RateFunction: E_1 is not irreducible; the rate function of the "
        "Gartner-Ellis conjugate is not guaranteed to be differentiable");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a_, Eigen::EigenvaluesOnly);
  lambda_min_ = es.eigenvalues().minCoeff();
  lambda_max_ = es.eigenvalues().maxCoeff();
}

double RateFunction::log_mgf(double t) const {
  return log_mgf_limit(triple_, a_, t);
}

double RateFunction::derivative(double t) const {
  const double h = opt_.fd_step;
  return (log_mgf(t + h) - log_mgf(t - h)) / (2.0 * h);
}

double RateFunction::mean() const { return derivative(0.0); }

double RateFunction::evaluate(double x) const {
  const double edge_tol = 1e-12 * std::max(1.0, std::abs(lambda_max_));
  if (x < lambda_min_ - edge_tol || x > lambda_max_ + edge_tol)
    return std::numeric_limits<double>::infinity();

  const double cap = opt_.t_cap;
  double lo = -cap, hi = cap;
  double d_lo = derivative(lo), d_hi = derivative(hi);

  double candidate;
  if (x <= d_lo) {
    candidate = lo * x - log_mgf(lo);
  } else if (x >= d_hi) {
    candidate = hi * x - log_mgf(hi);
  } else {
    // F' is increasing for irreducible E_1; monotone bisection.
    while (hi - lo > opt_.bisection_tol * std::max(1.0, std::abs(hi))) {
      double mid = 0.5 * (lo + hi);
      if (derivative(mid) < x)
        lo = mid;
      else
        hi = mid;
    }
    double t_star = 0.5 * (lo + hi);
    candidate = t_star * x - log_mgf(t_star);
  }

  // Grid fallback: every evaluation is a lower bound on the supremum.
  double best = candidate;
  const int g = opt_.fallback_grid_points;
  for (int i = 0; i < g; ++i) {
    double t = -cap + 2.0 * cap * i / (g - 1);
    best = std::max(best, t * x - log_mgf(t));
  }
  return best;
}

namespace {

PressureCurve pressure_core(const std::function<Matrix(int)>& omega_n,
                            const Interaction& phi, double t, int n_max,
                            Index cap) {
  validate_interaction(phi);
  PressureCurve out;
  out.t = t;
  out.mean_energy_norm = mean_energy_norm(phi);
  for (int n = 1; n <= n_max; ++n) {
    Index dim = 1;
    bool over = false;
    for (int i = 0; i < n; ++i) {
      dim *= phi.d_A;
      if (dim > cap) over = true;
    }
    if (over) throw CapExceededError("pressure_curve: cap exceeded");
    Matrix h = local_hamiltonian(phi, n, cap);
    Matrix boltz = matrix_exp(-t * h);
    double val = (omega_n(n) * boltz).trace().real();
    out.brute_n.push_back(n);
    out.brute_values.push_back(std::log(val) / n);
  }
  if (!out.brute_values.empty()) {
    double last = out.brute_values.back();
    out.bound_satisfied =
        std::abs(last) <= std::abs(t) * out.mean_energy_norm + 1e-9;
  }
  return out;
}

}  // namespace

PressureCurve pressure_curve(const std::function<Matrix(int)>& omega_n,
                             const Interaction& phi, double t, int n_max,
                             Index cap) {
  return pressure_core(omega_n, phi, t, n_max, cap);
}

PressureCurve pressure_curve(const GeneratingTriple& triple,
                             const Interaction& phi, double t, int n_max,
                             int m_max, Index cap) {
  PressureCurve out = pressure_core(
      [&](int n) { return local_density(triple, n, cap); }, phi, t, n_max,
      cap);
  for (int m = 1; m <= m_max; ++m) {
    Matrix h = local_hamiltonian(phi, m, cap);
    Superoperator transfer = block_transfer_map(triple, matrix_exp(-t * h));
    double r = superoperator_spectrum(transfer).spectral_radius;
    out.transfer_m.push_back(m);
    out.transfer_values.push_back(std::log(r) / m);
  }
  if (!out.transfer_values.empty()) {
    double last = out.transfer_values.back();
    out.bound_satisfied =
        out.bound_satisfied &&
        std::abs(last) <= std::abs(t) * out.mean_energy_norm + 1e-9;
  }
  return out;
}

PressureCurve pressure_curve_tracial(const Interaction& phi, double t,
                                     int n_max, Index cap) {
  return pressure_core(
      [&](int n) {
        Index dim = 1;
        for (int i = 0; i < n; ++i) dim *= phi.d_A;
        return Matrix(identity(dim) / static_cast<double>(dim));
      },
      phi, t, n_max, cap);
}

Matrix gibbs_local_state(const Interaction& phi, int n, Index cap) {
  Matrix h = local_hamiltonian(phi, n, cap);
  Matrix boltz = matrix_exp(-h);
  return boltz / boltz.trace().real();
}

}  // namespace spinchain
