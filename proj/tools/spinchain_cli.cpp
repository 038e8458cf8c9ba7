// Command-line front end: parse JSON model files, dispatch analyses,
// emit CSV tables and JSON summaries.
//
// Exit codes: 0 success, 2 validation failure, 3 brute-force cap
// exceeded. The SPINCHAIN_CAP environment variable overrides the
// default d_A^n cap.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinchain/discrimination.hpp"
#include "spinchain/model_io.hpp"

namespace sc = spinchain;
using nlohmann::json;

namespace {

struct Options {
  std::string model, model_a, model_b;
  std::vector<double> t_range;
  int t_steps = 21;
  int x_steps = 201;
  int n = 4;
  int n_max = 8;
  int m = 2;
  int k = 2;
  int l = 0;
  double t = 1.0;
  double kappa = 0.5;
  double tol = -1.0;
  std::optional<double> beta, alpha;
  std::string output = ".";
  std::string format = "csv";
};

sc::Index effective_cap() {
  if (const char* env = std::getenv("SPINCHAIN_CAP")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) return static_cast<sc::Index>(v);
  }
  return sc::kDefaultCap;
}

std::vector<double> make_grid(const std::vector<double>& range, int steps,
                              double lo_default, double hi_default) {
  double lo = lo_default, hi = hi_default;
  if (range.size() == 2) {
    lo = range[0];
    hi = range[1];
  }
  if (steps < 1) throw std::invalid_argument("grid must be nonempty");
  std::vector<double> grid;
  for (int i = 0; i < steps; ++i)
    grid.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
  return grid;
}

std::string csv_escape_cell(const std::string& s) { return s; }

// Rows may have trailing empty cells (padded grids of unequal length).
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << csv_escape_cell(header[i]);
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_escape_cell(row[i]);
    out << "\n";
  }
  return out.str();
}

void emit(const Options& opt, const std::string& command, json summary,
          const std::vector<std::string>& header = {},
          const std::vector<std::vector<std::string>>& rows = {}) {
  summary["command"] = command;
  if (!header.empty()) {
    if (opt.format == "json") {
      json table;
      table["columns"] = header;
      table["rows"] = rows;
      summary["table"] = std::move(table);
    } else {
      std::string csv_path = opt.output + "/" + command + ".csv";
      sc::write_text_atomic(csv_path, render_csv(header, rows));
      summary["csv"] = csv_path;
    }
  }
  std::string summary_path = opt.output + "/" + command + "_summary.json";
  sc::write_text_atomic(summary_path, summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
}

std::string fd(double x) { return sc::format_double(x); }

json base_summary(const sc::ModelFile& model) {
  json j;
  j["model_kind"] = sc::to_string(model.kind);
  if (!model.name.empty()) j["model_name"] = model.name;
  if (!model.notes.empty()) j["notes"] = model.notes;
  return j;
}

sc::ModelFile load_state(const std::string& path) {
  sc::ModelFile m = sc::parse_model_file(path);
  if (!m.is_state())
    throw sc::ModelError("BAD_KIND", "command requires a state model");
  return m;
}

sc::ModelFile load_interaction(const std::string& path) {
  sc::ModelFile m = sc::parse_model_file(path);
  if (!m.is_interaction())
    throw sc::ModelError("BAD_KIND", "command requires an interaction model");
  return m;
}

int run_validate(const Options& opt) {
  sc::ModelFile model = sc::parse_model_file(opt.model);
  json summary = base_summary(model);
  if (model.is_state()) {
    sc::TripleValidation v = sc::validate_triple(model.triple);
    summary["d_A"] = model.triple.d_A;
    summary["d_B"] = model.triple.d_B;
    summary["unitality_residual"] = v.unitality_residual;
    summary["choi_min_eigenvalue"] = v.choi_min_eigenvalue;
    summary["rho_min_eigenvalue"] = v.rho_min_eigenvalue;
    summary["rho_trace_error"] = v.rho_trace_error;
    summary["rho_hermiticity_error"] = v.rho_hermiticity_error;
    summary["invariance_residual"] = v.invariance_residual;
    summary["valid"] = v.valid;
    if (!v.failures.empty()) summary["failures"] = v.failures;
    emit(opt, "validate", summary);
    return v.valid ? 0 : 2;
  }
  summary["d_A"] = model.interaction.d_A;
  summary["range"] = model.interaction.range;
  summary["mean_energy_norm"] = sc::mean_energy_norm(model.interaction);
  summary["valid"] = true;
  emit(opt, "validate", summary);
  return 0;
}

int run_ergodicity(const Options& opt) {
  sc::ModelFile model = load_state(opt.model);
  sc::ErgodicityReport r = sc::classify_ergodicity(model.triple);
  json summary = base_summary(model);
  summary["ergodic"] = r.ergodic;
  summary["strongly_mixing"] = r.strongly_mixing;
  summary["spectral_radius"] = r.perron.spectral_radius;
  summary["geometric_multiplicity"] = r.perron.geometric_multiplicity;
  summary["peripheral_count"] =
      static_cast<int>(r.perron.peripheral_eigenvalues.size());
  summary["left_strictly_positive"] = r.perron.left_strictly_positive;
  summary["right_strictly_positive"] = r.perron.right_strictly_positive;
  summary["conditioning_warning"] = r.perron.conditioning_warning;
  emit(opt, "ergodicity", summary);
  return 0;
}

int run_density(const Options& opt) {
  sc::ModelFile model = load_state(opt.model);
  sc::Matrix rho = sc::local_density(model.triple, opt.n, effective_cap());
  std::vector<std::vector<std::string>> rows;
  for (sc::Index i = 0; i < rho.rows(); ++i)
    for (sc::Index j = 0; j < rho.cols(); ++j)
      rows.push_back({std::to_string(i), std::to_string(j),
                      fd(rho(i, j).real()), fd(rho(i, j).imag())});
  Eigen::SelfAdjointEigenSolver<sc::Matrix> es(rho, Eigen::EigenvaluesOnly);
  json summary = base_summary(model);
  summary["n"] = opt.n;
  summary["trace"] = rho.trace().real();
  summary["min_eigenvalue"] = es.eigenvalues().minCoeff();
  summary["hermiticity_error"] = sc::hermiticity_error(rho);
  emit(opt, "density", summary, {"row", "col", "re", "im"}, rows);
  return 0;
}

int run_mgf(const Options& opt) {
  sc::ModelFile model = load_state(opt.model);
  std::vector<double> grid = make_grid(opt.t_range, opt.t_steps, -3.0, 3.0);
  std::vector<std::vector<std::string>> rows;
  double max_dev = 0.0;
  for (double t : grid) {
    double fn = sc::log_mgf_exact(model.triple, model.observable, t,
                                  opt.n_max) /
                opt.n_max;
    double fl = sc::log_mgf_limit(model.triple, model.observable, t);
    max_dev = std::max(max_dev, std::abs(fn - fl));
    rows.push_back({fd(t), fd(fn), fd(fl)});
  }
  json summary = base_summary(model);
  summary["n"] = opt.n_max;
  summary["max_deviation_from_limit"] = max_dev;
  emit(opt, "mgf", summary, {"t", "log_mgf_per_site", "log_spectral_radius"},
       rows);
  return 0;
}

int run_rate_function(const Options& opt) {
  sc::ModelFile model = load_state(opt.model);
  sc::RateFunction rate(model.triple, model.observable);
  std::vector<double> t_grid = make_grid(opt.t_range, opt.t_steps, -3.0, 3.0);
  std::vector<double> x_grid;
  for (int i = 0; i < opt.x_steps; ++i)
    x_grid.push_back(opt.x_steps == 1
                         ? rate.lambda_min()
                         : rate.lambda_min() +
                               (rate.lambda_max() - rate.lambda_min()) * i /
                                   (opt.x_steps - 1));
  size_t n_rows = std::max(t_grid.size(), x_grid.size());
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < n_rows; ++i) {
    std::vector<std::string> row(4);
    if (i < t_grid.size()) {
      row[0] = fd(t_grid[i]);
      row[1] = fd(rate.log_mgf(t_grid[i]));
    }
    if (i < x_grid.size()) {
      row[2] = fd(x_grid[i]);
      row[3] = fd(rate.evaluate(x_grid[i]));
    }
    rows.push_back(std::move(row));
  }
  json summary = base_summary(model);
  summary["mean"] = rate.mean();
  summary["rate_at_mean"] = rate.evaluate(rate.mean());
  summary["lambda_min"] = rate.lambda_min();
  summary["lambda_max"] = rate.lambda_max();
  emit(opt, "rate-function", summary, {"t", "F", "x", "I"}, rows);
  return 0;
}

int run_distribution(const Options& opt) {
  sc::ModelFile model = load_state(opt.model);
  sc::Index cap = effective_cap();
  sc::Matrix rho = sc::local_density(model.triple, opt.n, cap);
  sc::Matrix avg = sc::average_observable(model.observable, opt.n, cap);
  sc::SpectralDistribution dist = sc::spectral_distribution(rho, avg);
  std::vector<std::vector<std::string>> rows;
  for (const auto& [value, mass] : dist.atoms)
    rows.push_back({fd(value), fd(mass)});
  json summary = base_summary(model);
  summary["n"] = opt.n;
  summary["total_mass"] = dist.total_mass();
  summary["mean"] = dist.mean();
  emit(opt, "distribution", summary, {"value", "mass"}, rows);
  return 0;
}

int run_pressure(const Options& opt) {
  sc::Index cap = effective_cap();
  json summary;
  sc::PressureCurve curve;
  if (!opt.model_a.empty()) {
    sc::ModelFile state = load_state(opt.model_a);
    sc::ModelFile inter = load_interaction(opt.model_b);
    if (state.triple.d_A != inter.interaction.d_A)
      throw sc::ModelError("DIMENSION_MISMATCH",
                           "state and interaction site dimensions differ");
    curve = sc::pressure_curve(state.triple, inter.interaction, opt.t,
                               opt.n_max, opt.m, cap);
    summary = base_summary(state);
  } else {
    sc::ModelFile inter = load_interaction(opt.model);
    curve = sc::pressure_curve_tracial(inter.interaction, opt.t, opt.n_max,
                                       cap);
    summary = base_summary(inter);
    summary["source"] = "tracial";
  }
  size_t n_rows =
      std::max(curve.brute_values.size(), curve.transfer_values.size());
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < n_rows; ++i) {
    std::vector<std::string> row(4);
    if (i < curve.brute_values.size()) {
      row[0] = std::to_string(curve.brute_n[i]);
      row[1] = fd(curve.brute_values[i]);
    }
    if (i < curve.transfer_values.size()) {
      row[2] = std::to_string(curve.transfer_m[i]);
      row[3] = fd(curve.transfer_values[i]);
    }
    rows.push_back(std::move(row));
  }
  summary["t"] = opt.t;
  summary["mean_energy_norm"] = curve.mean_energy_norm;
  summary["bound_satisfied"] = curve.bound_satisfied;
  if (!curve.brute_values.empty())
    summary["last_brute_value"] = curve.brute_values.back();
  if (!curve.transfer_values.empty())
    summary["last_transfer_value"] = curve.transfer_values.back();
  emit(opt, "pressure", summary, {"n", "value", "m", "transfer_value"}, rows);
  return 0;
}

int run_factorization(const Options& opt) {
  sc::ModelFile model = load_state(opt.model);
  sc::Index cap = effective_cap();
  sc::FactorizationReport report;
  json summary = base_summary(model);
  if (opt.l > 0) {
    report = sc::weak_upper_check(model.triple, opt.m, opt.l, opt.k, cap);
    summary["l"] = opt.l;
  } else {
    sc::UpperCertificate cert =
        sc::fcs_upper_certificate(model.triple, opt.m, opt.k, cap);
    report = cert.measured;
    summary["certified_beta"] = cert.beta_certified;
    summary["certificate_psd_ok"] = cert.psd_ok;
    summary["certificate_witness_min_eigenvalue"] =
        cert.witness_min_eigenvalue;
    summary["certified_beta_dominates"] = cert.dominates;
  }
  summary["m"] = report.m;
  summary["k"] = report.k;
  summary["beta_star"] = std::isinf(report.beta_star)
                             ? json("inf")
                             : json(report.beta_star);
  summary["beta_star_root"] = std::isinf(report.beta_star_root)
                                  ? json("inf")
                                  : json(report.beta_star_root);
  summary["alpha_star"] =
      report.alpha_star ? json(*report.alpha_star) : json(nullptr);
  summary["alpha_star_root"] =
      report.alpha_star_root ? json(*report.alpha_star_root) : json(nullptr);
  summary["support_ok_upper"] = report.support_ok_upper;
  summary["support_ok_lower"] = report.support_ok_lower;
  summary["upper_witness_min_eigenvalue"] =
      report.upper_witness_min_eigenvalue;
  summary["lower_witness_min_eigenvalue"] =
      report.lower_witness_min_eigenvalue;
  if (model.hmm) {
    sc::LowerCriteria crit = sc::hmm_lower_criteria(*model.hmm);
    summary["markov_tp"] = crit.markov_tp;
    summary["lf11"] = crit.lf11;
    summary["lf21"] = crit.lf21;
  }
  emit(opt, "factorization", summary);
  return 0;
}

int run_chernoff(const Options& opt) {
  sc::ModelFile a = load_state(opt.model_a);
  sc::ModelFile b = load_state(opt.model_b);
  sc::Index cap = effective_cap();
  std::vector<double> t_grid = make_grid(opt.t_range, opt.t_steps, 0.0, 1.0);
  std::vector<int> n_sweep;
  for (int n = 1; n <= opt.n_max; ++n) n_sweep.push_back(n);

  std::optional<double> beta = opt.beta;
  json summary;
  if (!beta) {
    // Common upper factorization constant certified for both states.
    double ba = sc::fcs_upper_certificate(a.triple, 1, 2, cap).beta_certified;
    double bb = sc::fcs_upper_certificate(b.triple, 1, 2, cap).beta_certified;
    beta = std::max(ba, bb);
    summary["beta_source"] = "certified";
  } else {
    summary["beta_source"] = "supplied";
  }
  sc::ChernoffCurve curve = sc::chernoff_curve(
      [&](int n) { return sc::local_density(a.triple, n, cap); },
      [&](int n) { return sc::local_density(b.triple, n, cap); }, t_grid,
      n_sweep, beta, opt.alpha);

  std::vector<std::string> header{"t"};
  for (int n : n_sweep) header.push_back("xi_" + std::to_string(n));
  header.push_back("upper_env");
  header.push_back("lower_env");
  std::vector<std::vector<std::string>> rows;
  for (size_t j = 0; j < t_grid.size(); ++j) {
    std::vector<std::string> row{fd(t_grid[j])};
    for (size_t i = 0; i < n_sweep.size(); ++i) row.push_back(fd(curve.xi[i][j]));
    row.push_back(curve.upper_envelope.empty()
                      ? std::string()
                      : fd(curve.upper_envelope[j]));
    row.push_back(curve.lower_envelope.empty()
                      ? std::string()
                      : fd(curve.lower_envelope[j]));
    rows.push_back(std::move(row));
  }
  summary["beta"] = *beta;
  if (opt.alpha) summary["alpha"] = *opt.alpha;
  summary["exponent_estimate"] = curve.exponent_minus_infinity
                                     ? json("-inf")
                                     : json(curve.exponent_estimate);
  summary["exponent_t"] = curve.exponent_t;
  summary["one_sided"] = !opt.alpha;
  emit(opt, "chernoff", summary, header, rows);
  return 0;
}

int run_pmin(const Options& opt) {
  sc::ModelFile a = load_state(opt.model_a);
  sc::ModelFile b = load_state(opt.model_b);
  sc::Index cap = effective_cap();
  std::vector<std::vector<std::string>> rows;
  double last = 0.0;
  for (int n = 1; n <= opt.n_max; ++n) {
    sc::ErrorReport r =
        sc::min_error(sc::local_density(a.triple, n, cap),
                      sc::local_density(b.triple, n, cap), opt.kappa, n);
    last = r.p_min;
    rows.push_back({std::to_string(n), fd(r.p_min), fd(r.p_min_direct)});
  }
  json summary = base_summary(a);
  summary["kappa"] = opt.kappa;
  summary["p_min_at_n_max"] = last;
  emit(opt, "pmin", summary, {"n", "p_min", "p_min_direct"}, rows);
  return 0;
}

int run_gibbs_bound(const Options& opt) {
  sc::ModelFile a = load_interaction(opt.model_a);
  sc::ModelFile b = load_interaction(opt.model_b);
  std::vector<int> n_sweep;
  for (int n = 1; n <= opt.n_max; ++n) n_sweep.push_back(n);
  sc::GibbsBoundReport r = sc::gibbs_lower_bound(
      a.interaction, b.interaction, opt.t, n_sweep, effective_cap());
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < r.n_values.size(); ++i)
    rows.push_back({std::to_string(r.n_values[i]), fd(r.bound_values[i]),
                    fd(r.gt_lhs[i]), fd(r.gt_rhs[i])});
  json summary = base_summary(a);
  summary["t"] = opt.t;
  summary["golden_thompson_ok"] = r.golden_thompson_ok;
  if (!r.bound_values.empty())
    summary["last_bound_value"] = r.bound_values.back();
  emit(opt, "gibbs-bound", summary, {"n", "bound", "gt_lhs", "gt_rhs"}, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spinchain: transfer-operator analyses of finitely correlated states "
      "on quantum spin chains"};
  app.require_subcommand(1);

  Options opt;
  double beta_flag = 0.0, alpha_flag = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--output", opt.output, "Output directory");
    cmd->add_option("--format", opt.format, "Output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--tol", opt.tol, "Tolerance override");
    return cmd;
  };
  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", opt.model, "Model file")->required();
    return cmd;
  };
  auto add_pair = [&](CLI::App* cmd) {
    cmd->add_option("--model-a", opt.model_a, "First model file")->required();
    cmd->add_option("--model-b", opt.model_b, "Second model file")->required();
    return cmd;
  };
  auto add_grid = [&](CLI::App* cmd) {
    cmd->add_option("--t-range", opt.t_range, "Grid endpoints lo hi")
        ->expected(2);
    cmd->add_option("--t-steps", opt.t_steps, "Grid point count");
    return cmd;
  };

  int (*runner)(const Options&) = nullptr;
  auto dispatch = [&](int (*fn)(const Options&)) {
    return [&runner, fn]() { runner = fn; };
  };

  auto* validate = add_common(add_model(app.add_subcommand(
      "validate", "Validate a model file and report residuals")));
  validate->callback(dispatch(run_validate));

  auto* ergodicity = add_common(add_model(app.add_subcommand(
      "ergodicity", "Classify the unit transfer map (ergodic / mixing)")));
  ergodicity->callback(dispatch(run_ergodicity));

  auto* density = add_common(add_model(
      app.add_subcommand("density", "Exact local density on n sites")));
  density->add_option("-n,--n", opt.n, "Number of sites");
  density->callback(dispatch(run_density));

  auto* mgf = add_grid(add_common(add_model(app.add_subcommand(
      "mgf", "Per-site log moment generating function vs its limit"))));
  mgf->add_option("--n-max", opt.n_max, "Chain length");
  mgf->callback(dispatch(run_mgf));

  auto* rate = add_grid(add_common(add_model(app.add_subcommand(
      "rate-function", "Legendre-Fenchel rate function table"))));
  rate->add_option("--x-steps", opt.x_steps, "x-grid point count");
  rate->callback(dispatch(run_rate_function));

  auto* dist = add_common(add_model(app.add_subcommand(
      "distribution", "Distribution of the averaged observable")));
  dist->add_option("-n,--n", opt.n, "Number of sites");
  dist->callback(dispatch(run_distribution));

  auto* pressure = add_common(app.add_subcommand(
      "pressure", "Pressure curve: brute force and transfer estimates"));
  pressure->add_option("--model", opt.model, "Interaction model (trace state)");
  pressure->add_option("--model-a", opt.model_a, "State model");
  pressure->add_option("--model-b", opt.model_b, "Interaction model");
  pressure->add_option("-t,--t", opt.t, "Inverse-temperature multiplier");
  pressure->add_option("--n-max", opt.n_max, "Largest brute-force n");
  pressure->add_option("-m,--m", opt.m, "Largest transfer depth m");
  pressure->callback(dispatch(run_pressure));

  auto* fact = add_common(add_model(app.add_subcommand(
      "factorization", "Factorization constants and certificates")));
  fact->add_option("-m,--m", opt.m, "Block length");
  fact->add_option("-k,--k", opt.k, "Block count");
  fact->add_option("-l,--l", opt.l, "Gap length (weak upper probe)");
  fact->callback(dispatch(run_factorization));

  auto* chernoff = add_grid(add_common(add_pair(app.add_subcommand(
      "chernoff", "Chernoff curve with factorization sandwich"))));
  chernoff->add_option("--n-max", opt.n_max, "Largest chain length");
  auto* beta_opt = chernoff->add_option(
      "--beta", beta_flag, "Common upper factorization constant");
  auto* alpha_opt = chernoff->add_option(
      "--alpha", alpha_flag, "Common lower factorization constant");
  chernoff->callback([&]() {
    if (beta_opt->count()) opt.beta = beta_flag;
    if (alpha_opt->count()) opt.alpha = alpha_flag;
    runner = run_chernoff;
  });

  auto* pmin = add_common(add_pair(app.add_subcommand(
      "pmin", "Minimum Bayesian error probabilities")));
  pmin->add_option("--n-max", opt.n_max, "Largest chain length");
  pmin->add_option("--kappa", opt.kappa, "Prior of the first hypothesis");
  pmin->callback(dispatch(run_pmin));

  auto* gibbs = add_common(add_pair(app.add_subcommand(
      "gibbs-bound", "Golden-Thompson lower bound for local Gibbs pairs")));
  gibbs->add_option("-t,--t", opt.t, "Interpolation parameter");
  gibbs->add_option("--n-max", opt.n_max, "Largest chain length");
  gibbs->callback(dispatch(run_gibbs_bound));

  CLI11_PARSE(app, argc, argv);

  try {
    return runner ? runner(opt) : 2;
  } catch (const sc::CapExceededError& e) {
    std::cerr << "CAP_EXCEEDED: " << e.what() << std::endl;
    return 3;
  } catch (const sc::ModelError& e) {
    std::cerr << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ERROR: " << e.what() << std::endl;
    return 2;
  }
}
