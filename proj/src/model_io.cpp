#include "spinchain/model_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace spinchain {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ModelError("MISSING_FIELD", std::string("missing field '") + key +
                                          "'");
  return *it;
}

Index require_dim(const json& j, const char* key, Index min_value) {
  const json& f = require_field(j, key);
  if (!f.is_number_integer() || f.get<Index>() < min_value)
    throw ModelError("BAD_FIELD", std::string("field '") + key +
                                      "' must be an integer >= " +
                                      std::to_string(min_value));
  return f.get<Index>();
}

Complex entry_from_json(const json& e) {
  if (e.is_number()) return Complex(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return Complex(e[0].get<double>(), e[1].get<double>());
  throw ModelError("BAD_MATRIX",
                   "matrix entries must be numbers or [re, im] pairs");
}

RealMatrix real_matrix_from_json(const json& j) {
  Matrix m = matrix_from_json(j);
  if (m.imag().cwiseAbs().maxCoeff() > 0)
    throw ModelError("BAD_MATRIX", "expected a real matrix");
  return m.real();
}

Matrix default_observable(Index d) {
  Matrix a = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) a(i, i) = static_cast<double>(i);
  return a;
}

void parse_observable(const json& j, ModelFile& model) {
  if (j.contains("observable")) {
    model.observable = matrix_from_json(j["observable"]);
    if (model.observable.rows() != model.triple.d_A)
      throw ModelError("DIMENSION_MISMATCH",
                       "observable must act on one site");
    if (!is_hermitian(model.observable))
      throw ModelError("NOT_HERMITIAN", "observable must be Hermitian");
  } else {
    model.observable = default_observable(model.triple.d_A);
  }
}

void parse_triple(const json& j, ModelFile& model) {
  GeneratingTriple t;
  t.d_A = require_dim(j, "d_A", 1);
  t.d_B = require_dim(j, "d_B", 1);
  const json& kraus = require_field(j, "kraus");
  if (!kraus.is_array() || kraus.empty())
    throw ModelError("BAD_FIELD", "'kraus' must be a nonempty array");
  std::vector<Matrix> ops;
  for (const json& op : kraus) {
    Matrix m = matrix_from_json(op);
    if (m.rows() != t.d_B || m.cols() != t.d_A * t.d_B)
      throw ModelError("DIMENSION_MISMATCH",
                       "Kraus operators must be d_B x (d_A * d_B)");
    ops.push_back(std::move(m));
  }
  t.E = KrausMap(t.d_A * t.d_B, t.d_B, std::move(ops));
  if (j.contains("rho")) {
    t.rho = matrix_from_json(j["rho"]);
    if (t.rho.rows() != t.d_B || t.rho.cols() != t.d_B)
      throw ModelError("DIMENSION_MISMATCH", "rho must be d_B x d_B");
  } else {
    StationaryStateResult fixed = stationary_state(unit_transfer_map(t));
    t.rho = fixed.density;
    model.notes.push_back(
        "rho not supplied; stationary state computed automatically "
        "(fixed-space multiplicity " +
        std::to_string(fixed.multiplicity) + ")");
  }
  model.triple = std::move(t);
}

void parse_hidden_markov(const json& j, ModelFile& model) {
  HiddenMarkovSpec spec;
  spec.d_A = require_dim(j, "d_A", 1);
  spec.T = real_matrix_from_json(require_field(j, "T"));
  if (spec.T.rows() != spec.T.cols() || spec.T.rows() < 1)
    throw ModelError("DIMENSION_MISMATCH", "T must be square");
  for (Index x = 0; x < spec.T.rows(); ++x) {
    if (spec.T.row(x).minCoeff() < -1e-12)
      throw ModelError("STOCHASTIC_ROW", "T has a negative entry in row " +
                                             std::to_string(x));
    if (std::abs(spec.T.row(x).sum() - 1.0) > 1e-9)
      throw ModelError("STOCHASTIC_ROW", "row " + std::to_string(x) +
                                             " of T does not sum to 1");
  }
  if (j.contains("r")) {
    const json& r = j["r"];
    if (!r.is_array() || static_cast<Index>(r.size()) != spec.T.rows())
      throw ModelError("DIMENSION_MISMATCH", "r must have |X| entries");
    spec.r = RealVector(spec.T.rows());
    for (Index i = 0; i < spec.T.rows(); ++i) {
      if (!r[i].is_number())
        throw ModelError("BAD_FIELD", "r entries must be numbers");
      spec.r[i] = r[i].get<double>();
    }
  }
  const json& theta = require_field(j, "theta");
  if (!theta.is_array() || static_cast<Index>(theta.size()) != spec.T.rows())
    throw ModelError("DIMENSION_MISMATCH", "theta must be an |X| x |X| grid");
  spec.theta.resize(theta.size());
  for (Index x = 0; x < spec.T.rows(); ++x) {
    const json& row = theta[x];
    if (!row.is_array() || static_cast<Index>(row.size()) != spec.T.rows())
      throw ModelError("DIMENSION_MISMATCH",
                       "theta must be an |X| x |X| grid");
    for (Index y = 0; y < spec.T.rows(); ++y) {
      Matrix th = matrix_from_json(row[y]);
      if (th.rows() != spec.d_A || th.cols() != spec.d_A)
        throw ModelError("DIMENSION_MISMATCH",
                         "theta entries must be d_A x d_A");
      if (spec.T(x, y) > 0) {
        try {
          require_density(th);
        } catch (const std::exception& e) {
          throw ModelError("NOT_PSD", "theta[" + std::to_string(x) + "][" +
                                          std::to_string(y) +
                                          "] is not a density: " + e.what());
        }
      }
      spec.theta[static_cast<size_t>(x)].push_back(std::move(th));
    }
  }
  try {
    validate_hidden_markov(spec);
  } catch (const std::exception& e) {
    throw ModelError("BAD_MODEL", e.what());
  }
  model.triple = from_hidden_markov(spec);
  model.hmm = std::move(spec);
}

void parse_product(const json& j, ModelFile& model) {
  Matrix phi1 = matrix_from_json(require_field(j, "phi1"));
  try {
    require_density(phi1);
  } catch (const std::exception& e) {
    throw ModelError("NOT_PSD", std::string("phi1 is not a density: ") +
                                    e.what());
  }
  model.triple = product_triple(phi1);
}

void parse_interaction(const json& j, ModelFile& model) {
  Interaction phi;
  phi.d_A = require_dim(j, "d_A", 2);
  const json& range = require_field(j, "range");
  if (!range.is_number_integer() || range.get<int>() < 0)
    throw ModelError("BAD_FIELD", "'range' must be a nonnegative integer");
  phi.range = range.get<int>();
  const json& terms = require_field(j, "window_terms");
  if (!terms.is_array())
    throw ModelError("BAD_FIELD", "'window_terms' must be an array");
  for (const json& term : terms) phi.window_terms.push_back(matrix_from_json(term));
  try {
    validate_interaction(phi);
  } catch (const std::exception& e) {
    throw ModelError("BAD_INTERACTION", e.what());
  }
  model.interaction = std::move(phi);
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTriple: return "triple";
    case ModelKind::kHiddenMarkov: return "hidden_markov";
    case ModelKind::kProduct: return "product";
    case ModelKind::kInteraction: return "interaction";
    case ModelKind::kGibbs: return "gibbs";
  }
  return "unknown";
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ModelError("BAD_MATRIX", "matrix must be a nonempty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ModelError("BAD_MATRIX", "matrix rows have unequal lengths");
    for (Index k = 0; k < cols; ++k) m(i, k) = entry_from_json(row[k]);
  }
  return m;
}

json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < a.cols(); ++k)
      row.push_back(json::array({a(i, k).real(), a(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ModelFile parse_model_json(const json& j) {
  if (!j.is_object()) throw ModelError("BAD_MODEL", "model must be an object");
  const json& kind = require_field(j, "kind");
  if (!kind.is_string()) throw ModelError("BAD_KIND", "'kind' must be a string");
  const std::string k = kind.get<std::string>();

  ModelFile model;
  model.name = j.value("name", std::string());
  model.description = j.value("description", std::string());

  if (k == "triple") {
    model.kind = ModelKind::kTriple;
    parse_triple(j, model);
    parse_observable(j, model);
  } else if (k == "hidden_markov") {
    model.kind = ModelKind::kHiddenMarkov;
    parse_hidden_markov(j, model);
    parse_observable(j, model);
  } else if (k == "product") {
    model.kind = ModelKind::kProduct;
    parse_product(j, model);
    parse_observable(j, model);
  } else if (k == "interaction" || k == "gibbs") {
    model.kind = k == "gibbs" ? ModelKind::kGibbs : ModelKind::kInteraction;
    parse_interaction(j, model);
  } else {
    throw ModelError("BAD_KIND", "unknown kind '" + k + "'");
  }
  return model;
}

ModelFile parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("IO_ERROR", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ModelError("PARSE_ERROR", e.what());
  }
  return parse_model_json(j);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ModelError("IO_ERROR", "cannot write '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, target);
}

}  // namespace spinchain
