#ifndef SPINCHAIN_MODEL_IO_HPP
#define SPINCHAIN_MODEL_IO_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "spinchain/factorization.hpp"

namespace spinchain {

// Schema violation with a machine-readable code (STOCHASTIC_ROW,
// NOT_PSD, DIMENSION_MISMATCH, MISSING_FIELD, BAD_KIND, BAD_MATRIX,
// IO_ERROR, ...).
struct ModelError : std::runtime_error {
  ModelError(std::string code_, const std::string& message)
      : std::runtime_error(code_ + ": " + message), code(std::move(code_)) {}
  std::string code;
};

enum class ModelKind { kTriple, kHiddenMarkov, kProduct, kInteraction, kGibbs };

std::string to_string(ModelKind kind);

struct ModelFile {
  ModelKind kind = ModelKind::kTriple;
  std::string name;
  std::string description;

  // State payload (triple / hidden_markov / product).
  GeneratingTriple triple;
  std::optional<HiddenMarkovSpec> hmm;
  Matrix observable;  // one-site; default diag(0, 1, ..., d_A - 1)

  // Interaction payload (interaction / gibbs).
  Interaction interaction;

  std::vector<std::string> notes;  // e.g. auto-computed stationary state

  bool is_state() const {
    return kind == ModelKind::kTriple || kind == ModelKind::kHiddenMarkov ||
           kind == ModelKind::kProduct;
  }
  bool is_interaction() const {
    return kind == ModelKind::kInteraction || kind == ModelKind::kGibbs;
  }
};

// Matrix entries are nested arrays of [re, im] pairs; bare numbers are
// accepted on input as real entries.
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& a);

ModelFile parse_model_json(const nlohmann::json& j);
ModelFile parse_model_file(const std::string& path);

// 17 significant digits (round-trip exact for doubles).
std::string format_double(double x);

// Atomic write: temp file in the target directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace spinchain

#endif
