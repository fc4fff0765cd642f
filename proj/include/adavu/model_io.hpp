#pragma once

#include <cstdint>
#include <string>

#include "adavu/gmm.hpp"
#include "adavu/hmm.hpp"
#include "adavu/svm.hpp"

namespace adavu {

// Model files are JSON documents
//   {"format": "adavu-model", "version": 1, "kind": ..., "dim": ...,
//    "classes": [...], "seed": ..., "config": {...}, "payload": {...}}
// Doubles are written in shortest round-trip form, so a reloaded model
// predicts bit-identically.
inline constexpr int kModelFormatVersion = 1;

enum class ModelKind { gmm, svm, hmm_bank };

std::string_view to_string(ModelKind kind);

// Reads only the header. Throws ParseError for a file that is not a model
// container or has an unsupported version.
ModelKind read_model_kind(const std::string& path);

void save_model(const std::string& path, const GmmClassifier& model);
void save_model(const std::string& path, const SvmOvrClassifier& model);
void save_model(const std::string& path, const AdavuBank& bank, const HmmConfig& config);

GmmClassifier load_gmm(const std::string& path);
SvmOvrClassifier load_svm(const std::string& path);
AdavuBank load_bank(const std::string& path);

}  // namespace adavu
