#pragma once

#include <optional>
#include <string>

#include "emgpr/errors.hpp"

namespace emgpr {

enum class ClassifierKind { kLda, kQda, kSvmLinear, kSvmQuadratic, kKnn };

// Per-decision operation counts as a function of feature dimension W,
// support-vector count Q, and stored training samples S.
struct OpCounts {
  long long adds = 0;
  long long muls = 0;
  long long squares = 0;
  long long roots = 0;

  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

inline OpCounts complexity_report(ClassifierKind kind, long long w,
                                  std::optional<long long> q = std::nullopt,
                                  std::optional<long long> s = std::nullopt) {
  if (w < 1) throw ConfigError("feature dimension W must be >= 1");
  switch (kind) {
    case ClassifierKind::kLda:
      return {w, w, 0, 0};
    case ClassifierKind::kQda:
      return {2 * w, 2 * w, w, 0};
    case ClassifierKind::kSvmLinear:
      if (!q) throw ConfigError("SVM kinds require the support-vector count Q");
      return {(w + 1) * *q - 1, (w + 2) * *q, 0, 0};
    case ClassifierKind::kSvmQuadratic:
      if (!q) throw ConfigError("SVM kinds require the support-vector count Q");
      return {(w + 2) * *q - 1, (w + 2) * *q, *q, 0};
    case ClassifierKind::kKnn:
      if (!s) throw ConfigError("k-NN requires the training sample count S");
      return {2 * *s * (w + 1) - 6, 0, *s * w, *s};
  }
  throw ConfigError("unknown classifier kind");
}

inline ClassifierKind classifier_kind_from_name(const std::string& name) {
  if (name == "lda") return ClassifierKind::kLda;
  if (name == "qda") return ClassifierKind::kQda;
  if (name == "svm-linear" || name == "svml") return ClassifierKind::kSvmLinear;
  if (name == "svm-quadratic" || name == "svmq") return ClassifierKind::kSvmQuadratic;
  if (name == "knn") return ClassifierKind::kKnn;
  throw ConfigError("unknown classifier: " + name +
                    " (expected lda|qda|svm-linear|svm-quadratic|knn)");
}

}  // namespace emgpr
