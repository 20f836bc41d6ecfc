#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "redsynth/engine.hpp"

namespace redsynth {

struct ArtifactComponent {
  std::string name;
  ExprPtr expr;
  std::string origin = "synthesized";  // or "direct"
  std::size_t positives = 0, negatives = 0, dropped = 0;
};

// A transformer tuple together with the problem it was synthesized for.
struct Artifact {
  std::string op;
  std::vector<std::string> components, outputs, aux;
  std::string fingerprint;
  std::vector<ArtifactComponent> tuple;
};

class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The problem's fingerprint differs from the artifact's.
class FingerprintMismatch : public ArtifactError {
 public:
  using ArtifactError::ArtifactError;
};

Artifact make_artifact(const Problem& pb, const EngineReport& rep);
// The direct-product tuple as an artifact (the baseline).
Artifact direct_artifact(const Problem& pb);

std::string write_artifact(const Artifact& a);
// Throws ArtifactError on malformed text.
Artifact read_artifact(std::string_view text);
// Human-readable rendering of every component.
std::string render_artifact(const Artifact& a);

// Checks the artifact against the problem (fingerprint, component names,
// expression well-formedness) and returns the tuple in output order.
std::vector<ExprPtr> bind_artifact(const Artifact& a, const Problem& pb);

}  // namespace redsynth
