#pragma once

#include "sqba/committee.hpp"
#include "sqba/message.hpp"

namespace sqba {

/// Public verification context of one run: key registry (verifier role),
/// committee registry and parameters.
class VerifyContext {
 public:
  VerifyContext(const KeyRegistry& keys, CommitteeOracle& committees, const SystemParams& params)
      : keys_(keys), committees_(committees), params_(params) {}

  /// Signature, sender committee proof, and kind-specific content (OK proof,
  /// SECOND provenance, QC). Memoized per message object.
  bool valid(const Message& m) const;

  const KeyRegistry& keys() const { return keys_; }
  CommitteeOracle& committees() const { return committees_; }
  const SystemParams& params() const { return params_; }

 private:
  bool check(const Message& m) const;

  const KeyRegistry& keys_;
  CommitteeOracle& committees_;
  SystemParams params_;
};

}  // namespace sqba
