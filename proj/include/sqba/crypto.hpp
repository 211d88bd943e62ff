#pragma once

// Simulation-grade cryptography. A keyed BLAKE2b hash stands in for both the
// VRF and signatures. Verification re-derives outputs from the key registry,
// which only the harness (verifier role) holds. The adversary never receives
// the registry, only keys of processes it has corrupted.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sqba {

using ProcessId = std::uint32_t;
using Bytes = std::string;
using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(std::span<const std::uint8_t> bytes);
inline std::string to_hex(const Digest& d) { return to_hex(std::span<const std::uint8_t>(d)); }
inline std::string to_hex(std::string_view s) {
  return to_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Digest hash_bytes(std::string_view data);
Digest keyed_hash(const Digest& key, std::string_view data);

// Canonical length-prefixed encoding: 4-byte big-endian length, then bytes.
void append_field(Bytes& out, std::string_view field);
void append_u32(Bytes& out, std::uint32_t v);
void append_u64(Bytes& out, std::uint64_t v);

/// Committee tag string: (protocol-name, instance-id, round, step-label[, value]),
/// every component length-prefixed, the round as an 8-byte big-endian field.
Bytes committee_tag(std::string_view protocol, std::string_view instance, std::uint64_t round, std::string_view step,
                    const Bytes* value_encoding = nullptr);

struct KeyPair {
  ProcessId process_id = 0;
  Digest secret_seed{};
  Digest public_id{};
};

class KeyRegistry {
 public:
  KeyRegistry() = default;
  static KeyRegistry generate(std::uint32_t n, std::uint64_t seed);

  std::uint32_t size() const { return static_cast<std::uint32_t>(keys_.size()); }
  const KeyPair& key(ProcessId pid) const { return keys_.at(pid); }
  const Digest& public_id(ProcessId pid) const { return keys_.at(pid).public_id; }
  std::optional<ProcessId> lookup(const Digest& public_id) const;

 private:
  std::vector<KeyPair> keys_;
};

struct Signature {
  ProcessId signer = 0;
  Digest payload_digest{};
  Digest tag{};
  bool operator==(const Signature&) const = default;
};

Signature sign(const KeyPair& key, std::string_view payload);
Signature sign_digest(const KeyPair& key, const Digest& payload_digest);
bool verify(const KeyRegistry& registry, const Digest& public_id, std::string_view payload, const Signature& sig);
bool verify_digest(const KeyRegistry& registry, ProcessId signer, const Digest& payload_digest, const Signature& sig);

/// 256-bit VRF output, big-endian. The proof is re-derivable by the verifier.
struct VrfOutput {
  Digest value{};
  Digest proof{};
  bool lsb() const { return (value[31] & 1u) != 0; }
  bool operator==(const VrfOutput&) const = default;
};

VrfOutput vrf_eval(const KeyPair& key, std::string_view input);
Digest vrf_value(const KeyPair& key, std::string_view input);
bool vrf_verify(const KeyRegistry& registry, ProcessId pid, std::string_view input, const VrfOutput& out);

/// Exact threshold test value / 2^256 < p for a 256-bit big-endian value.
class SamplingThreshold {
 public:
  explicit SamplingThreshold(double probability);
  bool admits(const Digest& value) const;
  bool all() const { return all_; }
  bool none() const { return none_; }

 private:
  Digest bound_{};
  bool all_ = false;
  bool none_ = false;
};

struct CommitteeProof {
  ProcessId process_id = 0;
  Bytes tag;             // effective committee string
  double threshold = 0;  // lambda
  VrfOutput vrf;
  bool operator==(const CommitteeProof&) const = default;
};

struct SampleResult {
  bool elected = false;
  CommitteeProof proof;
};

Bytes committee_vrf_input(std::string_view tag);

/// Self-election with probability lambda / n.
SampleResult sample(const KeyPair& key, std::string_view tag, double lambda, std::uint32_t n);

/// Public check that proof is a genuine election proof for (pid, tag, lambda).
bool committee_val(const KeyRegistry& registry, std::string_view tag, double lambda, ProcessId pid,
                   const CommitteeProof& proof);

}  // namespace sqba
