#include "sqba/crypto.hpp"

#include <sodium.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace sqba {

namespace {

struct SodiumInit {
  SodiumInit() {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  }
};

void ensure_sodium() { static const SodiumInit init; }

constexpr std::string_view kVrfLabel = "sqba/vrf";
constexpr std::string_view kVrfProofLabel = "sqba/vrf-proof";
constexpr std::string_view kSigLabel = "sqba/sig";
constexpr std::string_view kCommitteeLabel = "sqba/committee";

// The secret occupies the BLAKE2b salt and personalization fields, so short
// inputs cost a single compression.
Digest keyed_hash2(const Digest& key, std::string_view label, std::string_view data) {
  static_assert(crypto_generichash_blake2b_SALTBYTES + crypto_generichash_blake2b_PERSONALBYTES == 32);
  Digest out{};
  unsigned char buf[128];
  const auto* salt = key.data();
  const auto* personal = key.data() + crypto_generichash_blake2b_SALTBYTES;
  if (label.size() + data.size() <= sizeof buf) {
    std::memcpy(buf, label.data(), label.size());
    std::memcpy(buf + label.size(), data.data(), data.size());
    crypto_generichash_blake2b_salt_personal(out.data(), out.size(), buf, label.size() + data.size(), nullptr, 0,
                                             salt, personal);
    return out;
  }
  Bytes joined(label);
  joined.append(data);
  crypto_generichash_blake2b_salt_personal(out.data(), out.size(), reinterpret_cast<const unsigned char*>(joined.data()),
                                           joined.size(), nullptr, 0, salt, personal);
  return out;
}

std::string_view as_view(const Digest& d) { return {reinterpret_cast<const char*>(d.data()), d.size()}; }

}  // namespace

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

Digest hash_bytes(std::string_view data) {
  ensure_sodium();
  Digest out{};
  crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(data.data()), data.size(), nullptr,
                     0);
  return out;
}

Digest keyed_hash(const Digest& key, std::string_view data) {
  ensure_sodium();
  Digest out{};
  crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(data.data()), data.size(),
                     key.data(), key.size());
  return out;
}

void append_u32(Bytes& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

void append_u64(Bytes& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

void append_field(Bytes& out, std::string_view field) {
  append_u32(out, static_cast<std::uint32_t>(field.size()));
  out.append(field);
}

Bytes committee_tag(std::string_view protocol, std::string_view instance, std::uint64_t round, std::string_view step,
                    const Bytes* value_encoding) {
  Bytes out;
  out.reserve(64 + instance.size() + (value_encoding ? value_encoding->size() : 0));
  append_field(out, protocol);
  append_field(out, instance);
  Bytes r;
  append_u64(r, round);
  append_field(out, r);
  append_field(out, step);
  if (value_encoding != nullptr) append_field(out, *value_encoding);
  return out;
}

KeyRegistry KeyRegistry::generate(std::uint32_t n, std::uint64_t seed) {
  KeyRegistry reg;
  reg.keys_.reserve(n);
  for (ProcessId pid = 0; pid < n; ++pid) {
    Bytes material = "sqba/key";
    append_u64(material, seed);
    append_u32(material, pid);
    KeyPair kp;
    kp.process_id = pid;
    kp.secret_seed = hash_bytes(material);
    Bytes pub = "sqba/pub";
    pub.append(as_view(kp.secret_seed));
    kp.public_id = hash_bytes(pub);
    reg.keys_.push_back(kp);
  }
  return reg;
}

std::optional<ProcessId> KeyRegistry::lookup(const Digest& public_id) const {
  for (const auto& k : keys_) {
    if (k.public_id == public_id) return k.process_id;
  }
  return std::nullopt;
}

Signature sign_digest(const KeyPair& key, const Digest& payload_digest) {
  ensure_sodium();
  return Signature{key.process_id, payload_digest, keyed_hash2(key.secret_seed, kSigLabel, as_view(payload_digest))};
}

Signature sign(const KeyPair& key, std::string_view payload) { return sign_digest(key, hash_bytes(payload)); }

bool verify_digest(const KeyRegistry& registry, ProcessId signer, const Digest& payload_digest,
                   const Signature& sig) {
  if (signer >= registry.size() || sig.signer != signer || sig.payload_digest != payload_digest) return false;
  ensure_sodium();
  const auto& key = registry.key(signer);
  return keyed_hash2(key.secret_seed, kSigLabel, as_view(payload_digest)) == sig.tag;
}

bool verify(const KeyRegistry& registry, const Digest& public_id, std::string_view payload, const Signature& sig) {
  if (sig.signer >= registry.size() || registry.public_id(sig.signer) != public_id) return false;
  return verify_digest(registry, sig.signer, hash_bytes(payload), sig);
}

Digest vrf_value(const KeyPair& key, std::string_view input) {
  ensure_sodium();
  return keyed_hash2(key.secret_seed, kVrfLabel, input);
}

VrfOutput vrf_eval(const KeyPair& key, std::string_view input) {
  VrfOutput out;
  out.value = vrf_value(key, input);
  out.proof = keyed_hash2(key.secret_seed, kVrfProofLabel, input);
  return out;
}

bool vrf_verify(const KeyRegistry& registry, ProcessId pid, std::string_view input, const VrfOutput& out) {
  if (pid >= registry.size()) return false;
  const auto& key = registry.key(pid);
  return keyed_hash2(key.secret_seed, kVrfProofLabel, input) == out.proof &&
         keyed_hash2(key.secret_seed, kVrfLabel, input) == out.value;
}

SamplingThreshold::SamplingThreshold(double probability) {
  if (!(probability > 0.0)) {
    none_ = true;
    return;
  }
  if (probability >= 1.0) {
    all_ = true;
    return;
  }
  // probability = mantissa * 2^(exp - 53) with a 53-bit integer mantissa, so
  // bound = probability * 2^256 = mantissa * 2^(203 + exp) is an exact integer
  // unless the shift is negative, in which case it is floored.
  int exp = 0;
  const double frac = std::frexp(probability, &exp);
  auto mantissa = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  int shift = 203 + exp;
  if (shift < 0) {
    mantissa = shift <= -64 ? 0 : (mantissa >> -shift);
    shift = 0;
  }
  // Place mantissa into a 256-bit big-endian integer shifted left by `shift`.
  for (int bit = 0; bit < 64; ++bit) {
    if (((mantissa >> bit) & 1u) == 0) continue;
    const int pos = bit + shift;  // bit position from the least significant end
    if (pos >= 256) continue;
    bound_[31 - pos / 8] |= static_cast<std::uint8_t>(1u << (pos % 8));
  }
}

bool SamplingThreshold::admits(const Digest& value) const {
  if (all_) return true;
  if (none_) return false;
  return std::memcmp(value.data(), bound_.data(), bound_.size()) < 0;
}

Bytes committee_vrf_input(std::string_view tag) {
  Bytes in(kCommitteeLabel);
  append_field(in, tag);
  return in;
}

SampleResult sample(const KeyPair& key, std::string_view tag, double lambda, std::uint32_t n) {
  SampleResult r;
  r.proof.process_id = key.process_id;
  r.proof.tag = Bytes(tag);
  r.proof.threshold = lambda;
  r.proof.vrf = vrf_eval(key, committee_vrf_input(tag));
  r.elected = n > 0 && SamplingThreshold(lambda / n).admits(r.proof.vrf.value);
  return r;
}

bool committee_val(const KeyRegistry& registry, std::string_view tag, double lambda, ProcessId pid,
                   const CommitteeProof& proof) {
  if (proof.process_id != pid || proof.tag != tag || proof.threshold != lambda || pid >= registry.size()) {
    return false;
  }
  if (!vrf_verify(registry, pid, committee_vrf_input(tag), proof.vrf)) return false;
  return SamplingThreshold(lambda / registry.size()).admits(proof.vrf.value);
}

}  // namespace sqba
