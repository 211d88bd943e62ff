#pragma once

// Deterministic discrete-event asynchronous network. One run is strictly
// sequential: the adversary chooses which pending envelope is delivered next,
// may hold envelopes back, and may corrupt processes up to the budget f.
// Envelopes already sent can never be altered or removed.

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqba/committee.hpp"
#include "sqba/message.hpp"
#include "sqba/params.hpp"
#include "sqba/verify.hpp"

namespace sqba {

using Step = std::uint64_t;
using EnvelopeId = std::uint32_t;

inline constexpr ProcessId kBroadcast = 0xffffffffu;

struct Envelope {
  ProcessId from = 0;
  ProcessId to = 0;
  std::uint32_t message = 0;  // index into the run's message table
  Step send_step = 0;
  Step delivery_step = 0;  // 0 while pending
};

enum class DeliveryOrder { Random, Fifo };

struct RunConfig {
  SystemParams params;
  std::uint64_t seed = 1;
  SamplingMode sampling = SamplingMode::Conditioned;
  std::uint32_t round_cap = 200;
  std::uint32_t post_decision_rounds = 2;
  std::uint64_t staleness_bound = 0;  // 0 selects 10 * n * lambda
  std::uint64_t max_steps = 200'000'000;
  bool record_events = false;

  std::uint64_t effective_staleness() const;
};

struct DecisionRecord {
  bool correct = true;
  bool done = false;
  std::string output;                 // rendered output, empty while pending
  std::optional<std::uint32_t> round;  // decision round where applicable
  std::uint32_t rounds_started = 0;
};

struct NetMetrics {
  std::uint64_t words_sent_by_correct = 0;
  std::uint64_t envelopes_sent = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t forced_deliveries = 0;
  std::uint64_t holds = 0;
  std::uint64_t byzantine_injections = 0;
  std::array<std::uint64_t, kMsgKindCount> broadcasts_by_kind{};  // correct senders only
  std::uint64_t committees = 0;
  std::uint64_t committee_rejections = 0;
};

struct CorruptionEvent {
  ProcessId pid = 0;
  Step step = 0;
};

struct RunTrace {
  std::vector<std::string> events;  // JSONL lines, filled when record_events
  std::vector<DecisionRecord> decisions;
  NetMetrics metrics;
  std::vector<CorruptionEvent> corruptions;
  bool blocked = false;
  std::string block_reason;  // BlockedRun | RoundCapExceeded | StepLimit
  std::uint64_t digest = 0;  // running hash over every event, recorded or not
  Step final_step = 0;
  bool delayed_adaptive_audit_ok = true;

  std::string jsonl() const;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ForgeryRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Simulation;

/// The only handle a protocol instance has on the outside world.
class Host {
 public:
  Host(Simulation& sim, ProcessId self) : sim_(&sim), self_(self) {}

  ProcessId self() const { return self_; }
  const SystemParams& params() const;
  const KeyPair& key() const;

  /// Election proof when this process is sampled to base_tag's committee.
  std::optional<CommitteeProof> sample(std::string_view base_tag);
  bool valid(const Message& m) const;
  void broadcast(MessagePtr msg);

  /// Highest round this process may start.
  std::uint32_t round_gate() const;
  std::uint32_t round_cap() const;
  void report_decision(std::uint32_t round);
  void annotate(std::string_view kind, std::string_view annotations);
  Step now() const;

 private:
  Simulation* sim_;
  ProcessId self_;
};

class Process {
 public:
  virtual ~Process() = default;
  virtual void start() = 0;
  virtual void on_message(ProcessId from, const MessagePtr& msg) = 0;
  virtual DecisionRecord record() const = 0;
};

using ProcessFactory = std::function<std::unique_ptr<Process>(Host&)>;

/// Adversary handle: public data, sent messages, and keys of corrupted
/// processes only.
class AdversaryControl {
 public:
  explicit AdversaryControl(Simulation& sim) : sim_(&sim) {}

  const SystemParams& params() const;
  std::uint32_t n() const;
  Step now() const;
  bool is_corrupt(ProcessId pid) const;
  std::uint32_t corrupted_count() const;
  std::uint32_t budget() const;

  const Envelope& envelope(EnvelopeId id) const;
  const MessagePtr& payload(EnvelopeId id) const;

  /// Takes effect at the end of the current step. Throws BudgetExceeded.
  void corrupt(ProcessId pid);
  void hold(EnvelopeId id);
  void release(EnvelopeId id);
  bool is_held(EnvelopeId id) const;

  /// Sends on behalf of a corrupted process. Throws ForgeryRejected otherwise.
  void inject(ProcessId from, ProcessId to, MessagePtr msg);
  void inject_many(ProcessId from, const std::vector<ProcessId>& to, MessagePtr msg);
  void inject_all(ProcessId from, MessagePtr msg);

  /// Conditioned mode only: whether corrupting pid keeps every committee
  /// fixed so far inside the good events. Always true in faithful mode.
  bool corruption_keeps_good_events(ProcessId pid);

  const KeyPair& key_of(ProcessId pid) const;
  std::optional<CommitteeProof> sample_as(ProcessId pid, std::string_view base_tag);

  std::mt19937_64& rng();

 private:
  Simulation* sim_;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  virtual DeliveryOrder order() const { return DeliveryOrder::Random; }
  virtual void on_start(AdversaryControl&) {}
  /// Called synchronously for every broadcast by a correct process; the
  /// envelopes are ids [first, first + count) addressed to processes 0..count-1.
  virtual void on_broadcast(AdversaryControl&, ProcessId /*from*/, const MessagePtr& /*msg*/, EnvelopeId /*first*/,
                            std::uint32_t /*count*/) {}
};

/// Benign adversary: no corruption, random or FIFO delivery.
class PassiveAdversary : public Adversary {
 public:
  explicit PassiveAdversary(DeliveryOrder order = DeliveryOrder::Random) : order_(order) {}
  std::string name() const override { return order_ == DeliveryOrder::Fifo ? "none:fifo" : "none"; }
  DeliveryOrder order() const override { return order_; }

 private:
  DeliveryOrder order_;
};

class Simulation {
 public:
  Simulation(const RunConfig& config, Adversary& adversary);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;
  ~Simulation();

  void populate(const ProcessFactory& factory);
  RunTrace run();

  Process& process(ProcessId pid) { return *processes_.at(pid); }
  const KeyRegistry& keys() const { return keys_; }
  CommitteeOracle& committees() { return *committees_; }
  const VerifyContext& verifier() const { return *verifier_; }
  const RunConfig& config() const { return config_; }
  bool is_corrupt(ProcessId pid) const { return corrupt_[pid] != 0; }
  std::uint32_t corrupted_count() const { return corrupted_count_ + static_cast<std::uint32_t>(pending_corrupt_.size()); }
  const std::vector<Envelope>& envelopes() const { return envelopes_; }
  const std::vector<MessagePtr>& messages() const { return messages_; }
  Step now() const { return clock_; }

  /// Audit: every envelope a process sent before its corruption was delivered.
  bool audit_delayed_adaptive() const;

 private:
  friend class Host;
  friend class AdversaryControl;

  enum class State : std::uint8_t { Ready, Held, Delivered };

  void send_from_correct(ProcessId from, MessagePtr msg);
  void inject_envelopes(ProcessId from, const std::vector<ProcessId>* to, MessagePtr msg);
  EnvelopeId enqueue(ProcessId from, ProcessId to, std::uint32_t message_index);
  std::optional<std::pair<EnvelopeId, bool>> next_envelope();  // (id, forced)
  void deliver(EnvelopeId id, bool forced);
  void make_ready(EnvelopeId id);
  void take_from_ready(EnvelopeId id);
  void apply_pending_corruptions();
  void note_decision(ProcessId pid, std::uint32_t round);
  void refresh_gate();
  void mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);
  void record(std::string_view kind, std::int64_t from, std::int64_t to, std::string_view payload,
              std::string_view annotations);
  bool recording() const { return config_.record_events; }

  RunConfig config_;
  Adversary& adversary_;
  KeyRegistry keys_;
  std::unique_ptr<CommitteeOracle> committees_;
  std::unique_ptr<VerifyContext> verifier_;
  AdversaryControl control_;
  std::mt19937_64 adversary_rng_;

  std::vector<Host> hosts_;
  std::vector<std::unique_ptr<Process>> processes_;
  std::vector<std::uint8_t> corrupt_;
  std::uint32_t corrupted_count_ = 0;
  std::vector<ProcessId> pending_corrupt_;
  std::vector<std::uint8_t> doomed_;  // corrupt or queued for corruption
  std::vector<Step> corrupted_at_;

  std::vector<MessagePtr> messages_;
  std::vector<Envelope> envelopes_;
  std::vector<State> state_;
  std::vector<std::uint32_t> ready_pos_;
  std::vector<EnvelopeId> ready_;      // random order pool
  std::deque<EnvelopeId> ready_fifo_;  // fifo order pool (lazy)
  std::size_t ready_count_ = 0;
  std::size_t pending_ = 0;
  EnvelopeId oldest_ = 0;  // no pending envelope has a smaller id
  std::mt19937_64 scheduler_rng_;
  bool fifo_ = false;
  bool aborted_ = false;

  std::vector<std::uint8_t> decided_;
  std::vector<std::uint32_t> decision_round_;
  std::uint32_t gate_ = 0;

  Step clock_ = 0;
  std::uint64_t staleness_ = 0;
  RunTrace trace_;
};

/// Runs one configured execution end to end.
RunTrace run(const RunConfig& config, const ProcessFactory& factory, Adversary& adversary);

}  // namespace sqba
