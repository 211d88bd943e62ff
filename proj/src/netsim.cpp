#include "sqba/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "json.hpp"
#include "sqba/rng.hpp"

namespace sqba {

namespace {

constexpr std::uint64_t kEvSend = 1;
constexpr std::uint64_t kEvDeliver = 2;
constexpr std::uint64_t kEvCorrupt = 3;
constexpr std::uint64_t kEvHold = 4;
constexpr std::uint64_t kEvRelease = 5;
constexpr std::uint64_t kEvInject = 6;
constexpr std::uint64_t kEvDecide = 7;
constexpr std::uint64_t kEvNote = 8;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t digest_word(const Digest& d) {
  std::uint64_t w = 0;
  for (int i = 0; i < 8; ++i) w = (w << 8) | d[i];
  return w;
}

std::uint64_t fnv(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

std::string describe_message(const Message& m) {
  std::string out(kind_name(m.kind));
  out += " inst=";
  out += m.instance;
  out += " r=" + std::to_string(m.round);
  if (m.slot != 0) out += " s=" + std::to_string(m.slot);
  if (const auto* v = m.value()) out += " v=" + v->display();
  if (const auto* c = std::get_if<ConvergeBody>(&m.body)) out += c->is_content ? " content" : " not-content";
  return out;
}

}  // namespace

std::uint64_t RunConfig::effective_staleness() const {
  if (staleness_bound != 0) return staleness_bound;
  return static_cast<std::uint64_t>(std::ceil(10.0 * params.n * std::max(params.lambda, 1.0)));
}

std::string RunTrace::jsonl() const {
  std::string out;
  for (const auto& line : events) {
    out += line;
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------- Host

const SystemParams& Host::params() const { return sim_->config_.params; }
const KeyPair& Host::key() const { return sim_->keys_.key(self_); }

std::optional<CommitteeProof> Host::sample(std::string_view base_tag) {
  auto res = sim_->committees_->sample(self_, base_tag);
  if (!res.elected) return std::nullopt;
  return std::move(res.proof);
}

bool Host::valid(const Message& m) const { return sim_->verifier_->valid(m); }

void Host::broadcast(MessagePtr msg) {
  if (sim_->corrupt_[self_]) return;
  sim_->send_from_correct(self_, std::move(msg));
}

std::uint32_t Host::round_gate() const { return sim_->gate_; }
std::uint32_t Host::round_cap() const { return sim_->config_.round_cap; }
void Host::report_decision(std::uint32_t round) { sim_->note_decision(self_, round); }

void Host::annotate(std::string_view kind, std::string_view annotations) {
  sim_->mix(kEvNote, self_, fnv(kind), fnv(annotations));
  if (sim_->recording()) sim_->record(kind, self_, -1, "", annotations);
}

Step Host::now() const { return sim_->clock_; }

// ---------------------------------------------------------------- AdversaryControl

const SystemParams& AdversaryControl::params() const { return sim_->config_.params; }
std::uint32_t AdversaryControl::n() const { return sim_->config_.params.n; }
Step AdversaryControl::now() const { return sim_->clock_; }
bool AdversaryControl::is_corrupt(ProcessId pid) const { return pid < n() && sim_->doomed_[pid] != 0; }
std::uint32_t AdversaryControl::corrupted_count() const { return sim_->corrupted_count(); }
std::uint32_t AdversaryControl::budget() const { return sim_->config_.params.f; }
const Envelope& AdversaryControl::envelope(EnvelopeId id) const { return sim_->envelopes_.at(id); }
const MessagePtr& AdversaryControl::payload(EnvelopeId id) const {
  return sim_->messages_.at(sim_->envelopes_.at(id).message);
}

void AdversaryControl::corrupt(ProcessId pid) {
  if (pid >= n()) throw std::out_of_range("corrupt: no such process");
  if (sim_->doomed_[pid]) return;
  if (sim_->corrupted_count() >= budget()) {
    throw BudgetExceeded("BudgetExceeded: corruption set already has f=" + std::to_string(budget()) + " members");
  }
  sim_->doomed_[pid] = 1;
  sim_->pending_corrupt_.push_back(pid);
  sim_->committees_->note_corruption(pid);
}

void AdversaryControl::hold(EnvelopeId id) {
  if (id >= sim_->envelopes_.size() || sim_->state_[id] != Simulation::State::Ready) return;
  sim_->take_from_ready(id);
  sim_->state_[id] = Simulation::State::Held;
  ++sim_->trace_.metrics.holds;
  const auto& e = sim_->envelopes_[id];
  sim_->mix(kEvHold, id, e.from, e.to);
  if (sim_->recording()) {
    sim_->record("hold", e.from, e.to, to_hex(sim_->messages_[e.message]->digest), "");
  }
}

void AdversaryControl::release(EnvelopeId id) {
  if (id >= sim_->envelopes_.size() || sim_->state_[id] != Simulation::State::Held) return;
  sim_->make_ready(id);
  const auto& e = sim_->envelopes_[id];
  sim_->mix(kEvRelease, id, e.from, e.to);
  if (sim_->recording()) {
    sim_->record("release", e.from, e.to, to_hex(sim_->messages_[e.message]->digest), "");
  }
}

bool AdversaryControl::is_held(EnvelopeId id) const {
  return id < sim_->envelopes_.size() && sim_->state_[id] == Simulation::State::Held;
}

void AdversaryControl::inject(ProcessId from, ProcessId to, MessagePtr msg) {
  const std::vector<ProcessId> one{to};
  sim_->inject_envelopes(from, &one, std::move(msg));
}

void AdversaryControl::inject_many(ProcessId from, const std::vector<ProcessId>& to, MessagePtr msg) {
  sim_->inject_envelopes(from, &to, std::move(msg));
}

void AdversaryControl::inject_all(ProcessId from, MessagePtr msg) { sim_->inject_envelopes(from, nullptr, std::move(msg)); }

bool AdversaryControl::corruption_keeps_good_events(ProcessId pid) {
  return sim_->committees_->corruption_keeps_good_events(pid);
}

const KeyPair& AdversaryControl::key_of(ProcessId pid) const {
  if (pid >= n() || !sim_->corrupt_[pid]) throw ForgeryRejected("ForgeryRejected: key of a correct process");
  return sim_->keys_.key(pid);
}

std::optional<CommitteeProof> AdversaryControl::sample_as(ProcessId pid, std::string_view base_tag) {
  if (pid >= n() || !sim_->corrupt_[pid]) throw ForgeryRejected("ForgeryRejected: sampling as a correct process");
  auto res = sim_->committees_->sample(pid, base_tag);
  if (!res.elected) return std::nullopt;
  return std::move(res.proof);
}

std::mt19937_64& AdversaryControl::rng() { return sim_->adversary_rng_; }

// ---------------------------------------------------------------- Simulation

Simulation::Simulation(const RunConfig& config, Adversary& adversary)
    : config_(config),
      adversary_(adversary),
      keys_(KeyRegistry::generate(config.params.n, config.seed)),
      control_(*this),
      adversary_rng_(derive_seed(config.seed, 2)),
      scheduler_rng_(derive_seed(config.seed, 1)) {
  const auto n = config_.params.n;
  if (n == 0) throw std::invalid_argument("simulation needs at least one process");
  if (config_.round_cap < 1) throw std::invalid_argument("round_cap must be at least 1");
  corrupt_.assign(n, 0);
  doomed_.assign(n, 0);
  corrupted_at_.assign(n, 0);
  decided_.assign(n, 0);
  committees_ = std::make_unique<CommitteeOracle>(keys_, config_.params, config_.sampling,
                                                  [this](ProcessId pid) { return doomed_[pid] != 0; });
  verifier_ = std::make_unique<VerifyContext>(keys_, *committees_, config_.params);
  gate_ = config_.round_cap;
  staleness_ = config_.effective_staleness();
  fifo_ = adversary_.order() == DeliveryOrder::Fifo;
}

Simulation::~Simulation() = default;

void Simulation::populate(const ProcessFactory& factory) {
  const auto n = config_.params.n;
  hosts_.clear();
  hosts_.reserve(n);
  for (ProcessId pid = 0; pid < n; ++pid) hosts_.emplace_back(*this, pid);
  processes_.clear();
  processes_.reserve(n);
  for (ProcessId pid = 0; pid < n; ++pid) processes_.push_back(factory(hosts_[pid]));
}

void Simulation::mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  const std::uint64_t x = a * 0x9e3779b97f4a7c15ull + b * 0xc2b2ae3d27d4eb4full + c * 0x165667b19e3779f9ull +
                          (d ^ clock_) * 0xd6e8feb86659fd93ull;
  trace_.digest = splitmix(trace_.digest ^ splitmix(x));
}

void Simulation::record(std::string_view kind, std::int64_t from, std::int64_t to, std::string_view payload,
                        std::string_view annotations) {
  nlohmann::ordered_json j;
  j["step"] = clock_;
  j["kind"] = kind;
  j["from"] = from;
  j["to"] = to;
  j["payload"] = payload;
  j["annotations"] = annotations;
  trace_.events.push_back(j.dump());
}

void Simulation::make_ready(EnvelopeId id) {
  state_[id] = State::Ready;
  ++ready_count_;
  if (fifo_) {
    ready_fifo_.push_back(id);
  } else {
    ready_pos_[id] = static_cast<std::uint32_t>(ready_.size());
    ready_.push_back(id);
  }
}

void Simulation::take_from_ready(EnvelopeId id) {
  --ready_count_;
  if (fifo_) return;  // lazily skipped
  const auto pos = ready_pos_[id];
  const auto last = ready_.back();
  ready_[pos] = last;
  ready_pos_[last] = pos;
  ready_.pop_back();
}

EnvelopeId Simulation::enqueue(ProcessId from, ProcessId to, std::uint32_t message_index) {
  const auto id = static_cast<EnvelopeId>(envelopes_.size());
  envelopes_.push_back(Envelope{from, to, message_index, clock_, 0});
  state_.push_back(State::Ready);
  ready_pos_.push_back(0);
  if (corrupt_[to]) {
    // The adversary sees everything addressed to its processes at once.
    state_.back() = State::Delivered;
    envelopes_.back().delivery_step = clock_;
    return id;
  }
  ++pending_;
  make_ready(id);
  return id;
}

void Simulation::send_from_correct(ProcessId from, MessagePtr msg) {
  ++clock_;
  const auto n = config_.params.n;
  const auto index = static_cast<std::uint32_t>(messages_.size());
  messages_.push_back(msg);
  const auto first = static_cast<EnvelopeId>(envelopes_.size());
  for (ProcessId to = 0; to < n; ++to) enqueue(from, to, index);
  auto& m = trace_.metrics;
  m.words_sent_by_correct += static_cast<std::uint64_t>(word_cost(*msg)) * n;
  m.envelopes_sent += n;
  ++m.broadcasts_by_kind[static_cast<std::size_t>(msg->kind)];
  mix(kEvSend, from, index, digest_word(msg->digest));
  if (recording()) record("send", from, -1, to_hex(msg->digest), describe_message(*msg));
  adversary_.on_broadcast(control_, from, messages_[index], first, n);
}

void Simulation::inject_envelopes(ProcessId from, const std::vector<ProcessId>* to, MessagePtr msg) {
  const auto n = config_.params.n;
  if (from >= n || !corrupt_[from]) {
    throw ForgeryRejected("ForgeryRejected: process " + std::to_string(from) + " is not corrupted");
  }
  if (!msg || msg->sender != from) {
    throw ForgeryRejected("ForgeryRejected: message sender does not match injecting process");
  }
  ++clock_;
  const auto index = static_cast<std::uint32_t>(messages_.size());
  messages_.push_back(std::move(msg));
  if (to == nullptr) {
    for (ProcessId r = 0; r < n; ++r) enqueue(from, r, index);
  } else {
    for (ProcessId r : *to) {
      if (r < n) enqueue(from, r, index);
    }
  }
  ++trace_.metrics.byzantine_injections;
  const auto& m = *messages_[index];
  mix(kEvInject, from, index, digest_word(m.digest));
  if (recording()) {
    std::string ann = describe_message(m);
    if (to != nullptr) ann += " recipients=" + std::to_string(to->size());
    record("inject", from, to != nullptr && to->size() == 1 ? static_cast<std::int64_t>((*to)[0]) : -1,
           to_hex(m.digest), ann);
  }
}

std::optional<std::pair<EnvelopeId, bool>> Simulation::next_envelope() {
  if (pending_ == 0) return std::nullopt;
  while (oldest_ < envelopes_.size() && state_[oldest_] == State::Delivered) ++oldest_;
  if (ready_count_ == 0 || clock_ - envelopes_[oldest_].send_step > staleness_) {
    return std::pair{oldest_, true};
  }
  if (fifo_) {
    while (state_[ready_fifo_.front()] != State::Ready) ready_fifo_.pop_front();
    return std::pair{ready_fifo_.front(), false};
  }
  return std::pair{ready_[uniform_below(scheduler_rng_, ready_.size())], false};
}

void Simulation::deliver(EnvelopeId id, bool forced) {
  ++clock_;
  if (state_[id] == State::Ready) take_from_ready(id);
  state_[id] = State::Delivered;
  --pending_;
  auto& e = envelopes_[id];
  e.delivery_step = clock_;
  ++trace_.metrics.deliveries;
  if (forced) ++trace_.metrics.forced_deliveries;
  mix(kEvDeliver, id, e.to, forced ? 1 : 0);
  const auto& msg = messages_[e.message];
  if (recording()) record("deliver", e.from, e.to, to_hex(msg->digest), forced ? "forced" : "");
  if (!corrupt_[e.to]) processes_[e.to]->on_message(e.from, msg);
}

void Simulation::apply_pending_corruptions() {
  if (pending_corrupt_.empty()) return;
  for (ProcessId pid : pending_corrupt_) {
    corrupt_[pid] = 1;
    corrupted_at_[pid] = clock_;
    ++corrupted_count_;
    trace_.corruptions.push_back({pid, clock_});
    mix(kEvCorrupt, pid, corrupted_count_, 0);
    if (recording()) record("corrupt", pid, -1, "", "");
  }
  pending_corrupt_.clear();
  refresh_gate();
}

void Simulation::note_decision(ProcessId pid, std::uint32_t round) {
  if (decided_[pid]) return;
  decided_[pid] = static_cast<std::uint8_t>(1);
  decision_round_.resize(config_.params.n, 0);
  decision_round_[pid] = round;
  mix(kEvDecide, pid, round, 0);
  refresh_gate();
}

void Simulation::refresh_gate() {
  if (decision_round_.empty()) return;
  std::uint32_t max_round = 0;
  for (ProcessId pid = 0; pid < config_.params.n; ++pid) {
    if (corrupt_[pid]) continue;
    if (!decided_[pid]) return;
    max_round = std::max(max_round, decision_round_[pid]);
  }
  const auto limit = static_cast<std::uint64_t>(max_round) + config_.post_decision_rounds;
  gate_ = static_cast<std::uint32_t>(std::min<std::uint64_t>(config_.round_cap, limit));
}

bool Simulation::audit_delayed_adaptive() const {
  if (trace_.corruptions.empty()) return true;
  for (EnvelopeId id = 0; id < envelopes_.size(); ++id) {
    const auto& e = envelopes_[id];
    if (!corrupt_[e.from]) continue;
    if (e.send_step < corrupted_at_[e.from] && state_[id] != State::Delivered) return false;
  }
  return true;
}

RunTrace Simulation::run() {
  const auto n = config_.params.n;
  if (processes_.size() != n) throw std::logic_error("populate() must run before run()");
  adversary_.on_start(control_);
  apply_pending_corruptions();
  for (ProcessId pid = 0; pid < n; ++pid) {
    if (!corrupt_[pid]) processes_[pid]->start();
    apply_pending_corruptions();
  }
  while (true) {
    if (clock_ >= config_.max_steps) {
      aborted_ = true;
      break;
    }
    const auto next = next_envelope();
    if (!next) break;
    deliver(next->first, next->second);
    apply_pending_corruptions();
  }

  trace_.final_step = clock_;
  trace_.metrics.committees = committees_->fixed_in_order().size();
  trace_.metrics.committee_rejections = committees_->total_rejections();
  trace_.decisions.clear();
  bool cap_hit = false;
  for (ProcessId pid = 0; pid < n; ++pid) {
    auto rec = processes_[pid]->record();
    rec.correct = !corrupt_[pid];
    if (rec.correct && !rec.done) {
      trace_.blocked = true;
      if (rec.rounds_started >= config_.round_cap) cap_hit = true;
    }
    trace_.decisions.push_back(std::move(rec));
  }
  if (aborted_) {
    trace_.blocked = true;
    trace_.block_reason = "StepLimit";
  } else if (trace_.blocked) {
    trace_.block_reason = cap_hit ? "RoundCapExceeded" : "BlockedRun";
  }
  trace_.delayed_adaptive_audit_ok = aborted_ || audit_delayed_adaptive();
  return trace_;
}

RunTrace run(const RunConfig& config, const ProcessFactory& factory, Adversary& adversary) {
  Simulation sim(config, adversary);
  sim.populate(factory);
  return sim.run();
}

}  // namespace sqba
