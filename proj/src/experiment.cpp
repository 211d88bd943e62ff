#include "sqba/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "sqba/adversary.hpp"
#include "sqba/rng.hpp"

namespace sqba {

namespace {

Value parse_value(std::string_view s) {
  if (s == "_") return Value::bottom();
  return Value::of(Bytes(s));
}

std::vector<Value> split_values(std::string_view s) {
  std::vector<Value> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto item = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (item.empty()) throw std::invalid_argument("empty value in input spec");
    out.push_back(parse_value(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void Violations::add(const Violations& o) {
  validity += o.validity;
  agreement += o.agreement;
  termination += o.termination;
  graded_agreement += o.graded_agreement;
  unique_qc += o.unique_qc;
  coin_common += o.coin_common;
  est_lock += o.est_lock;
  two_values += o.two_values;
  qc_evidence += o.qc_evidence;
  audit += o.audit;
}

std::vector<Value> parse_inputs(std::string_view spec, std::uint32_t n, std::uint64_t seed) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("input spec must be unanimous:V, split:V1,V2,..., list:... or random:...");
  }
  const auto kind = spec.substr(0, colon);
  const auto values = split_values(spec.substr(colon + 1));
  std::vector<Value> out;
  out.reserve(n);
  if (kind == "unanimous") {
    if (values.size() != 1) throw std::invalid_argument("unanimous takes exactly one value");
    out.assign(n, values.front());
  } else if (kind == "split") {
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(values[i % values.size()]);
  } else if (kind == "list") {
    if (values.size() != n) {
      throw std::invalid_argument("list input needs exactly n=" + std::to_string(n) + " values");
    }
    out = values;
  } else if (kind == "random") {
    std::mt19937_64 gen(derive_seed(seed, 3));
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(values[uniform_below(gen, values.size())]);
  } else {
    throw std::invalid_argument("unknown input pattern '" + std::string(kind) + "'");
  }
  return out;
}

std::string default_inputs(Protocol protocol) {
  switch (protocol) {
    case Protocol::Multivalued: return "unanimous:tx-block-A";
    default: return "unanimous:1";
  }
}

namespace {

void check_binary(const std::vector<const BinaryBa*>& procs, Violations& v, bool& compromised) {
  std::set<bool> decided;
  for (const auto* p : procs) {
    if (p->decision()) decided.insert(*p->decision());
    if (p->safety_compromised()) compromised = true;
  }
  if (decided.size() > 1) ++v.agreement;

  // Once someone decides v in round r, every process starts round r + 1 with est = v.
  for (const auto* p : procs) {
    if (!p->decision()) continue;
    const auto r = *p->decision_round();
    for (const auto* q : procs) {
      const auto& h = q->history();
      if (h.size() >= r + 1 && h[r].est_at_start != *p->decision()) {
        ++v.est_lock;
        return;
      }
    }
  }

  std::map<std::uint32_t, std::set<Value>> proposals;
  for (const auto* p : procs) {
    for (const auto& rec : p->history()) {
      if (rec.propose) proposals[rec.round].insert(*rec.propose);
    }
  }
  for (const auto& [round, vals] : proposals) {
    if (vals.size() > 2) {
      ++v.two_values;
      break;
    }
  }
}

void summarize_rounds(RunResult& r, const std::vector<const BinaryBa*>& procs) {
  std::uint64_t sum = 0;
  std::uint32_t count = 0;
  bool all_one = !procs.empty();
  for (const auto* p : procs) {
    if (!p->decision_round()) {
      all_one = false;
      continue;
    }
    const auto dr = *p->decision_round();
    sum += dr;
    ++count;
    r.max_decision_round = std::max(r.max_decision_round.value_or(0), dr);
    if (dr != 1) all_one = false;
  }
  r.all_round_one = all_one && count == procs.size();
  r.mean_decision_round = count ? static_cast<double>(sum) / count : 0.0;
}

void observe_coin(RunResult& r, Simulation& sim, const std::vector<const Coin*>& coins) {
  const auto& params = sim.config().params;
  std::optional<CoinCandidate> vmin;
  for (const auto& m : sim.messages()) {
    if (m->kind != MsgKind::CoinFirst || m->instance != kCoinInstance || m->round != 1) continue;
    if (!sim.verifier().valid(*m)) continue;
    CoinCandidate c{m->sender, std::get<FirstBody>(m->body).vrf, m->committee};
    if (!vmin || coin_less(c, *vmin)) vmin = std::move(c);
  }
  std::map<ProcessId, std::uint32_t> receivers;
  for (std::size_t i = 0; i < coins.size(); ++i) {
    const auto* c = coins[i];
    if (!c->second_member()) continue;
    for (auto origin : c->phase1_origins()) ++receivers[origin];
  }
  for (const auto& [origin, cnt] : receivers) {
    if (cnt >= params.B + 1) ++r.coin.common_values;
  }
  std::set<bool> outs;
  for (const auto* c : coins) {
    if (c->output()) outs.insert(*c->output());
  }
  const bool all_done = std::all_of(coins.begin(), coins.end(), [](const Coin* c) { return c->output().has_value(); });
  r.coin.all_agree = all_done && outs.size() == 1;
  if (r.coin.all_agree) r.coin.bit = *outs.begin();
  if (vmin) {
    r.coin.vmin_lsb = vmin->vrf.lsb();
    r.coin.vmin_receivers = receivers.count(vmin->origin) ? receivers[vmin->origin] : 0;
    r.coin.vmin_common = r.coin.vmin_receivers >= params.B + 1;
    if (r.coin.vmin_common) {
      for (const auto* c : coins) {
        if (c->output() && *c->output() != r.coin.vmin_lsb) {
          ++r.violations.coin_common;
          break;
        }
      }
    }
  }
}

std::uint32_t count_qc_values(Simulation& sim, std::uint32_t& rejections) {
  const auto W = sim.config().params.W;
  std::map<Value, std::set<ProcessId>> init_senders;
  std::set<Value> certified;
  for (const auto& m : sim.messages()) {
    if (m->instance != kMvInstance) continue;
    if (m->kind == MsgKind::MvInit) {
      if (sim.verifier().valid(*m)) init_senders[*m->value()].insert(m->sender);
    } else if (m->kind == MsgKind::MvConverge) {
      const auto& body = std::get<ConvergeBody>(m->body);
      if (!body.is_content) continue;
      if (sim.verifier().valid(*m)) {
        certified.insert(body.qc->value);
      } else {
        ++rejections;
      }
    }
  }
  for (const auto& [value, senders] : init_senders) {
    if (senders.size() >= W) certified.insert(value);
  }
  return static_cast<std::uint32_t>(certified.size());
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
  const auto& params = config.params;
  const auto spec = config.inputs.empty() ? default_inputs(config.protocol) : config.inputs;
  const auto inputs = parse_inputs(spec, params.n, seed);
  auto adversary = make_adversary(config.adversary);

  RunConfig rc;
  rc.params = params;
  rc.seed = seed;
  rc.sampling = config.mode;
  rc.round_cap = config.round_cap;
  rc.staleness_bound = config.staleness;
  rc.record_events = config.record;

  Simulation sim(rc, *adversary);
  sim.populate(make_factory(config.protocol, inputs));
  const RunTrace trace = sim.run();

  RunResult r;
  r.seed = seed;
  r.blocked = trace.blocked;
  r.block_reason = trace.block_reason;
  r.decisions = trace.decisions;
  r.words = trace.metrics.words_sent_by_correct;
  r.steps = trace.final_step;
  r.deliveries = trace.metrics.deliveries;
  r.forced = trace.metrics.forced_deliveries;
  r.digest = trace.digest;
  r.committees = trace.metrics.committees;
  r.committee_rejections = trace.metrics.committee_rejections;
  r.corrupted = static_cast<std::uint32_t>(trace.corruptions.size());
  r.all_correct = r.corrupted == 0;
  if (!trace.delayed_adaptive_audit_ok) ++r.violations.audit;
  if (config.record) r.trace_jsonl = trace.jsonl();

  std::vector<ProcessId> correct_ids;
  std::set<Value> correct_inputs;
  for (ProcessId pid = 0; pid < params.n; ++pid) {
    if (sim.is_corrupt(pid)) continue;
    correct_ids.push_back(pid);
    correct_inputs.insert(inputs[pid]);
  }
  r.correct = static_cast<std::uint32_t>(correct_ids.size());
  r.unanimous = correct_inputs.size() == 1;
  const std::optional<Value> common_input =
      r.unanimous ? std::optional<Value>(*correct_inputs.begin()) : std::nullopt;

  if (r.blocked) ++r.violations.termination;

  std::set<std::string> outputs;
  for (auto pid : correct_ids) {
    if (r.decisions[pid].done) outputs.insert(r.decisions[pid].output);
  }
  if (outputs.size() == 1) r.decided = *outputs.begin();

  switch (config.protocol) {
    case Protocol::Approver: {
      std::set<Value> singletons;
      for (auto pid : correct_ids) {
        const auto& a = dynamic_cast<ApproverProcess&>(sim.process(pid)).approver();
        if (!a.done()) continue;
        if (a.output().size() == 1) singletons.insert(a.output().front());
        if (common_input && a.output() != ValueSet{*common_input}) ++r.violations.validity;
      }
      if (r.violations.validity) r.violations.validity = 1;
      if (singletons.size() > 1) ++r.violations.graded_agreement;
      break;
    }
    case Protocol::Coin: {
      std::vector<const Coin*> coins;
      for (auto pid : correct_ids) coins.push_back(&dynamic_cast<CoinProcess&>(sim.process(pid)).coin());
      observe_coin(r, sim, coins);
      break;
    }
    case Protocol::Binary: {
      std::vector<const BinaryBa*> procs;
      for (auto pid : correct_ids) procs.push_back(&dynamic_cast<BinaryProcess&>(sim.process(pid)).ba());
      check_binary(procs, r.violations, r.safety_compromised);
      summarize_rounds(r, procs);
      if (common_input) {
        const auto want = common_input->as_bit();
        for (const auto* p : procs) {
          if (p->decision() && p->decision() != want) {
            ++r.violations.validity;
            break;
          }
        }
      }
      break;
    }
    case Protocol::Multivalued: {
      std::vector<const BinaryBa*> procs;
      std::vector<const MvBa*> mvs;
      for (auto pid : correct_ids) {
        const auto& mv = dynamic_cast<MvProcess&>(sim.process(pid)).mv();
        mvs.push_back(&mv);
        procs.push_back(&mv.binary());
      }
      check_binary(procs, r.violations, r.safety_compromised);
      summarize_rounds(r, procs);
      std::set<Value> decided;
      bool binary_false = false;
      bool content_correct = false;
      for (const auto* mv : mvs) {
        if (mv->decision()) decided.insert(*mv->decision());
        if (mv->binary().decision() == false) binary_false = true;
        if (mv->converge_member() && mv->sent_content() == true) content_correct = true;
        if (mv->waited_for_qc()) r.waited_for_qc = true;
      }
      if (decided.size() > 1) ++r.violations.agreement;
      if (r.all_correct && common_input) {
        for (const auto* mv : mvs) {
          if (mv->decision() && *mv->decision() != *common_input) {
            ++r.violations.validity;
            break;
          }
        }
      }
      if (binary_false && !content_correct) ++r.violations.qc_evidence;
      r.qc_values = count_qc_values(sim, r.qc_rejections);
      if (r.qc_values > 1) ++r.violations.unique_qc;
      break;
    }
  }
  return r;
}

std::vector<RunResult> run_batch(const ExperimentConfig& config, unsigned threads) {
  std::vector<RunResult> results(config.runs);
  threads = std::max(1u, std::min<unsigned>(threads, config.runs));
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= config.runs) return;
      try {
        results[i] = run_experiment(config, config.seed + i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.runs;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace sqba
