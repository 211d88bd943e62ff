#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sqba/netsim.hpp"

namespace sqba {

/// Builds a strategy from "NAME[:opts]":
///   none[:random|fifo]   benign scheduler
///   crash[:K]            K (default f) silent corruptions at start
///   equivocate           f static corruptions sending conflicting INIT/ECHO, FIRST to half
///   qc_withhold          corrupts content-converge / OK senders right after they send
///                        and delays those messages to half the processes
///   coin_splitter        delays the current minimal FIRST and SECONDs carrying it
///                        from all processes except pid % 4 == 0
///   alert_skew           f static corruptions; converge members send forged content QCs
/// Throws std::invalid_argument on unknown names or options.
std::unique_ptr<Adversary> make_adversary(std::string_view spec);

const std::vector<std::string>& adversary_names();

/// Chooses k distinct processes with the adversary's own generator.
std::vector<ProcessId> pick_processes(AdversaryControl& ctl, std::uint32_t k);

}  // namespace sqba
