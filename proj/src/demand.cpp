#include "qns/demand.hpp"

#include <algorithm>
#include <cmath>

namespace qns {

std::string to_string(DemandState s) {
    switch (s) {
    case DemandState::Queued: return "queued";
    case DemandState::Registered: return "registered";
    case DemandState::Accepted: return "accepted";
    case DemandState::Rejected: return "rejected";
    case DemandState::Failed: return "failed";
    case DemandState::Active: return "active";
    case DemandState::Satisfied: return "satisfied";
    case DemandState::Expired: return "expired";
    case DemandState::Terminated: return "terminated";
    case DemandState::Removed: return "removed";
    }
    return "?";
}

std::string to_string(FailReason r) {
    switch (r) {
    case FailReason::None: return "none";
    case FailReason::StaleCapabilities: return "stale_capabilities";
    case FailReason::UnknownNode: return "unknown_node";
    case FailReason::NoPath: return "no_path";
    case FailReason::Malformed: return "malformed";
    case FailReason::NonPositiveField: return "non_positive_field";
    case FailReason::ExpiryBeforeStart: return "expiry_before_start";
    case FailReason::NoViablePGT: return "no_viable_pgt";
    case FailReason::SchedulerReject: return "scheduler_reject";
    }
    return "?";
}

namespace {

bool legal_transition(DemandState from, DemandState to) {
    switch (from) {
    case DemandState::Queued:
        return to == DemandState::Registered || to == DemandState::Failed;
    case DemandState::Registered:
        return to == DemandState::Accepted || to == DemandState::Rejected;
    case DemandState::Accepted:
        return to == DemandState::Active;
    case DemandState::Active:
        return to == DemandState::Satisfied || to == DemandState::Expired ||
               to == DemandState::Terminated || to == DemandState::Removed;
    default:
        return false;
    }
}

} // namespace

void DemandLedger::create(DemandId id) {
    statuses_[id] = DemandStatus{};
}

void DemandLedger::transition(DemandId id, DemandState to, FailReason reason,
                              std::optional<ServiceAgreement> agreement) {
    auto it = statuses_.find(id);
    if (it == statuses_.end()) throw IllegalTransition("unknown demand");
    if (!legal_transition(it->second.state, to))
        throw IllegalTransition("illegal transition " + to_string(it->second.state) +
                                " -> " + to_string(to));
    it->second.state = to;
    it->second.reason = reason;
    if (agreement) it->second.agreement = agreement;
}

const DemandStatus& DemandLedger::status(DemandId id) const {
    return statuses_.at(id);
}

void TaskIntakeBuffer::push(GammaD entry) {
    std::lock_guard lock(mutex_);
    entries_.push_back(std::move(entry));
}

std::vector<GammaD> TaskIntakeBuffer::read_and_flush(std::optional<std::size_t> max_entries) {
    std::lock_guard lock(mutex_);
    std::size_t n = max_entries ? std::min(*max_entries, entries_.size()) : entries_.size();
    std::vector<GammaD> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(std::move(entries_.front()));
        entries_.pop_front();
    }
    return out;
}

std::size_t TaskIntakeBuffer::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

void TerminationBuffer::push(PgtId id) {
    std::lock_guard lock(mutex_);
    entries_.insert(id);
}

std::set<PgtId> TerminationBuffer::read_and_flush() {
    std::lock_guard lock(mutex_);
    std::set<PgtId> out;
    out.swap(entries_);
    return out;
}

std::size_t TerminationBuffer::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::optional<Pgt> create_pgt(const Demand& demand, const Path& path,
                              const CapabilityEntry& entry, Nanos t_si_ns,
                              Nanos t_start_ns, const PgtCreationParams& params,
                              PgtId pgt_id) {
    const double rate = entry.rate;
    const double w = demand.packet.window_s;
    if (rate <= 0.0 || w <= 0.0) return std::nullopt;

    const double attempt_period = std::min(params.max_attempt_success / rate, w);
    const double p_attempt = rate * attempt_period;
    const double t_si_s = nanos_to_seconds(t_si_ns);
    const auto m_max = static_cast<std::uint64_t>(t_si_s / attempt_period);
    auto window = static_cast<std::uint64_t>(w / attempt_period);
    window = std::max<std::uint64_t>(window, 1);
    if (window > m_max) return std::nullopt; // a single window does not fit T_SI

    const Nanos horizon = demand.expiry_ns - t_start_ns;
    if (horizon <= 0) return std::nullopt;
    const auto n_si = static_cast<std::uint32_t>((horizon + t_si_ns - 1) / t_si_ns);

    ScanModel model(window, demand.packet.pairs, p_attempt);

    struct Candidate {
        double load_s;
        double e_s;
        double p;
        std::uint32_t alloc;
    };
    std::optional<Candidate> best;
    for (double p = params.p_grid_start; p <= params.p_grid_end + 1e-12;
         p += params.p_grid_step) {
        auto attempts = model.min_attempts(p, m_max);
        if (!attempts) continue; // E would exceed the scheduling interval
        *attempts = std::max(*attempts, window); // a PGA holds at least one window
        double e_s = static_cast<double>(*attempts) * attempt_period;
        auto alloc = minimal_allocation(p, demand.n_inst, n_si, demand.service_epsilon,
                                        params.alloc_ceiling);
        if (!alloc) continue;
        double load = static_cast<double>(*alloc) * (e_s + demand.minsep_s);
        if (!best || load < best->load_s - 1e-12 ||
            (std::abs(load - best->load_s) <= 1e-12 && e_s < best->e_s)) {
            best = Candidate{load, e_s, p, *alloc};
        }
    }
    if (!best) return std::nullopt;

    Pgt pgt;
    pgt.pgt_id = pgt_id;
    pgt.demand_id = demand.demand_id;
    pgt.pga_duration_ns = seconds_to_nanos(best->e_s);
    pgt.packet_success = best->p;
    pgt.min_alloc = best->alloc;
    pgt.path = path;
    pgt.minsep_ns = seconds_to_nanos(demand.minsep_s);
    pgt.start_time_ns = t_start_ns;
    pgt.expiry_ns = demand.expiry_ns;
    pgt.n_inst = demand.n_inst;
    pgt.service_epsilon = demand.service_epsilon;
    if (pgt.pga_duration_ns > t_si_ns) return std::nullopt; // sanity check
    return pgt;
}

RegistrationResult register_demand(const Demand& demand, const ResourceGraph& graph,
                                   const CapabilitiesTable& table, Nanos t_start_ns,
                                   Nanos t_si_ns, const PgtCreationParams& params,
                                   DemandLedger& ledger, PgtId first_pgt_id) {
    if (!ledger.contains(demand.demand_id)) ledger.create(demand.demand_id);

    auto fail = [&](FailReason reason) {
        ledger.transition(demand.demand_id, DemandState::Failed, reason);
        RegistrationResult r;
        r.reason = reason;
        return r;
    };

    // (a) capability version matches the current table
    if (demand.capability_version != table.version)
        return fail(FailReason::StaleCapabilities);
    // (b) both ids are registered end nodes
    if (!graph.is_end_node(demand.src) || !graph.is_end_node(demand.dst))
        return fail(FailReason::UnknownNode);
    // (c) some allowed path connects the pair
    bool any_path = !feasible_paths(table, demand.src, demand.dst, 0.0).empty();
    if (!any_path) return fail(FailReason::NoPath);
    // (d) well-formed demand
    if (demand.src == demand.dst || demand.minsep_s < 0.0 || demand.expiry_ns <= 0 ||
        demand.service_epsilon <= 0.0 || demand.service_epsilon >= 1.0)
        return fail(FailReason::Malformed);
    // (e) positive numeric fields
    if (demand.n_inst == 0 || demand.packet.min_fidelity <= 0.0 ||
        demand.packet.window_s <= 0.0 || demand.packet.pairs == 0)
        return fail(FailReason::NonPositiveField);
    // (f) expiry after the first schedulable interval
    if (demand.expiry_ns <= t_start_ns) return fail(FailReason::ExpiryBeforeStart);

    GammaD gamma;
    gamma.demand_id = demand.demand_id;
    PgtId next_id = first_pgt_id;
    for (const Path& path : feasible_paths(table, demand.src, demand.dst,
                                           demand.packet.min_fidelity)) {
        auto pgt = create_pgt(demand, path, table.entries.at(path), t_si_ns, t_start_ns,
                              params, next_id);
        if (pgt) {
            gamma.alternatives.push_back(std::move(*pgt));
            ++next_id;
        }
    }
    if (gamma.alternatives.empty()) return fail(FailReason::NoViablePGT);

    ledger.transition(demand.demand_id, DemandState::Registered);
    RegistrationResult r;
    r.pass = true;
    r.gamma = std::move(gamma);
    return r;
}

std::optional<ServiceAgreement> apply_decision(DemandLedger& ledger, DemandId id,
                                               const Decision& decision) {
    if (!ledger.contains(id)) throw IllegalTransition("unknown demand");
    if (ledger.status(id).state != DemandState::Registered)
        throw IllegalTransition("decision on demand not in registered state");
    if (!decision.accept) {
        ledger.transition(id, DemandState::Rejected, FailReason::SchedulerReject);
        return std::nullopt;
    }
    const Pgt& pgt = decision.pgt.value();
    ServiceAgreement agreement;
    agreement.pgt_id = pgt.pgt_id;
    agreement.min_alloc = pgt.min_alloc;
    agreement.start_time_ns = pgt.start_time_ns;
    agreement.expiry_ns = pgt.expiry_ns;
    agreement.service_epsilon = pgt.service_epsilon;
    ledger.transition(id, DemandState::Accepted, FailReason::None, agreement);
    return agreement;
}

} // namespace qns
