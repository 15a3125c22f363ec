#pragma once

#include "qns/capabilities.hpp"
#include "qns/prob.hpp"

#include <deque>
#include <mutex>
#include <optional>
#include <variant>

namespace qns {

struct PacketSpec {
    double window_s = 0.0;   // w
    std::uint32_t pairs = 0; // s
    double min_fidelity = 0; // F
};

struct Demand {
    DemandId demand_id = 0;
    PacketSpec packet;
    double minsep_s = 0.0;
    Nanos expiry_ns = 0; // absolute
    std::uint32_t n_inst = 0;
    // metadata
    ComponentId src = 0;
    ComponentId dst = 0;
    std::uint64_t capability_version = 0;
    std::uint64_t session_id = 0;
    double service_epsilon = 1e-5;
};

// Internal demand representation accepted and scheduled by the controller.
struct Pgt {
    PgtId pgt_id = 0;
    DemandId demand_id = 0;
    Nanos pga_duration_ns = 0; // E
    double packet_success = 0; // p_packet
    std::uint32_t min_alloc = 1;
    Path path;
    Nanos minsep_ns = 0;
    Nanos start_time_ns = 0; // first schedulable interval start
    Nanos expiry_ns = 0;
    // carried along for service-agreement creation and verification
    std::uint32_t n_inst = 0;
    double service_epsilon = 0.0;
};

enum class DemandState {
    Queued,
    Registered,
    Accepted,
    Rejected,
    Failed,
    Active,
    Satisfied,
    Expired,
    Terminated,
    Removed,
};

std::string to_string(DemandState s);

enum class FailReason {
    None,
    StaleCapabilities,
    UnknownNode,
    NoPath,
    Malformed,
    NonPositiveField,
    ExpiryBeforeStart,
    NoViablePGT,
    SchedulerReject,
};

std::string to_string(FailReason r);

struct ServiceAgreement {
    PgtId pgt_id = 0;
    std::uint32_t min_alloc = 0;
    Nanos start_time_ns = 0;
    Nanos expiry_ns = 0;
    double service_epsilon = 0;
};

struct DemandStatus {
    DemandState state = DemandState::Queued;
    FailReason reason = FailReason::None;
    std::optional<ServiceAgreement> agreement;
};

struct IllegalTransition : std::logic_error {
    using std::logic_error::logic_error;
};

// Ledger of demand statuses with the legal transition table enforced:
// Queued -> {Registered, Failed}, Registered -> {Accepted, Rejected},
// Accepted -> Active -> {Satisfied, Expired, Terminated, Removed}.
class DemandLedger {
public:
    void create(DemandId id);
    void transition(DemandId id, DemandState to, FailReason reason = FailReason::None,
                    std::optional<ServiceAgreement> agreement = std::nullopt);
    const DemandStatus& status(DemandId id) const;
    bool contains(DemandId id) const { return statuses_.count(id) != 0; }
    const std::map<DemandId, DemandStatus>& all() const { return statuses_; }

private:
    std::map<DemandId, DemandStatus> statuses_;
};

// Ordered PGT alternatives able to realize one demand, best path first.
struct GammaD {
    DemandId demand_id = 0;
    std::vector<Pgt> alternatives;
};

// FIFO of GammaD entries between demand registration and the scheduler.
class TaskIntakeBuffer {
public:
    void push(GammaD entry);
    // removes and returns up to max_entries front entries; nullopt = all
    std::vector<GammaD> read_and_flush(std::optional<std::size_t> max_entries = std::nullopt);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::deque<GammaD> entries_;
};

class TerminationBuffer {
public:
    void push(PgtId id);
    // always drains everything
    std::set<PgtId> read_and_flush();
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::set<PgtId> entries_;
};

struct PgtCreationParams {
    double p_grid_start = 0.05;
    double p_grid_step = 0.05;
    double p_grid_end = 0.95;
    std::uint32_t alloc_ceiling = 1000000;
    // per-attempt success clamp: attempt_period = min(0.5/rate, window)
    double max_attempt_success = 0.5;
};

// Chooses (E, p_packet, min_alloc) for one path by sweeping candidate
// packet success targets and minimizing the load min_alloc*(E + minsep);
// ties break toward smaller E. nullopt when no candidate satisfies
// E <= T_SI with a certifiable allocation.
std::optional<Pgt> create_pgt(const Demand& demand, const Path& path,
                              const CapabilityEntry& entry, Nanos t_si_ns,
                              Nanos t_start_ns, const PgtCreationParams& params,
                              PgtId pgt_id);

struct RegistrationResult {
    bool pass = false;
    FailReason reason = FailReason::None;
    GammaD gamma; // filled on pass
};

// Metadata checks, PGT creation over feasible paths, sanity checks. On pass
// the ledger moves to Registered and the GammaD is returned (the caller
// pushes it into the intake buffer); on fail the ledger records Failed.
RegistrationResult register_demand(const Demand& demand, const ResourceGraph& graph,
                                   const CapabilitiesTable& table, Nanos t_start_ns,
                                   Nanos t_si_ns, const PgtCreationParams& params,
                                   DemandLedger& ledger, PgtId first_pgt_id);

struct Decision {
    bool accept = false;
    std::optional<Pgt> pgt; // set on accept
};

// Applies a scheduler ACCEPT/REJECT outcome to a Registered demand.
// Returns the created service agreement on accept.
std::optional<ServiceAgreement> apply_decision(DemandLedger& ledger, DemandId id,
                                               const Decision& decision);

} // namespace qns
