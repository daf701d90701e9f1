#pragma once

// Deterministic in-memory network: logical clock, event queue, FS routing, and a
// Dolev-Yao adversary that works on encoded wire bytes.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evc/bytes.hpp"
#include "evc/hashchain.hpp"
#include "evc/protocol.hpp"
#include "evc/wire.hpp"

namespace evc {

struct Topology {
  std::uint32_t fs = 1;
  std::uint32_t rsus_per_fs = 1;
  std::uint32_t cps_per_rsu = 5;
  std::vector<std::uint8_t> rates;  // per RSU; missing entries default to 1

  std::uint32_t rsu_count() const { return fs * rsus_per_fs; }
  std::uint8_t rate(std::uint32_t rsu) const;
  std::uint32_t fs_of(std::uint32_t rsu) const { return rsu / rsus_per_fs; }
  /// Throws Config on empty or inconsistent topologies.
  void validate() const;
};

// Node names used on links and in transcripts.
std::string rsu_name(std::uint32_t rsu);
std::string fs_name(std::uint32_t fs);
std::string cp_name(std::uint32_t rsu, std::uint32_t pad);

struct SegmentPlan {
  std::uint32_t rsu = 0;
  std::uint32_t pads = 0;  // pads the EV drives over in this segment
};

struct TripPlan {
  Millis start = 0;
  std::vector<SegmentPlan> segments;
};

struct VehiclePlan {
  std::string name;
  bool impostor = false;  // forged credentials, never registered with the RA
  std::vector<TripPlan> trips;
};

enum class AdversaryActionKind { Intercept, Replay, Tamper, Drop, Inject };

/// One adversary rule. Rules with a tag match the `occurrence`-th message on (src, dst) with that
/// tag (0 matches every one); empty src/dst match any endpoint. Inject rules fire at `at`.
struct AdversaryAction {
  AdversaryActionKind kind = AdversaryActionKind::Drop;
  std::string src, dst;
  std::optional<MessageTag> tag;
  std::uint32_t occurrence = 1;
  Millis delay = 0;                     // Replay; Intercept release delay when set
  std::optional<Millis> release_after;  // Intercept only
  std::string to;                       // Replay: deliver to another node instead
  std::size_t byte_index = 0;           // Tamper
  std::uint8_t mask = 0x01;             // Tamper
  Millis at = 0;                        // Inject
  Bytes raw;                            // Inject payload; empty means random bytes of `random_len`
  std::size_t random_len = 0;
};

struct AdversaryScript {
  std::vector<AdversaryAction> actions;
  bool empty() const { return actions.empty(); }
};

struct ClockSchedule {
  Millis pad_interval = 50;  // time between consecutive pads
  Millis settle_slack = 1;   // run this long past the last token expiry
};

/// What a scenario is expected to show; used for exit codes.
struct Expectation {
  bool adversarial = false;
  std::vector<std::string> errors;  // error kinds that must be observed on tainted traffic
  std::optional<std::uint64_t> disputes;
};

struct Scenario {
  std::string name = "scenario";
  std::string seed = "evcharge";
  std::string entity_seed;  // defaults to seed
  Topology topology;
  ProtocolConfig config;
  std::vector<VehiclePlan> vehicles;
  AdversaryScript adversary;
  ClockSchedule clock;
  std::uint64_t billing_inflation = 0;
  Expectation expect;
};

/// Throws Config on missing or malformed fields and on adversary rules naming unknown nodes.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

struct TranscriptEvent {
  Millis clock = 0;
  std::uint64_t seq = 0;
  std::string entity;
  std::string event;
  std::string phase_before, phase_after;
  std::string msg_tag;
  std::string src, dst, via;
  Bytes bytes;
  bool tainted = false;
  std::string detail;

  nlohmann::json to_json() const;
};

struct BillRecord {
  std::string vehicle;
  std::string pid_hex;
  std::uint64_t billed = 0;
  std::uint64_t metered = 0;
  bool accepted = true;
  std::int64_t delta = 0;
};

struct Summary {
  std::uint64_t tokens_issued = 0, tokens_tainted = 0;
  std::uint64_t established = 0, established_tainted = 0;
  std::uint64_t admissions = 0, admissions_tainted = 0;
  std::uint64_t accepts = 0, accepts_tainted = 0;  // pad accepts (power delivered)
  std::uint64_t rejects = 0, rejects_tainted = 0;
  std::uint64_t costs_accepted = 0, costs_tainted = 0;
  std::uint64_t settlements = 0, settlements_tainted = 0;
  std::uint64_t disputes = 0;
  std::uint64_t billed_total = 0, metered_total = 0, cp_total = 0;
  std::vector<BillRecord> bills;
  std::map<std::string, std::uint64_t> errors, tainted_errors;

  /// Any token, power, admission, cost, or settlement caused by adversary traffic.
  bool adversary_succeeded() const;
  nlohmann::json to_json() const;
};

struct Transcript {
  std::vector<TranscriptEvent> events;
  Summary summary;
  std::vector<ChainAudit> audits;
  std::string ledger_csv;
  std::vector<Digest> session_keys;  // every sk the CSPA derived, for secrecy checks

  std::string to_jsonl() const;
  std::string hexdump() const;
  /// Every plaintext-visible wire byte string sent during the run.
  std::vector<Bytes> wire_messages() const;
};

class World;

/// Drives one scenario over a logical clock.
class Simulator {
 public:
  explicit Simulator(const Scenario& scenario);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  Millis now() const;
  /// Processes every event due up to now + by and returns the new time.
  Millis advance_clock(Millis by);
  /// Runs until the queue drains.
  Transcript run();
  Transcript transcript() const;

  /// Replays raw wire traffic (as recorded in another transcript) into this world.
  void replay_recorded(const Transcript& recorded);

 private:
  std::unique_ptr<World> world_;
};

Transcript run_scenario(const Scenario& scenario);

/// Exit-code verdict for `simulate`: the adversary gained nothing and every expected error showed up.
bool scenario_held(const Scenario& scenario, const Summary& summary);

/// Replays every wire message of an honest run against fresh entities; returns how many sessions
/// reached an established, admitted, powered, or settled state.
std::uint64_t passive_replay_successes(const Scenario& honest);

struct AttackRow {
  std::string attack;
  std::string defense;
  std::string expected;
  std::string observed;
  bool held = false;
  Summary summary;
};

struct AttackSuiteOptions {
  std::string seed = "attack-suite";
  bool disable_freshness = false;
};

Scenario attack_scenario(const std::string& attack, const AttackSuiteOptions& opts);
std::vector<std::string> attack_names();
std::vector<AttackRow> attack_suite(const AttackSuiteOptions& opts = {});

}  // namespace evc
