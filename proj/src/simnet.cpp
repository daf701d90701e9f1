#include "evc/simnet.hpp"

#include <deque>
#include <fstream>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include "evc/bank.hpp"
#include "evc/cspa.hpp"
#include "evc/errors.hpp"
#include "evc/hash.hpp"
#include "evc/ra.hpp"
#include "evc/rsu.hpp"
#include "evc/vehicle.hpp"

namespace evc {

using nlohmann::json;

std::uint8_t Topology::rate(std::uint32_t rsu) const { return rsu < rates.size() ? rates[rsu] : 1; }

void Topology::validate() const {
  if (fs == 0 || rsus_per_fs == 0 || cps_per_rsu == 0) {
    throw Error(ErrorKind::Config, "topology needs at least one FS, RSU, and CP");
  }
  if (rates.size() > rsu_count()) throw Error(ErrorKind::Config, "more rates than RSUs");
  for (auto r : rates) {
    if (r == 0) throw Error(ErrorKind::Config, "RSU rates must be in [1, 255]");
  }
}

std::string rsu_name(std::uint32_t rsu) { return "RSU-" + std::to_string(rsu); }
std::string fs_name(std::uint32_t fs) { return "FS-" + std::to_string(fs); }
std::string cp_name(std::uint32_t rsu, std::uint32_t pad) {
  return "CP-" + std::to_string(rsu) + "-" + std::to_string(pad);
}

namespace {

const char* kRa = "RA";
const char* kBank = "BANK";
const char* kCspa = "CSPA";
const char* kAdversary = "ADV";

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

AdversaryActionKind action_kind(const std::string& s) {
  if (s == "intercept") return AdversaryActionKind::Intercept;
  if (s == "replay") return AdversaryActionKind::Replay;
  if (s == "tamper") return AdversaryActionKind::Tamper;
  if (s == "drop") return AdversaryActionKind::Drop;
  if (s == "inject") return AdversaryActionKind::Inject;
  throw Error(ErrorKind::Config, "unknown adversary action '" + s + "'");
}

std::set<std::string> node_names(const Scenario& s) {
  std::set<std::string> n{kRa, kBank, kCspa, kAdversary};
  const Topology& t = s.topology;
  for (std::uint32_t f = 0; f < t.fs; ++f) n.insert(fs_name(f));
  for (std::uint32_t j = 0; j < t.rsu_count(); ++j) {
    n.insert(rsu_name(j));
    for (std::uint32_t k = 0; k < t.cps_per_rsu; ++k) n.insert(cp_name(j, k));
  }
  for (const auto& v : s.vehicles) n.insert(v.name);
  return n;
}

void validate_scenario(const Scenario& s) {
  s.topology.validate();
  std::set<std::string> seen;
  for (const auto& v : s.vehicles) {
    if (v.name.empty()) throw Error(ErrorKind::Config, "vehicle without a name");
    if (!seen.insert(v.name).second) throw Error(ErrorKind::Config, "duplicate vehicle '" + v.name + "'");
    std::size_t trips = v.trips.size();
    if (trips > s.config.pseudonym_batch) {
      throw Error(ErrorKind::Config, v.name + " plans more trips than its pseudonym batch");
    }
    for (const auto& trip : v.trips) {
      for (const auto& seg : trip.segments) {
        if (seg.rsu >= s.topology.rsu_count()) {
          throw Error(ErrorKind::Config, v.name + " visits nonexistent " + rsu_name(seg.rsu));
        }
        if (seg.pads > s.topology.cps_per_rsu) {
          throw Error(ErrorKind::Config, v.name + " crosses more pads than " + rsu_name(seg.rsu) + " has");
        }
      }
    }
  }
  const auto nodes = node_names(s);
  auto check = [&](const std::string& name) {
    if (!name.empty() && !nodes.count(name)) throw Error(ErrorKind::Config, "adversary script names unknown node '" + name + "'");
  };
  for (const auto& a : s.adversary.actions) {
    check(a.src);
    check(a.dst);
    check(a.to);
    if (a.kind == AdversaryActionKind::Inject) {
      if (a.dst.empty() || !a.tag) throw Error(ErrorKind::Config, "inject needs dst and tag");
      if (a.raw.empty() && a.random_len == 0) throw Error(ErrorKind::Config, "inject needs hex or random_len");
    }
  }
}

}  // namespace

Scenario parse_scenario(const json& j) {
  Scenario s;
  try {
    s.name = get_or<std::string>(j, "name", s.name);
    s.seed = get_or<std::string>(j, "seed", s.seed);
    s.entity_seed = get_or<std::string>(j, "entity_seed", "");
    if (j.contains("topology")) {
      const json& t = j.at("topology");
      s.topology.fs = get_or<std::uint32_t>(t, "fs", 1);
      s.topology.rsus_per_fs = get_or<std::uint32_t>(t, "rsus_per_fs", 1);
      s.topology.cps_per_rsu = get_or<std::uint32_t>(t, "cps_per_rsu", 5);
      for (const auto& r : get_or<std::vector<int>>(t, "rates", {})) {
        if (r < 1 || r > 255) throw Error(ErrorKind::Config, "RSU rates must be in [1, 255]");
        s.topology.rates.push_back(static_cast<std::uint8_t>(r));
      }
    }
    if (j.contains("protocol")) {
      const json& p = j.at("protocol");
      ProtocolConfig& c = s.config;
      c.freshness_window_ms = get_or<Millis>(p, "freshness_window_ms", c.freshness_window_ms);
      c.token_validity_ms = get_or<Millis>(p, "token_validity_ms", c.token_validity_ms);
      c.pseudonym_batch = get_or<std::size_t>(p, "pseudonym_batch", c.pseudonym_batch);
      c.chain_margin = get_or<std::size_t>(p, "chain_margin", c.chain_margin);
      c.check_timestamps = get_or<bool>(p, "check_timestamps", c.check_timestamps);
    }
    if (j.contains("clock")) {
      s.clock.pad_interval = get_or<Millis>(j.at("clock"), "pad_interval_ms", s.clock.pad_interval);
      s.clock.settle_slack = get_or<Millis>(j.at("clock"), "settle_slack_ms", s.clock.settle_slack);
    }
    for (const json& v : get_or<json>(j, "vehicles", json::array())) {
      VehiclePlan plan;
      plan.name = v.at("name").get<std::string>();
      plan.impostor = get_or<bool>(v, "impostor", false);
      for (const json& t : get_or<json>(v, "trips", json::array())) {
        TripPlan trip;
        trip.start = t.at("start_ms").get<Millis>();
        for (const json& seg : t.at("segments")) {
          trip.segments.push_back({seg.at("rsu").get<std::uint32_t>(), seg.at("pads").get<std::uint32_t>()});
        }
        plan.trips.push_back(trip);
      }
      s.vehicles.push_back(plan);
    }
    for (const json& a : get_or<json>(j, "adversary", json::array())) {
      AdversaryAction act;
      act.kind = action_kind(a.at("action").get<std::string>());
      act.src = get_or<std::string>(a, "src", "");
      act.dst = get_or<std::string>(a, "dst", "");
      if (a.contains("tag")) {
        auto tag = tag_from_name(a.at("tag").get<std::string>());
        if (!tag) throw Error(ErrorKind::Config, "unknown message tag '" + a.at("tag").get<std::string>() + "'");
        act.tag = *tag;
      }
      act.occurrence = get_or<std::uint32_t>(a, "occurrence", 1);
      act.delay = get_or<Millis>(a, "delay_ms", 0);
      if (a.contains("release_after_ms")) act.release_after = a.at("release_after_ms").get<Millis>();
      act.to = get_or<std::string>(a, "to", "");
      act.byte_index = get_or<std::size_t>(a, "byte", 0);
      act.mask = static_cast<std::uint8_t>(get_or<int>(a, "mask", 1));
      act.at = get_or<Millis>(a, "at_ms", 0);
      if (a.contains("hex")) act.raw = from_hex(a.at("hex").get<std::string>());
      act.random_len = get_or<std::size_t>(a, "random_len", 0);
      s.adversary.actions.push_back(act);
    }
    s.billing_inflation = get_or<std::uint64_t>(j, "billing_inflation", 0);
    if (j.contains("expect")) {
      const json& e = j.at("expect");
      s.expect.adversarial = get_or<bool>(e, "adversarial", false);
      s.expect.errors = get_or<std::vector<std::string>>(e, "errors", {});
      if (e.contains("disputes")) s.expect.disputes = e.at("disputes").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("scenario: ") + e.what());
  } catch (const DecodeError& e) {
    throw Error(ErrorKind::Config, std::string("scenario: ") + e.what());
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read scenario file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, path + ": " + e.what());
  }
  return parse_scenario(j);
}

json TranscriptEvent::to_json() const {
  json j = {{"clock", clock},   {"seq", seq},     {"entity", entity},   {"event", event},
            {"phase_before", phase_before},    {"phase_after", phase_after}, {"msg_tag", msg_tag}};
  if (!src.empty()) j["src"] = src;
  if (!dst.empty()) j["dst"] = dst;
  if (!via.empty()) j["via"] = via;
  if (!bytes.empty()) {
    j["len"] = bytes.size();
    j["hex"] = to_hex(bytes);
  }
  if (tainted) j["tainted"] = true;
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

bool Summary::adversary_succeeded() const {
  return tokens_tainted + established_tainted + admissions_tainted + accepts_tainted + costs_tainted +
             settlements_tainted >
         0;
}

json Summary::to_json() const {
  json bills_j = json::array();
  for (const auto& b : bills) {
    bills_j.push_back({{"vehicle", b.vehicle},
                       {"pid_hex", b.pid_hex},
                       {"billed", b.billed},
                       {"metered", b.metered},
                       {"accepted", b.accepted},
                       {"delta", b.delta}});
  }
  return {{"tokens_issued", tokens_issued},
          {"tokens_tainted", tokens_tainted},
          {"established", established},
          {"established_tainted", established_tainted},
          {"admissions", admissions},
          {"admissions_tainted", admissions_tainted},
          {"accepts", accepts},
          {"accepts_tainted", accepts_tainted},
          {"rejects", rejects},
          {"rejects_tainted", rejects_tainted},
          {"costs_accepted", costs_accepted},
          {"costs_tainted", costs_tainted},
          {"settlements", settlements},
          {"settlements_tainted", settlements_tainted},
          {"disputes", disputes},
          {"billed_total", billed_total},
          {"metered_total", metered_total},
          {"cp_total", cp_total},
          {"bills", bills_j},
          {"errors", errors},
          {"tainted_errors", tainted_errors}};
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& e : events) {
    out += e.to_json().dump();
    out += '\n';
  }
  return out;
}

std::string Transcript::hexdump() const {
  std::string out;
  for (const auto& e : events) {
    if (e.event != "send" && e.event != "adv-inject") continue;
    out += hexdump_line(e.msg_tag, e.tainted ? "adv" : "out", e.src, e.dst, e.bytes);
    out += '\n';
  }
  return out;
}

std::vector<Bytes> Transcript::wire_messages() const {
  std::vector<Bytes> out;
  for (const auto& e : events) {
    if (!e.bytes.empty()) out.push_back(e.bytes);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Packet {
  std::string src, dst, via;
  MessageTag tag = MessageTag::M1;
  Bytes bytes;
  bool tainted = false;
};

struct Scheduled {
  Millis time = 0;
  std::uint64_t seq = 0;
  std::function<void()> fn;
};

struct Later {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

struct VehicleNode {
  VehiclePlan plan;
  std::unique_ptr<Vehicle> ev;
  std::size_t trip = 0;
  std::size_t segment = 0;
  std::optional<Digest> chain_head;
  std::deque<std::string> pending_pids;  // bills in Bank settlement order
};

std::uint32_t parse_index(const std::string& name, std::size_t offset) {
  return static_cast<std::uint32_t>(std::stoul(name.substr(offset)));
}

}  // namespace

class World {
 public:
  explicit World(const Scenario& s)
      : sc_(s),
        setup_(setup(as_bytes(s.seed))),
        root_(Rng::from_string(s.entity_seed.empty() ? s.seed : s.entity_seed)),
        adv_rng_(root_.derive("adversary")) {
    validate_scenario(sc_);
    const ProtocolConfig& cfg = sc_.config;
    const SystemParams& params = setup_.params;
    ra_ = std::make_unique<RegistrationAuthority>(params, setup_.master_secret, cfg, root_.derive(kRa));
    bank_ = std::make_unique<Bank>(params, &ra_->registry(), cfg, root_.derive(kBank));

    Rng keys = root_.derive("group-keys");
    gk_rsu_cspa_ = GroupKey::random(kRsuCspaKeyId, keys);
    std::map<std::uint32_t, std::uint8_t> rates;
    const Topology& topo = sc_.topology;
    for (std::uint32_t j = 0; j < topo.rsu_count(); ++j) {
      rates[j] = topo.rate(j);
      GroupKey gk_rsu_cp = GroupKey::random(rsu_cp_key_id(j), keys);
      GroupKey gk_cp = GroupKey::random(cp_group_key_id(j), keys);
      rsus_.push_back(std::make_unique<RoadsideUnit>(params, j, topo.rate(j), topo.cps_per_rsu, cfg,
                                                     root_.derive(rsu_name(j)), gk_rsu_cspa_, gk_rsu_cp));
      std::vector<std::unique_ptr<ChargingPad>> pads;
      for (std::uint32_t k = 0; k < topo.cps_per_rsu; ++k) {
        pads.push_back(std::make_unique<ChargingPad>(params, j, k, topo.cps_per_rsu, cfg, root_.derive(cp_name(j, k)),
                                                     gk_rsu_cp, gk_cp));
      }
      cps_.push_back(std::move(pads));
    }
    cspa_ = std::make_unique<ChargingAuthority>(params, make_identity(kCspa), cfg, root_.derive(kCspa), gk_rsu_cspa_,
                                                ra_->public_key(), bank_->public_key(), rates);
    cspa_->set_billing_inflation(sc_.billing_inflation);

    for (const auto& plan : sc_.vehicles) {
      VehicleNode node;
      node.plan = plan;
      node.ev = std::make_unique<Vehicle>(params, make_identity(plan.name), cfg, root_.derive("EV/" + plan.name),
                                          ra_->public_key(), bank_->public_key());
      if (plan.impostor) {
        node.ev->forge_credentials(cfg.pseudonym_batch);
      } else {
        bank_->open_account(node.ev->id(), node.ev->public_key());
      }
      vehicle_by_id_[node.ev->id()] = plan.name;
      vehicles_.emplace(plan.name, std::move(node));
    }

    // Registration at t = 0, run to completion before any trip starts.
    send(kCspa, kRa, MessageTag::M1, cspa_->registration_request(now_), false);
    for (auto& [name, node] : vehicles_) {
      if (!node.plan.impostor) send(name, kRa, MessageTag::M3, node.ev->registration_request(now_), false);
    }
    drain(0);

    for (auto& [name, node] : vehicles_) {
      for (std::size_t t = 0; t < node.plan.trips.size(); ++t) {
        std::string n = name;
        at(node.plan.trips[t].start, [this, n, t] { start_trip(n, t); });
      }
    }
    for (const auto& a : sc_.adversary.actions) {
      if (a.kind != AdversaryActionKind::Inject) continue;
      at(a.at, [this, a] { inject(a); });
    }
  }

  Millis now() const { return now_; }

  Millis advance(Millis by) {
    const Millis target = now_ + by;
    drain(target);
    now_ = target;
    return now_;
  }

  void run() {
    while (!queue_.empty()) drain(queue_.top().time);
  }

  void replay(const Transcript& recorded) {
    for (const auto& e : recorded.events) {
      if (e.event != "send") continue;
      auto tag = tag_from_name(e.msg_tag);
      if (!tag) continue;
      Packet p{e.src, e.dst, e.via, *tag, e.bytes, true};
      at(std::max(e.clock, now_), [this, p] { deliver(p); });
    }
  }

  Transcript transcript() const {
    Transcript t = tr_;
    for (const auto& [head, audit] : audits_) t.audits.push_back(audit);
    t.ledger_csv = cspa_->ledger().to_csv();
    return t;
  }

 private:
  // ---- scheduling -------------------------------------------------------

  void at(Millis time, std::function<void()> fn) { queue_.push({time, ++seq_, std::move(fn)}); }

  void drain(Millis until) {
    while (!queue_.empty() && queue_.top().time <= until) {
      Scheduled ev = queue_.top();
      queue_.pop();
      now_ = std::max(now_, ev.time);
      ev.fn();
    }
  }

  TranscriptEvent& log(const std::string& entity, const std::string& event, const std::string& tag = "") {
    TranscriptEvent e;
    e.clock = now_;
    e.seq = ++event_seq_;
    e.entity = entity;
    e.event = event;
    e.msg_tag = tag;
    tr_.events.push_back(std::move(e));
    return tr_.events.back();
  }

  void error(const std::string& entity, const Packet& p, const Error& err) {
    const std::string kind(to_string(err.kind()));
    auto& e = log(entity, "error", std::string(tag_name(p.tag)));
    e.src = p.src;
    e.dst = p.dst;
    e.tainted = p.tainted;
    e.detail = kind + ": " + err.what();
    ++tr_.summary.errors[kind];
    if (p.tainted) ++tr_.summary.tainted_errors[kind];
  }

  std::string route_via(const std::string& src, const std::string& dst) const {
    auto fs_for = [&](const std::string& n) -> std::optional<std::string> {
      if (n.rfind("RSU-", 0) == 0) return fs_name(sc_.topology.fs_of(parse_index(n, 4)));
      return std::nullopt;
    };
    if (src == kCspa) {
      if (auto f = fs_for(dst)) return *f;
    }
    if (dst == kCspa) {
      if (auto f = fs_for(src)) return *f;
    }
    return "";
  }

  bool matches(const AdversaryAction& a, const Packet& p) const {
    if (a.kind == AdversaryActionKind::Inject) return false;
    if (a.tag && *a.tag != p.tag) return false;
    if (!a.src.empty() && a.src != p.src) return false;
    if (!a.dst.empty() && a.dst != p.dst) return false;
    return true;
  }

  void send(const std::string& src, const std::string& dst, MessageTag tag, Bytes bytes, bool tainted) {
    Packet p{src, dst, route_via(src, dst), tag, std::move(bytes), tainted};
    if (auto v = vehicles_.find(src); v != vehicles_.end() && v->second.plan.impostor) p.tainted = true;
    auto& e = log(src, "send", std::string(tag_name(tag)));
    e.src = p.src;
    e.dst = p.dst;
    e.via = p.via;
    e.bytes = p.bytes;
    e.tainted = p.tainted;

    bool forward = true;
    const auto& actions = sc_.adversary.actions;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      const AdversaryAction& a = actions[i];
      if (!matches(a, p)) continue;
      const std::uint32_t count = ++match_counts_[i];
      if (a.occurrence != 0 && count != a.occurrence) continue;
      switch (a.kind) {
        case AdversaryActionKind::Drop: {
          forward = false;
          adversary_log("adv-drop", p);
          break;
        }
        case AdversaryActionKind::Intercept: {
          forward = false;
          adversary_log("adv-intercept", p);
          if (a.release_after) {
            Packet q = p;
            q.tainted = true;
            at(now_ + *a.release_after, [this, q] {
              adversary_log("adv-release", q);
              deliver(q);
            });
          }
          break;
        }
        case AdversaryActionKind::Tamper: {
          if (a.byte_index < p.bytes.size()) {
            p.bytes[a.byte_index] ^= a.mask;
            p.tainted = true;
            adversary_log("adv-tamper", p).detail = "byte " + std::to_string(a.byte_index);
          }
          break;
        }
        case AdversaryActionKind::Replay: {
          Packet q = p;
          q.tainted = true;
          if (!a.to.empty()) q.dst = a.to;
          at(now_ + a.delay, [this, q] {
            adversary_log("adv-replay", q);
            deliver(q);
          });
          break;
        }
        case AdversaryActionKind::Inject:
          break;
      }
    }
    if (forward) {
      at(now_, [this, p] { deliver(p); });
    }
  }

  TranscriptEvent& adversary_log(const std::string& event, const Packet& p) {
    auto& e = log(kAdversary, event, std::string(tag_name(p.tag)));
    e.src = p.src;
    e.dst = p.dst;
    e.bytes = p.bytes;
    e.tainted = true;
    return e;
  }

  void inject(const AdversaryAction& a) {
    Packet p{kAdversary, a.dst, "", *a.tag, a.raw, true};
    if (p.bytes.empty()) p.bytes = adv_rng_.bytes(a.random_len);
    if (p.tag == MessageTag::M13 && a.raw.empty() && !p.bytes.empty()) p.bytes[0] = kContinueFlag;
    adversary_log("adv-inject", p);
    deliver(p);
  }

  // ---- delivery ---------------------------------------------------------

  void deliver(const Packet& p) {
    auto& e = log(p.dst, "deliver", std::string(tag_name(p.tag)));
    e.src = p.src;
    e.dst = p.dst;
    e.tainted = p.tainted;
    try {
      if (p.dst == kRa) {
        on_ra(p);
      } else if (p.dst == kBank) {
        on_bank(p);
      } else if (p.dst == kCspa) {
        on_cspa(p);
      } else if (p.dst.rfind("RSU-", 0) == 0) {
        on_rsu(parse_index(p.dst, 4), p);
      } else if (p.dst.rfind("CP-", 0) == 0) {
        const auto dash = p.dst.find('-', 3);
        on_cp(static_cast<std::uint32_t>(std::stoul(p.dst.substr(3, dash - 3))), parse_index(p.dst, dash + 1), p);
      } else if (auto v = vehicles_.find(p.dst); v != vehicles_.end()) {
        on_vehicle(v->second, p);
      } else {
        log(p.dst, "unroutable", std::string(tag_name(p.tag))).tainted = p.tainted;
      }
    } catch (const Error& err) {
      error(p.dst, p, err);
    }
  }

  std::optional<G1Point> public_key_of(const std::string& name) const {
    if (name == kCspa) return cspa_->public_key();
    if (auto v = vehicles_.find(name); v != vehicles_.end()) return v->second.ev->public_key();
    return std::nullopt;
  }

  void on_ra(const Packet& p) {
    if (p.tag != MessageTag::M1 && p.tag != MessageTag::M3) {
      throw Error(ErrorKind::Protocol, "RA does not handle " + std::string(tag_name(p.tag)));
    }
    auto pk = public_key_of(p.src);
    if (!pk) throw Error(ErrorKind::Protocol, "registration from unknown endpoint " + p.src);
    Bytes reply = ra_->handle_registration(p.tag, p.bytes, *pk, now_);
    log(kRa, p.tag == MessageTag::M1 ? "register-cspa" : "register-ev", std::string(tag_name(p.tag))).tainted =
        p.tainted;
    send(kRa, p.src, p.tag == MessageTag::M1 ? MessageTag::M2 : MessageTag::M4, std::move(reply), p.tainted);
  }

  void on_bank(const Packet& p) {
    if (p.tag == MessageTag::M3Bank) {
      send(kBank, p.src, MessageTag::M4Bank, bank_->handle_ticket_request(p.bytes, now_), p.tainted);
      return;
    }
    if (p.tag != MessageTag::M18) throw Error(ErrorKind::Protocol, "Bank does not handle " + std::string(tag_name(p.tag)));
    BankBill bill = bank_->handle_settlement(p.bytes, now_);
    auto& e = log(kBank, "settle", "m18");
    e.tainted = p.tainted;
    e.detail = "cost=" + std::to_string(bill.cost);
    ++tr_.summary.settlements;
    if (p.tainted) ++tr_.summary.settlements_tainted;
    auto owner = vehicle_by_id_.find(bill.ev_id);
    if (owner == vehicle_by_id_.end() || bill.sealed_m19.empty()) return;
    vehicles_.at(owner->second).pending_pids.push_back(to_hex(bill.pid));
    send(kBank, owner->second, MessageTag::M19, std::move(bill.sealed_m19), p.tainted);
  }

  void on_cspa(const Packet& p) {
    const SessionState* before = cspa_->session(p.src);
    const std::string phase_before(before ? to_string(before->phase) : "Idle");
    auto note = [&](const std::string& event) -> TranscriptEvent& {
      auto& e = log(kCspa, event, std::string(tag_name(p.tag)));
      const SessionState* s = cspa_->session(p.src);
      e.phase_before = phase_before;
      e.phase_after = s ? std::string(to_string(s->phase)) : "Idle";
      e.src = p.src;
      e.tainted = p.tainted;
      return e;
    };
    switch (p.tag) {
      case MessageTag::M2:
        cspa_->on_registration_reply(p.bytes, now_);
        note("registered");
        return;
      case MessageTag::M5: {
        WireMessage m6 = cspa_->cspa_respond(p.src, decode(MessageTag::M5, p.bytes), now_);
        note("phase");
        send(kCspa, p.src, MessageTag::M6, encode(m6), p.tainted);
        return;
      }
      case MessageTag::M7: {
        TokenIssue issue;
        try {
          issue = cspa_->cspa_verify_and_issue_token(p.src, p.bytes, now_);
        } catch (const Error&) {
          note("phase");
          throw;
        }
        note("token").detail = "token_hash=" + to_hex(issue.token_hash);
        ++tr_.summary.tokens_issued;
        if (p.tainted) ++tr_.summary.tokens_tainted;
        tr_.session_keys.push_back(*cspa_->session(p.src)->session_key);
        send(kCspa, p.src, MessageTag::M8, encode(issue.m8), p.tainted);
        for (std::uint32_t j = 0; j < rsus_.size(); ++j) {
          send(kCspa, rsu_name(j), MessageTag::M9, issue.sealed_m9, p.tainted);
        }
        const bool tainted = p.tainted;
        at(issue.token.expires_at(), [this, tainted] { settle(tainted); });
        return;
      }
      case MessageTag::M17: {
        if (p.src.rfind("RSU-", 0) != 0) throw Error(ErrorKind::Protocol, "m17 from a non-RSU endpoint");
        CostReport r = cspa_->cspa_accumulate(parse_index(p.src, 4), p.bytes, now_);
        auto& e = log(kCspa, "cost", "m17");
        e.src = p.src;
        e.tainted = p.tainted;
        e.detail = "cost=" + std::to_string(r.cost) + " total=" + std::to_string(r.total);
        ++tr_.summary.costs_accepted;
        if (p.tainted) ++tr_.summary.costs_tainted;
        return;
      }
      default:
        throw Error(ErrorKind::Protocol, "CSPA does not handle " + std::string(tag_name(p.tag)));
    }
  }

  void settle(bool tainted) {
    for (auto& order : cspa_->cspa_settle_due(now_)) {
      auto& e = log(kCspa, "bill-bank", "m18");
      e.tainted = tainted;
      e.detail = "pid=" + to_hex(order.pid) + " total=" + std::to_string(order.total);
      send(kCspa, kBank, MessageTag::M18, std::move(order.sealed_m18), tainted);
    }
  }

  void on_rsu(std::uint32_t j, const Packet& p) {
    if (j >= rsus_.size()) throw Error(ErrorKind::Protocol, "no such RSU");
    RoadsideUnit& rsu = *rsus_[j];
    const std::string name = rsu_name(j);
    switch (p.tag) {
      case MessageTag::M9:
        rsu.on_token_distribution(p.bytes, now_);
        return;
      case MessageTag::M10: {
        Admission a = rsu.rsu_admit(p.bytes, now_);
        auto& e = log(name, "admit", "m10");
        e.src = p.src;
        e.tainted = p.tainted;
        ++tr_.summary.admissions;
        if (p.tainted) ++tr_.summary.admissions_tainted;
        ChainAudit audit;
        audit.token_hash = a.token_hash;
        audit.n = sc_.topology.cps_per_rsu + sc_.config.chain_margin;
        const Digest head = a.m12.digest("chain_head");
        audits_[head] = audit;
        head_by_anchor_[a.m12.digest("anchor")] = head;
        send(name, p.src, MessageTag::M11, std::move(a.sealed_m11), p.tainted);
        for (std::uint32_t k = 0; k < cps_[j].size(); ++k) {
          send(name, cp_name(j, k), MessageTag::M12, a.sealed_m12, p.tainted);
        }
        return;
      }
      case MessageTag::M16: {
        SegmentReport r = rsu.on_termination(p.bytes, now_);
        auto& e = log(name, "segment-cost", "m16");
        e.tainted = p.tainted;
        e.detail = "pads=" + std::to_string(r.pads) + " cost=" + std::to_string(r.cost);
        send(name, kCspa, MessageTag::M17, std::move(r.sealed_m17), p.tainted);
        for (std::uint32_t k = 0; k < cps_[j].size(); ++k) {
          send(name, cp_name(j, k), MessageTag::SegmentClose, r.sealed_close, p.tainted);
        }
        return;
      }
      default:
        throw Error(ErrorKind::Protocol, name + " does not handle " + std::string(tag_name(p.tag)));
    }
  }

  void on_cp(std::uint32_t j, std::uint32_t k, const Packet& p) {
    if (j >= cps_.size() || k >= cps_[j].size()) throw Error(ErrorKind::Protocol, "no such CP");
    ChargingPad& cp = *cps_[j][k];
    const std::string name = cp_name(j, k);
    switch (p.tag) {
      case MessageTag::M12:
        cp.on_chain_broadcast(p.bytes, now_);
        return;
      case MessageTag::M14:
        if (!cp.on_relay(p.bytes)) log(name, "relay-unmatched", "m14").tainted = p.tainted;
        return;
      case MessageTag::SegmentClose:
        cp.on_close(p.bytes, now_);
        return;
      case MessageTag::M13: {
        PadVerdict v = cp.cp_verify_and_relay(decode(MessageTag::M13, p.bytes));
        auto vehicle = vehicles_.find(p.src);
        if (!v.accepted) {
          auto& e = log(name, "reject", "m13");
          e.src = p.src;
          e.tainted = p.tainted;
          e.detail = v.reason;
          ++tr_.summary.rejects;
          if (p.tainted) ++tr_.summary.rejects_tainted;
          if (!p.tainted && vehicle != vehicles_.end() && vehicle->second.chain_head) {
            if (auto a = audits_.find(*vehicle->second.chain_head); a != audits_.end()) ++a->second.rejects;
          }
          return;
        }
        auto& e = log(name, "power", "m13");
        e.src = p.src;
        e.tainted = p.tainted;
        ++tr_.summary.accepts;
        if (p.tainted) {
          ++tr_.summary.accepts_tainted;
        } else {
          tr_.summary.cp_total += sc_.topology.rate(j);
        }
        if (auto a = audits_.find(v.chain_head); a != audits_.end()) ++a->second.accepts;
        rsus_[j]->on_pad_accept(v.chain_head);
        log(name, "pad-accept-notify").dst = rsu_name(j);
        if (!p.tainted && vehicle != vehicles_.end()) vehicle->second.ev->on_power();
        if (v.relay) send(name, cp_name(j, k + 1), MessageTag::M14, std::move(*v.relay), p.tainted);
        return;
      }
      case MessageTag::M15: {
        TerminationVerdict v = cp.cp_verify_termination(decode(MessageTag::M15, p.bytes), now_);
        auto& e = log(name, v.accepted ? "terminate" : "terminate-reject", "m15");
        e.src = p.src;
        e.tainted = p.tainted;
        e.detail = v.reason;
        if (!v.accepted) return;
        if (auto h = head_by_anchor_.find(v.anchor); h != head_by_anchor_.end()) {
          audits_[h->second].terminated = true;
        }
        send(name, rsu_name(j), MessageTag::M16, std::move(*v.m16), p.tainted);
        return;
      }
      default:
        throw Error(ErrorKind::Protocol, name + " does not handle " + std::string(tag_name(p.tag)));
    }
  }

  // ---- vehicles ---------------------------------------------------------

  void start_trip(const std::string& name, std::size_t trip) {
    VehicleNode& v = vehicles_.at(name);
    v.trip = trip;
    v.segment = 0;
    log(name, "trip-start").detail = "trip=" + std::to_string(trip);
    try {
      if (v.plan.impostor) {
        begin_auth(v, false);
      } else {
        send(name, kBank, MessageTag::M3Bank, v.ev->ticket_request(now_), false);
      }
    } catch (const Error& err) {
      error(name, Packet{name, name, "", MessageTag::M3Bank, {}, v.plan.impostor}, err);
    }
  }

  void begin_auth(VehicleNode& v, bool tainted) {
    const std::string before(to_string(v.ev->session().phase));
    WireMessage m5 = v.ev->ev_begin_auth(now_);
    auto& e = log(v.plan.name, "phase", "m5");
    e.phase_before = before;
    e.phase_after = to_string(v.ev->session().phase);
    send(v.plan.name, kCspa, MessageTag::M5, encode(m5), tainted);
  }

  void on_vehicle(VehicleNode& v, const Packet& p) {
    Vehicle& ev = *v.ev;
    const std::string& name = v.plan.name;
    const std::string before(to_string(ev.session().phase));
    auto phase_note = [&](const std::string& event) -> TranscriptEvent& {
      auto& e = log(name, event, std::string(tag_name(p.tag)));
      e.phase_before = before;
      e.phase_after = to_string(ev.session().phase);
      e.tainted = p.tainted;
      return e;
    };
    switch (p.tag) {
      case MessageTag::M4:
        ev.on_registration_reply(p.bytes, now_);
        log(name, "registered").detail = std::to_string(ev.pseudonyms().size()) + " pseudonyms";
        return;
      case MessageTag::M4Bank:
        ev.on_ticket(p.bytes, now_);
        begin_auth(v, p.tainted);
        return;
      case MessageTag::M6: {
        Bytes m7;
        try {
          m7 = ev.ev_compute_mac(decode(MessageTag::M6, p.bytes), now_);
        } catch (const Error&) {
          phase_note("phase");
          throw;
        }
        phase_note("phase");
        send(name, kCspa, MessageTag::M7, std::move(m7), p.tainted);
        return;
      }
      case MessageTag::M8: {
        Phase ph = ev.ev_verify_cspa(decode(MessageTag::M8, p.bytes), now_);
        phase_note("phase");
        if (ph != Phase::Established) {
          throw Error(ErrorKind::Auth, "mac_CSPA mismatch");
        }
        ++tr_.summary.established;
        if (p.tainted) ++tr_.summary.established_tainted;
        request_segment(v, p.tainted);
        return;
      }
      case MessageTag::M11: {
        const SegmentPlan seg = current_segment(v);
        ev.on_rsu_admit(seg.rsu, sc_.topology.cps_per_rsu, p.bytes, now_);
        v.chain_head = ev.segment()->chain.head;
        log(name, "segment-admitted", "m11").tainted = p.tainted;
        const Millis step = sc_.clock.pad_interval;
        const std::string n = name;
        const bool tainted = p.tainted;
        for (std::uint32_t k = 0; k < seg.pads; ++k) {
          at(now_ + step * (k + 1), [this, n, seg, k, tainted] { cross_pad(n, seg.rsu, k, tainted); });
        }
        at(now_ + step * (seg.pads + 1), [this, n, seg, tainted] { leave_segment(n, seg, tainted); });
        return;
      }
      case MessageTag::M19: {
        BillCheck c = ev.on_bill(p.bytes, now_);
        BillRecord b;
        b.vehicle = name;
        if (!v.pending_pids.empty()) {
          b.pid_hex = v.pending_pids.front();
          v.pending_pids.pop_front();
        }
        b.billed = c.billed;
        b.metered = c.metered;
        b.accepted = c.accepted;
        b.delta = c.delta;
        tr_.summary.bills.push_back(b);
        tr_.summary.billed_total += c.billed;
        tr_.summary.metered_total += c.metered;
        auto& e = log(name, c.accepted ? "bill-accept" : "bill-dispute", "m19");
        e.tainted = p.tainted;
        e.detail = "billed=" + std::to_string(c.billed) + " metered=" + std::to_string(c.metered) +
                   " delta=" + std::to_string(c.delta);
        if (!c.accepted) ++tr_.summary.disputes;
        return;
      }
      default:
        throw Error(ErrorKind::Protocol, name + " does not handle " + std::string(tag_name(p.tag)));
    }
  }

  const TripPlan& active_trip(const VehicleNode& v) const {
    if (v.trip >= v.plan.trips.size()) throw Error(ErrorKind::Protocol, v.plan.name + " has no trip in progress");
    return v.plan.trips[v.trip];
  }

  SegmentPlan current_segment(const VehicleNode& v) const {
    const auto& trip = active_trip(v);
    if (v.segment >= trip.segments.size()) throw Error(ErrorKind::Protocol, "no segment left in this trip");
    return trip.segments[v.segment];
  }

  void request_segment(VehicleNode& v, bool tainted) {
    const auto& trip = active_trip(v);
    if (v.segment >= trip.segments.size()) return;
    const SegmentPlan seg = trip.segments[v.segment];
    send(v.plan.name, rsu_name(seg.rsu), MessageTag::M10, v.ev->ev_request_rsu(seg.rsu, now_), tainted);
  }

  void cross_pad(const std::string& name, std::uint32_t rsu, std::uint32_t k, bool tainted) {
    VehicleNode& v = vehicles_.at(name);
    try {
      WireMessage m13 = v.ev->next_pad_value();
      send(name, cp_name(rsu, k), MessageTag::M13, encode(m13), tainted);
    } catch (const Error& err) {
      error(name, Packet{name, cp_name(rsu, k), "", MessageTag::M13, {}, tainted}, err);
    }
  }

  void leave_segment(const std::string& name, SegmentPlan seg, bool tainted) {
    VehicleNode& v = vehicles_.at(name);
    const std::uint32_t exit_pad = std::min(seg.pads, sc_.topology.cps_per_rsu - 1);
    try {
      send(name, cp_name(seg.rsu, exit_pad), MessageTag::M15, encode(v.ev->terminate()), tainted);
    } catch (const Error& err) {
      error(name, Packet{name, cp_name(seg.rsu, exit_pad), "", MessageTag::M15, {}, tainted}, err);
    }
    ++v.segment;
    v.chain_head.reset();
    const std::string n = name;
    at(now_ + sc_.clock.pad_interval, [this, n, tainted] {
      VehicleNode& node = vehicles_.at(n);
      try {
        request_segment(node, tainted);
      } catch (const Error& err) {
        error(n, Packet{n, n, "", MessageTag::M10, {}, tainted}, err);
      }
    });
  }

  Scenario sc_;
  SetupResult setup_;
  Rng root_;
  Rng adv_rng_;
  std::unique_ptr<RegistrationAuthority> ra_;
  std::unique_ptr<Bank> bank_;
  std::unique_ptr<ChargingAuthority> cspa_;
  GroupKey gk_rsu_cspa_;
  std::vector<std::unique_ptr<RoadsideUnit>> rsus_;
  std::vector<std::vector<std::unique_ptr<ChargingPad>>> cps_;
  std::map<std::string, VehicleNode> vehicles_;
  std::map<Identity, std::string> vehicle_by_id_;

  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
  Millis now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t event_seq_ = 0;
  std::map<std::size_t, std::uint32_t> match_counts_;
  std::map<Digest, ChainAudit> audits_;
  std::map<Digest, Digest> head_by_anchor_;
  Transcript tr_;
};

Simulator::Simulator(const Scenario& scenario) : world_(std::make_unique<World>(scenario)) {}
Simulator::~Simulator() = default;

Millis Simulator::now() const { return world_->now(); }
Millis Simulator::advance_clock(Millis by) { return world_->advance(by); }

Transcript Simulator::run() {
  world_->run();
  return world_->transcript();
}

Transcript Simulator::transcript() const { return world_->transcript(); }

void Simulator::replay_recorded(const Transcript& recorded) { world_->replay(recorded); }

Transcript run_scenario(const Scenario& scenario) { return Simulator(scenario).run(); }

bool scenario_held(const Scenario& scenario, const Summary& summary) {
  if (summary.adversary_succeeded()) return false;
  for (const auto& kind : scenario.expect.errors) {
    if (kind == "Reject") {
      if (summary.rejects_tainted == 0) return false;
      continue;
    }
    auto it = summary.tainted_errors.find(kind);
    if (it == summary.tainted_errors.end() || it->second == 0) return false;
  }
  const std::uint64_t want_disputes = scenario.expect.disputes.value_or(0);
  return summary.disputes == want_disputes;
}

std::uint64_t passive_replay_successes(const Scenario& honest) {
  const Transcript recorded = run_scenario(honest);
  Scenario fresh = honest;
  fresh.entity_seed = (honest.entity_seed.empty() ? honest.seed : honest.entity_seed) + "/fresh";
  fresh.adversary = {};
  for (auto& v : fresh.vehicles) v.trips.clear();
  Simulator sim(fresh);
  sim.replay_recorded(recorded);
  const Summary s = sim.run().summary;
  return s.tokens_issued + s.established + s.admissions + s.accepts + s.costs_accepted + s.settlements;
}

// ---------------------------------------------------------------------------

namespace {

Scenario attack_base(const AttackSuiteOptions& opts, const std::string& name) {
  Scenario s;
  s.name = name;
  s.seed = opts.seed + "/" + name;
  s.topology.cps_per_rsu = 5;
  s.topology.rates = {3};
  s.config.pseudonym_batch = 2;
  s.config.check_timestamps = !opts.disable_freshness;
  s.vehicles.push_back({"EV-1", false, {TripPlan{1000, {SegmentPlan{0, 5}}}}});
  s.expect.adversarial = true;
  return s;
}

AdversaryAction rule(AdversaryActionKind kind, std::string src, std::string dst, MessageTag tag) {
  AdversaryAction a;
  a.kind = kind;
  a.src = std::move(src);
  a.dst = std::move(dst);
  a.tag = tag;
  return a;
}

struct AttackInfo {
  const char* name;
  const char* defense;
  const char* expected;
};

const std::vector<AttackInfo>& attack_table() {
  static const std::vector<AttackInfo> t = {
      {"replay", "timestamp window at CSPA and RSU", "FreshnessError"},
      {"mitm", "mac_EV check at CSPA", "AuthError"},
      {"tamper", "mac_CSPA check at EV, step check at CP", "AuthError, Reject"},
      {"free_ride", "hash-chain step check at CP", "Reject"},
      {"double_spend", "token validity at RSU, active-token check at CSPA", "AdmissionError, DoubleSpendError"},
      {"spoof_registration", "mac_EV check at CSPA, duplicate check at RA", "AuthError, DuplicateError"},
  };
  return t;
}

}  // namespace

std::vector<std::string> attack_names() {
  std::vector<std::string> out;
  for (const auto& a : attack_table()) out.emplace_back(a.name);
  return out;
}

Scenario attack_scenario(const std::string& attack, const AttackSuiteOptions& opts) {
  Scenario s = attack_base(opts, attack);
  auto& acts = s.adversary.actions;
  const Millis validity = s.config.token_validity_ms;
  if (attack == "replay") {
    // Captured traffic re-sent once it has aged past the window but while the token is still valid.
    for (auto [src, dst, tag] : {std::tuple{"EV-1", "CSPA", MessageTag::M7}, std::tuple{"EV-1", "RSU-0", MessageTag::M10},
                                 std::tuple{"RSU-0", "CSPA", MessageTag::M17}}) {
      AdversaryAction a = rule(AdversaryActionKind::Replay, src, dst, tag);
      a.delay = s.config.freshness_window_ms + 1000;
      acts.push_back(a);
    }
    s.expect.errors = {"FreshnessError"};
  } else if (attack == "mitm") {
    // Nonce substitution in both directions of the handshake.
    AdversaryAction a = rule(AdversaryActionKind::Tamper, "EV-1", "CSPA", MessageTag::M5);
    a.byte_index = 0;
    a.mask = 0xff;
    acts.push_back(a);
    AdversaryAction b = rule(AdversaryActionKind::Tamper, "CSPA", "EV-1", MessageTag::M6);
    b.byte_index = 0;
    b.mask = 0xff;
    acts.push_back(b);
    s.expect.errors = {"AuthError"};
  } else if (attack == "tamper") {
    AdversaryAction a = rule(AdversaryActionKind::Tamper, "CSPA", "EV-1", MessageTag::M8);
    a.byte_index = 3;
    acts.push_back(a);
    // A second vehicle whose pad values get bit-flipped.
    s.vehicles.push_back({"EV-2", false, {TripPlan{2000, {SegmentPlan{0, 3}}}}});
    AdversaryAction b = rule(AdversaryActionKind::Tamper, "EV-2", "", MessageTag::M13);
    b.byte_index = 10;
    b.occurrence = 2;
    acts.push_back(b);
    s.expect.errors = {"AuthError", "Reject"};
  } else if (attack == "free_ride") {
    // Observed pad values re-presented at the following pad, plus blind guesses.
    for (std::uint32_t k = 0; k < 4; ++k) {
      AdversaryAction a = rule(AdversaryActionKind::Replay, "EV-1", cp_name(0, k), MessageTag::M13);
      a.to = cp_name(0, k + 1);
      a.delay = s.clock.pad_interval / 5;
      acts.push_back(a);
    }
    for (std::uint32_t k = 0; k < 5; ++k) {
      AdversaryAction g;
      g.kind = AdversaryActionKind::Inject;
      g.dst = cp_name(0, k);
      g.tag = MessageTag::M13;
      g.random_len = 33;
      g.at = 1000 + s.clock.pad_interval * (k + 1) + 5;
      acts.push_back(g);
    }
    s.expect.errors = {"Reject"};
  } else if (attack == "double_spend") {
    AdversaryAction a = rule(AdversaryActionKind::Replay, "EV-1", "RSU-0", MessageTag::M10);
    a.delay = validity + 1000;
    acts.push_back(a);
    AdversaryAction b = rule(AdversaryActionKind::Replay, "EV-1", "CSPA", MessageTag::M7);
    b.delay = 100;
    acts.push_back(b);
    s.expect.errors = {"AdmissionError", "DoubleSpendError"};
  } else if (attack == "spoof_registration") {
    s.vehicles.front().trips.clear();
    s.vehicles.push_back({"MAL-1", true, {TripPlan{1000, {SegmentPlan{0, 5}}}}});
    AdversaryAction a = rule(AdversaryActionKind::Replay, "EV-1", "RA", MessageTag::M3);
    a.delay = 100;
    acts.push_back(a);
    s.expect.errors = {"AuthError", "DuplicateError"};
  } else {
    throw Error(ErrorKind::Config, "unknown attack '" + attack + "'");
  }
  validate_scenario(s);
  return s;
}

std::vector<AttackRow> attack_suite(const AttackSuiteOptions& opts) {
  std::vector<AttackRow> rows;
  for (const auto& info : attack_table()) {
    const Scenario s = attack_scenario(info.name, opts);
    const Transcript t = run_scenario(s);
    AttackRow r;
    r.attack = info.name;
    r.defense = info.defense;
    r.expected = info.expected;
    r.summary = t.summary;
    std::string observed;
    for (const auto& [kind, n] : t.summary.tainted_errors) {
      observed += (observed.empty() ? "" : ", ") + kind + " x" + std::to_string(n);
    }
    if (t.summary.rejects_tainted > 0) {
      observed += (observed.empty() ? "" : ", ") + std::string("Reject x") + std::to_string(t.summary.rejects_tainted);
    }
    if (t.summary.adversary_succeeded()) {
      observed += (observed.empty() ? "" : "; ") + std::string("adversary gained: ") +
                  "tokens=" + std::to_string(t.summary.tokens_tainted) +
                  " admissions=" + std::to_string(t.summary.admissions_tainted) +
                  " power=" + std::to_string(t.summary.accepts_tainted) +
                  " costs=" + std::to_string(t.summary.costs_tainted) +
                  " settlements=" + std::to_string(t.summary.settlements_tainted);
    }
    r.observed = observed.empty() ? "none" : observed;
    r.held = scenario_held(s, t.summary);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace evc
