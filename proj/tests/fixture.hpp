#pragma once

// Entities wired together by direct calls, for protocol-level tests.

#include <functional>
#include <memory>
#include <optional>

#include "evc/bank.hpp"
#include "evc/cspa.hpp"
#include "evc/errors.hpp"
#include "evc/hash.hpp"
#include "evc/ra.hpp"
#include "evc/rsu.hpp"
#include "evc/vehicle.hpp"

namespace evc::testing {

using Mutator = std::function<void(Bytes&)>;

struct HandshakeHooks {
  Mutator m5, m6, m7, m8;
};

struct HandshakeResult {
  bool threw = false;
  ErrorKind error = ErrorKind::Protocol;
  std::optional<TokenIssue> issue;
  Phase ev_phase = Phase::Idle;
  Phase cspa_phase = Phase::Idle;
};

struct Fixture {
  SetupResult su;
  ProtocolConfig cfg;
  Millis now = 1'000'000;
  Rng root;
  std::unique_ptr<RegistrationAuthority> ra;
  std::unique_ptr<Bank> bank;
  GroupKey gk_rsu_cspa;
  std::unique_ptr<ChargingAuthority> cspa;
  std::unique_ptr<Vehicle> ev;

  explicit Fixture(std::size_t batch = 4, const std::string& seed = "fixture") : su(setup(as_bytes(seed))), root(Rng::from_string(seed)) {
    cfg.pseudonym_batch = batch;
    ra = std::make_unique<RegistrationAuthority>(su.params, su.master_secret, cfg, root.derive("RA"));
    bank = std::make_unique<Bank>(su.params, &ra->registry(), cfg, root.derive("BANK"));
    Rng keys = root.derive("keys");
    gk_rsu_cspa = GroupKey::random(kRsuCspaKeyId, keys);
    cspa = make_cspa("CSPA");
    cspa->on_registration_reply(
        ra->handle_registration(MessageTag::M1, cspa->registration_request(now), cspa->public_key(), now), now);
    ev = make_vehicle("EV-1");
  }

  std::unique_ptr<ChargingAuthority> make_cspa(const std::string& name, std::map<std::uint32_t, std::uint8_t> rates = {{0, 3}}) {
    return std::make_unique<ChargingAuthority>(su.params, make_identity(name), cfg, root.derive("cspa/" + name),
                                               gk_rsu_cspa, ra->public_key(), bank->public_key(), std::move(rates));
  }

  /// A second CSPA instance holding the same IBE key, with no session history.
  std::unique_ptr<ChargingAuthority> clone_cspa(const std::string& label) {
    auto c = std::make_unique<ChargingAuthority>(su.params, cspa->id(), cfg, root.derive("clone/" + label), gk_rsu_cspa,
                                                 ra->public_key(), bank->public_key(),
                                                 std::map<std::uint32_t, std::uint8_t>{{0, 3}});
    c->install_key(cspa->private_key());
    return c;
  }

  std::unique_ptr<Vehicle> make_vehicle(const std::string& name) {
    auto v = std::make_unique<Vehicle>(su.params, make_identity(name), cfg, root.derive("ev/" + name),
                                       ra->public_key(), bank->public_key());
    v->on_registration_reply(ra->handle_registration(MessageTag::M3, v->registration_request(now), v->public_key(), now),
                             now);
    bank->open_account(v->id(), v->public_key());
    return v;
  }

  void get_ticket(Vehicle& v) { v.on_ticket(bank->handle_ticket_request(v.ticket_request(now), now), now); }

  HandshakeResult handshake(ChargingAuthority& c, Vehicle& v, const HandshakeHooks& hooks = {}, bool reuse = false) {
    HandshakeResult r;
    const std::string peer = "peer";
    auto mutate = [](const Mutator& m, Bytes b) {
      if (m) m(b);
      return b;
    };
    try {
      Bytes m5 = mutate(hooks.m5, encode(v.ev_begin_auth(now, reuse)));
      Bytes m6 = mutate(hooks.m6, encode(c.cspa_respond(peer, decode(MessageTag::M5, m5), now)));
      Bytes m7 = mutate(hooks.m7, v.ev_compute_mac(decode(MessageTag::M6, m6), now));
      TokenIssue issue = c.cspa_verify_and_issue_token(peer, m7, now);
      r.issue = issue;
      Bytes m8 = mutate(hooks.m8, encode(issue.m8));
      v.ev_verify_cspa(decode(MessageTag::M8, m8), now);
    } catch (const Error& e) {
      r.threw = true;
      r.error = e.kind();
    }
    r.ev_phase = v.session().phase;
    if (const SessionState* s = c.session(peer)) r.cspa_phase = s->phase;
    return r;
  }
};

}  // namespace evc::testing
