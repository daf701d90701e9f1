#include "evc/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "evc/bench.hpp"
#include "evc/errors.hpp"
#include "evc/simnet.hpp"
#include "evc/wire.hpp"

namespace evc {

namespace {

enum class LogLevel { Quiet, Info, Debug };

// EVC_LOG=quiet|info|debug (default info).
LogLevel log_level() {
  const char* v = std::getenv("EVC_LOG");
  if (v == nullptr) return LogLevel::Info;
  std::string s(v);
  if (s == "quiet" || s == "0" || s == "error") return LogLevel::Quiet;
  if (s == "debug" || s == "2") return LogLevel::Debug;
  return LogLevel::Info;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  f << content;
  return true;
}

TableFormat parse_format(const std::string& s) { return s == "csv" ? TableFormat::Csv : TableFormat::Markdown; }


}  // namespace

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                         TableFormat format) {
  std::string out;
  if (format == TableFormat::Csv) {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_escape(cells[i]);
      out += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
  auto line = [&](const std::vector<std::string>& cells) {
    out += "|";
    for (const auto& c : cells) out += " " + c + " |";
    out += "\n";
  };
  line(header);
  out += "|";
  for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& r : rows) line(r);
  return out;
}

std::string sizes_table(TableFormat format) {
  std::vector<std::vector<std::string>> rows;
  bool footnote = false;
  for (const auto& ref : reference_sizes()) {
    const auto computed = encoded_length(ref.tag);
    const std::size_t bytes = computed.value_or(0);
    std::string note;
    if (bytes != ref.printed_bytes) {
      note = "printed " + std::to_string(ref.printed_bytes) + " B; field widths sum to " + std::to_string(bytes) + " [1]";
      footnote = true;
    }
    rows.push_back({std::string(tag_name(ref.tag)), ref.formula, std::to_string(bytes), note});
  }
  std::string out = render_table({"message", "fields", "bytes", "note"}, rows, format);
  if (footnote && format == TableFormat::Markdown) {
    out += "\n[1] m7 = ID_RA (32) + pid (32) + ticket (64) + mac_EV (32) + t7 (8) = 168 B. "
           "The reference table prints 170 for the same field list.\n";
  }
  return out;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"EV dynamic-charging authentication and billing simulator", "evcharge"};
  app.require_subcommand(1);

  std::string format = "markdown";
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Table format")->check(CLI::IsMember({"markdown", "csv"}));
  };

  auto* sim = app.add_subcommand("simulate", "Run a scenario file");
  std::string config_path, transcript_path, hexdump_path, ledger_path, audit_path;
  sim->add_option("config", config_path, "Scenario JSON")->required();
  sim->add_option("--transcript", transcript_path, "Write the JSON-lines transcript here");
  sim->add_option("--hexdump", hexdump_path, "Write a hexdump of wire traffic here");
  sim->add_option("--ledger", ledger_path, "Write the CSPA ledger CSV here");
  sim->add_option("--audit", audit_path, "Write per-session chain audits (JSON lines) here");
  add_format(sim);

  auto* bench = app.add_subcommand("bench", "Time the cryptographic primitives");
  std::size_t iterations = kDefaultBenchIterations;
  bench->add_option("--iterations,-n", iterations, "Iterations per primitive")->check(CLI::PositiveNumber);
  add_format(bench);

  auto* sizes = app.add_subcommand("sizes", "Print encoded message sizes for m5-m16");
  add_format(sizes);

  auto* suite = app.add_subcommand("attack-suite", "Run every attack scenario and report the defenses");
  AttackSuiteOptions opts;
  suite->add_option("--seed", opts.seed, "Scenario seed");
  suite->add_flag("--disable-freshness", opts.disable_freshness, "Test hook: turn off timestamp checks");
  add_format(suite);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  const TableFormat tf = parse_format(format);
  const LogLevel level = log_level();

  if (*sizes) {
    out << sizes_table(tf);
    return kExitOk;
  }

  if (*bench) {
    BenchReport r = bench_primitives(iterations);
    out << (tf == TableFormat::Csv ? r.to_csv() : r.to_markdown());
    return kExitOk;
  }

  if (*suite) {
    std::vector<std::vector<std::string>> rows;
    bool all = true;
    for (const auto& r : attack_suite(opts)) {
      rows.push_back({r.attack, r.defense, r.expected, r.observed, r.held ? "held" : "FAILED"});
      all = all && r.held;
    }
    out << render_table({"attack", "defense", "expected", "observed", "verdict"}, rows, tf);
    if (level != LogLevel::Quiet) err << (all ? "attack suite: all defenses held\n" : "attack suite: FAILED\n");
    return all ? kExitOk : kExitDefenseFailed;
  }

  // simulate
  Scenario scenario;
  try {
    scenario = load_scenario(config_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const Transcript t = run_scenario(scenario);
  if (level == LogLevel::Debug) err << t.to_jsonl();
  if (!transcript_path.empty() && !write_file(transcript_path, t.to_jsonl(), err)) return kExitUsage;
  if (!hexdump_path.empty() && !write_file(hexdump_path, t.hexdump(), err)) return kExitUsage;
  if (!ledger_path.empty() && !write_file(ledger_path, t.ledger_csv, err)) return kExitUsage;
  if (!audit_path.empty()) {
    std::string lines;
    for (const auto& a : t.audits) lines += a.to_json() + "\n";
    if (!write_file(audit_path, lines, err)) return kExitUsage;
  }

  const Summary& s = t.summary;
  std::vector<std::vector<std::string>> rows = {
      {"tokens issued", std::to_string(s.tokens_issued), std::to_string(s.tokens_tainted)},
      {"sessions established", std::to_string(s.established), std::to_string(s.established_tainted)},
      {"RSU admissions", std::to_string(s.admissions), std::to_string(s.admissions_tainted)},
      {"pad accepts", std::to_string(s.accepts), std::to_string(s.accepts_tainted)},
      {"pad rejects", std::to_string(s.rejects), std::to_string(s.rejects_tainted)},
      {"cost reports", std::to_string(s.costs_accepted), std::to_string(s.costs_tainted)},
      {"settlements", std::to_string(s.settlements), std::to_string(s.settlements_tainted)},
      {"billed total", std::to_string(s.billed_total), ""},
      {"OBU metered total", std::to_string(s.metered_total), ""},
      {"CP accept total", std::to_string(s.cp_total), ""},
      {"disputes", std::to_string(s.disputes), ""},
  };
  for (const auto& [kind, n] : s.errors) {
    auto tn = s.tainted_errors.find(kind);
    rows.push_back({kind, std::to_string(n), std::to_string(tn == s.tainted_errors.end() ? 0 : tn->second)});
  }
  out << render_table({"metric", "count", "adversary"}, rows, tf);

  bool ok = scenario_held(scenario, s);
  if (!scenario.expect.adversarial && !s.errors.empty()) ok = false;
  if (level != LogLevel::Quiet) {
    err << scenario.name << ": " << (ok ? "ok" : (scenario.expect.adversarial ? "defense FAILED" : "unexpected errors"))
        << "\n";
  }
  return ok ? kExitOk : kExitDefenseFailed;
}

}  // namespace evc
