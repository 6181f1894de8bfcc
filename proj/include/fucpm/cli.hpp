#pragma once

// Command-line front end: mine, check, gen, bench.
//
// Exit codes:
//   0  success (check: miner and oracle agree)
//   1  input error (unreadable file, parse/validation failure, bad flag)
//   2  internal assertion failure (bound violation, unexpected exception)
//   3  oracle cap exceeded (check)
//   4  miner and oracle disagree (check)
//
// Run reports are single-line JSON objects; see README for the schema.

#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dataset_io.hpp"
#include "miner.hpp"
#include "oracle.hpp"

namespace fucpm::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kInternalError = 2, kOracleCap = 3, kMismatch = 4 };

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("missing " + what + ": cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << data;
  if (!out) throw InputError("write failed for '" + path + "'");
}

inline ParsedDatabase load(const std::string& db_path, const std::string& eut_path) {
  const std::string eut_text = read_file(eut_path, "external utility table");
  const std::string db_text = read_file(db_path, "database");
  ParsedDatabase parsed;
  try {
    parsed = parse_database(db_text, eut_text);
  } catch (const ParseError& e) {
    throw InputError(std::string(e.what()));
  }
  if (auto v = validate(parsed.db, parsed.eut); !v.empty()) throw InputError("invalid database: " + v.front());
  return parsed;
}

inline std::uint64_t peak_memory_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;  // ru_maxrss is KiB on Linux
}

inline nlohmann::json stats_json(const MiningStats& s) {
  nlohmann::json j{{"candidates", s.candidates},
                   {"hucsps", s.hucsps},
                   {"guip_deleted_items", s.guip_deleted_items},
                   {"guip_rounds", s.guip_rounds},
                   {"luip_pruned", s.luip_pruned}};
  j["esr"] = s.candidates > 0 ? nlohmann::json(effective_search_rate(s)) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json run_report(const std::string& command, const std::string& db_path, const std::string& eut_path,
                                 const MiningConfig& cfg, const ParsedDatabase& data, const MiningStats& stats,
                                 double elapsed_ms) {
  const Threshold t = Threshold::parse(cfg.xi, db_utility(data.db, data.eut));
  nlohmann::json config{{"xi", cfg.xi},
                        {"guip", cfg.enable_guip},
                        {"luip", cfg.enable_luip},
                        {"assert_bounds", cfg.assert_bounds}};
  config["max_len"] = cfg.max_pattern_length ? nlohmann::json(*cfg.max_pattern_length) : nlohmann::json(nullptr);
  return {{"command", command},
          {"db", db_path},
          {"eut", eut_path},
          {"config", config},
          {"sequences", data.db.sequences.size()},
          {"db_utility", t.db_utility().value()},
          {"min_utility", t.min_utility_string()},
          {"stats", stats_json(stats)},
          {"elapsed_ms", elapsed_ms},
          {"peak_memory_bytes_estimate", peak_memory_bytes()}};
}

inline std::string pattern_line(const PatternUtility& pu, const std::vector<std::string>& names) {
  std::string s = serialize_results({pu}, names);
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

/// Compares two canonical result sets; returns the symmetric difference as
/// text (empty when identical).
inline std::string result_diff(const ResultSet& miner, const ResultSet& oracle, const std::vector<std::string>& names) {
  std::map<std::vector<std::int64_t>, const PatternUtility*> a, b;
  for (const auto& pu : miner) a.emplace(pu.first.encoding(), &pu);
  for (const auto& pu : oracle) b.emplace(pu.first.encoding(), &pu);
  std::string out;
  for (const auto& [key, pu] : a) {
    auto it = b.find(key);
    if (it == b.end())
      out += "miner only:  " + pattern_line(*pu, names) + "\n";
    else if (it->second->second != pu->second)
      out += "utility differs: miner " + pattern_line(*pu, names) + " / oracle " + pattern_line(*it->second, names) + "\n";
  }
  for (const auto& [key, pu] : b)
    if (!a.contains(key)) out += "oracle only: " + pattern_line(*pu, names) + "\n";
  return out;
}

/// Runs `miner` and the oracle on the same input; exit code per the table
/// above. `miner` has the signature of fucpm::mine without the admit hook.
template <class Miner>
int check(const ParsedDatabase& data, const MiningConfig& cfg, std::uint64_t cap, std::ostream& diag, Miner&& miner) {
  ResultSet expected;
  try {
    expected = oracle_mine(data.db, data.eut, cfg.xi, cfg.max_pattern_length, cap);
  } catch (const UniverseTooLarge& e) {
    diag << "error: " << e.what() << "\n";
    return kOracleCap;
  }
  const MiningResult got = miner(data.db, data.eut, cfg);
  const std::string diff = result_diff(got.patterns, expected, data.db.names);
  if (diff.empty()) {
    diag << "ok: " << got.patterns.size() << " patterns agree with the oracle\n";
    return kOk;
  }
  diag << "mismatch between miner and oracle:\n" << diff;
  return kMismatch;
}

struct MiningFlags {
  std::string xi;
  bool no_guip = false;
  bool no_luip = false;
  std::size_t max_len = 0;
  bool assert_bounds = false;

  MiningConfig config() const {
    MiningConfig c;
    c.xi = xi;
    c.enable_guip = !no_guip;
    c.enable_luip = !no_luip;
    if (max_len > 0) c.max_pattern_length = max_len;
    c.assert_bounds = assert_bounds;
    return c;
  }
};

inline void add_mining_flags(CLI::App* cmd, MiningFlags& f) {
  cmd->add_flag("--no-guip", f.no_guip, "Disable global unpromising item deletion");
  cmd->add_flag("--no-luip", f.no_luip, "Disable local unpromising item pruning");
  cmd->add_option("--max-len", f.max_len, "Maximum pattern length in items (0 = unlimited)")->default_val(0);
  cmd->add_flag("--assert-bounds", f.assert_bounds, "Check IEU overestimate and downward closure at every node");
}

/// Entry point shared by the executable and the tests. `out` receives
/// reports and help text, `diag` receives diagnostics.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& diag) {
  CLI::App app{"High-utility contiguous sequential pattern miner", "fucpm"};
  app.require_subcommand(1);

  std::string db_path, eut_path, out_path = "hucsps.txt", report_path;
  MiningFlags flags;
  std::uint64_t oracle_cap = kDefaultOracleCap;
  std::vector<std::string> xi_list;
  GeneratorParams gen;
  std::int64_t gen_sequences = 10000;
  gen.distinct_items = 7500;
  gen.max_itemsets_per_seq = 12;
  gen.max_items_per_itemset = 8;
  gen.max_quantity = 5;
  gen.max_weight = 10;
  gen.seed = 1;
  std::string gen_db = "synthetic.txt", gen_eut = "synthetic_eut.txt";

  auto* mine_cmd = app.add_subcommand("mine", "Mine HUCSPs and write them to a results file");
  auto* check_cmd = app.add_subcommand("check", "Compare the miner against the brute-force oracle");
  auto* bench_cmd = app.add_subcommand("bench", "Mine at several thresholds and emit one report per threshold");
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic database and utility table");

  for (auto* cmd : {mine_cmd, check_cmd, bench_cmd}) {
    cmd->add_option("db", db_path, "Database file")->required();
    cmd->add_option("eut", eut_path, "External utility table file")->required();
    add_mining_flags(cmd, flags);
  }
  for (auto* cmd : {mine_cmd, check_cmd}) cmd->add_option("--xi", flags.xi, "Minimum utility ratio in [0,1], e.g. 0.25")->required();
  mine_cmd->add_option("--out", out_path, "Results file")->default_val("hucsps.txt");
  for (auto* cmd : {mine_cmd, bench_cmd}) cmd->add_option("--report", report_path, "Write run reports here instead of stdout");
  check_cmd->add_option("--oracle-cap", oracle_cap, "Refuse oracle runs enumerating more instances than this")
      ->default_val(kDefaultOracleCap);
  bench_cmd->add_option("--xi", xi_list, "Thresholds, comma separated or repeated")->delimiter(',');

  gen_cmd->add_option("--sequences", gen_sequences, "Number of sequences")->default_val(10000);
  gen_cmd->add_option("--items", gen.distinct_items, "Number of distinct items")->default_val(7500);
  gen_cmd->add_option("--max-itemsets", gen.max_itemsets_per_seq, "Maximum itemsets per sequence")->default_val(12);
  gen_cmd->add_option("--max-items-per-itemset", gen.max_items_per_itemset, "Maximum items per itemset")->default_val(8);
  gen_cmd->add_option("--max-quantity", gen.max_quantity, "Maximum internal utility")->default_val(5);
  gen_cmd->add_option("--max-weight", gen.max_weight, "Maximum external utility")->default_val(10);
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->default_val(1);
  gen_cmd->add_option("--out-db", gen_db, "Database output path")->default_val("synthetic.txt");
  gen_cmd->add_option("--out-eut", gen_eut, "Utility table output path")->default_val("synthetic_eut.txt");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    diag << "error: " << e.what() << "\n";
    return kInputError;
  }

  auto emit_report = [&](const nlohmann::json& j, bool append) {
    const std::string line = j.dump() + "\n";
    if (report_path.empty()) {
      out << line;
      return;
    }
    std::ofstream f(report_path, append ? std::ios::app : std::ios::trunc);
    if (!f) throw InputError("cannot write '" + report_path + "'");
    f << line;
  };

  try {
    if (*gen_cmd) {
      if (gen_sequences < 1) throw InputError("sequence_count must be >= 1");
      gen.sequence_count = static_cast<std::uint64_t>(gen_sequences);
      ParsedDatabase data;
      try {
        data = generate_synthetic(gen);
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
      write_file(gen_db, serialize_database(data.db));
      write_file(gen_eut, serialize_utility_table(data.db, data.eut));
      diag << "wrote " << data.db.sequences.size() << " sequences to " << gen_db << "\n";
      return kOk;
    }

    const ParsedDatabase data = load(db_path, eut_path);
    const MiningConfig base = flags.config();

    if (*check_cmd) {
      (void)Threshold::parse(base.xi, Utility{});
      return check(data, base, oracle_cap, diag,
                   [](const auto& db, const auto& eut, const auto& cfg) { return mine(db, eut, cfg); });
    }

    if (*mine_cmd) {
      const auto start = std::chrono::steady_clock::now();
      const MiningResult r = mine(data.db, data.eut, base);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      write_file(out_path, serialize_results(r.patterns, data.db.names));
      emit_report(run_report("mine", db_path, eut_path, base, data, r.stats, ms), false);
      diag << r.patterns.size() << " HUCSPs written to " << out_path << "\n";
      return kOk;
    }

    if (*bench_cmd) {
      if (xi_list.empty()) throw InputError("bench needs at least one --xi value");
      for (const auto& xi : xi_list) (void)Threshold::parse(xi, Utility{});
      bool first = true;
      for (const auto& xi : xi_list) {
        MiningConfig cfg = base;
        cfg.xi = xi;
        const auto start = std::chrono::steady_clock::now();
        const MiningResult r = mine(data.db, data.eut, cfg);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        emit_report(run_report("bench", db_path, eut_path, cfg, data, r.stats, ms), !first);
        first = false;
      }
      return kOk;
    }
  } catch (const InputError& e) {
    diag << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ThresholdError& e) {
    diag << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const UtilityOverflow& e) {
    diag << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const BoundViolation& e) {
    diag << "assertion failed: " << e.what() << "\n";
    return kInternalError;
  } catch (const std::exception& e) {
    diag << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInputError;
}

}  // namespace fucpm::cli
