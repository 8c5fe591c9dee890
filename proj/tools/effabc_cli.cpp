// effabc: command-line front end. JSON goes to stdout, progress to stderr.
// Exit codes: 0 verified, 2 counterexample or violation, 1 error or indecisive.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "effabc/abc_verifier.hpp"
#include "effabc/analytic_bounds.hpp"
#include "effabc/certificate.hpp"
#include "effabc/enclosure.hpp"
#include "effabc/fermat_bounds.hpp"
#include "effabc/local_volume.hpp"
#include "effabc/power_search.hpp"
#include "effabc/prime_tables.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace effabc;

namespace {

constexpr int kVerified = 0;
constexpr int kError = 1;
constexpr int kViolation = 2;

struct RunConfig {
  std::string command;
  std::string precision = "standard";
  int threads = 0;
  std::string cache;
  std::string out;
  bool resume = false;
};

void progress(const std::string& msg) { std::cerr << "[effabc] " << msg << std::endl; }

void emit(const json& j) { std::cout << j.dump() << std::endl; }

void write_out(const RunConfig& cfg, const json& j) {
  if (cfg.out.empty()) return;
  std::ofstream f(cfg.out);
  if (!f) throw std::runtime_error("cannot write " + cfg.out);
  f << j.dump(2) << '\n';
}

int verdict(bool passed) { return passed ? kVerified : kViolation; }

fs::path cache_dir(const RunConfig& cfg) {
  if (!cfg.cache.empty()) return cfg.cache;
  if (const char* env = std::getenv("EFFABC_CACHE_DIR")) return env;
  return {};
}

PrimeTables tables_for(const RunConfig& cfg, std::uint64_t limit) {
  limit = std::max<std::uint64_t>(limit, 1u << 16);
  fs::path dir = cache_dir(cfg);
  progress("prime tables to " + std::to_string(limit) + (dir.empty() ? "" : " (cache " + dir.string() + ")"));
  if (dir.empty()) return PrimeTables::build(limit);
  return PrimeTables::cached(dir, limit);
}

// "e31" means exp(31); anything else is a plain number
Enclosure parse_real(const std::string& s) {
  if (!s.empty() && (s[0] == 'e' || s[0] == 'E')) return exp(Enclosure::decimal(s.substr(1)));
  return Enclosure::decimal(s);
}

DatasetKind dataset_of(const std::string& s) {
  if (s == "R") return DatasetKind::R;
  if (s == "Rprime") return DatasetKind::Rprime;
  throw std::invalid_argument("unknown dataset " + s);
}

// ---- subcommands ----

int cmd_sieve(const RunConfig& cfg, std::uint64_t limit) {
  PrimeTables t = PrimeTables::build(limit);
  if (!cfg.out.empty()) t.save(cfg.out);
  PrimeSums s = t.sums_at(limit);
  json j = {{"schema", kSchemaVersion},
            {"kind", "prime_tables"},
            {"limit", t.limit()},
            {"stride", t.stride()},
            {"pi", s.pi},
            {"theta", enclosure_json(s.theta.enclosure())},
            {"sum_plogp", enclosure_json(s.plogp.enclosure())},
            {"sum_logp_over_pm1", enclosure_json(s.logp_pm1.enclosure())}};
  if (!cfg.out.empty()) j["file"] = cfg.out;
  emit(j);
  return kVerified;
}

int cmd_vol(const RunConfig& cfg, std::uint64_t l, const std::string& variant, const std::string& method) {
  if (!is_prime_u64(l) || l < 11) throw std::invalid_argument("l must be a prime >= 11");
  RamificationDataset d = variant == "rlprime" ? make_Rl_prime(l) : make_Rl(l);
  if (variant != "rl" && variant != "rlprime") throw std::invalid_argument("variant must be rl or rlprime");
  VolMethod m = parse_vol_method(method);
  std::optional<PrimeTables> tables;
  if (m == VolMethod::closed_form || m == VolMethod::f2_bound) tables = tables_for(cfg, 9 * l + 64);
  VolResult r = vol(d, m, tables ? &*tables : nullptr);
  json j = r;
  j["schema"] = kSchemaVersion;
  j["kind"] = "vol";
  j["l"] = l;
  j["exceeds_log_pi"] = certainly_gt(r.value, log(pi_enclosure()));
  write_out(cfg, j);
  emit(j);
  return kVerified;
}

int cmd_sweep_f1(const RunConfig& cfg, std::uint64_t from, std::uint64_t to) {
  PrimeTables t = tables_for(cfg, to);
  progress("f1 sweep over [" + std::to_string(from) + ", " + std::to_string(to) + "]");
  SweepCertificate c = sweep_f1(from, to, t);
  json j = c;
  write_out(cfg, j);
  emit(j);
  return verdict(c.passed);
}

int cmd_f3f4(const RunConfig& cfg, const std::string& xs) {
  Enclosure x = parse_real(xs);
  PrimeTables t = tables_for(cfg, f3_f4_required_limit(x));
  SweepCertificate c = f3_f4_check(x, t);
  json j = c;
  write_out(cfg, j);
  emit(j);
  return verdict(c.passed);
}

int cmd_sweep_abc(const RunConfig& cfg, double h_min, const std::string& h_max_s, double step) {
  SweepOptions opt;
  opt.h_lo = h_min;
  opt.h_hi = h_max_s == "e31" ? 0 : parse_real(h_max_s).lo();
  opt.step_ratio = step;
  opt.out = cfg.out;
  opt.resume = cfg.resume;
  opt.progress = progress;
  const double h_hi = opt.h_hi == 0 ? e31() : opt.h_hi;
  const std::uint64_t l_max = sweep_l_max(h_hi);
  PrimeTables t = tables_for(cfg, 3 * l_max + 1);
  progress("Vol table to l = " + std::to_string(l_max));
  VolTable vt = VolTable::build(l_max, DatasetKind::R, t);
  auto certs = sweep_abc(opt, vt);
  RecheckResult cov = check_coverage(certs, h_min, h_hi);
  json worst;
  double worst_hi = -std::numeric_limits<double>::infinity();
  for (const auto& c : certs)
    for (const auto& m : {c.margin_lo, c.margin_hi})
      if (m.hi() > worst_hi) {
        worst_hi = m.hi();
        worst = {{"margin", enclosure_json(m)}, {"h_range", {c.h_lo, c.h_hi}}};
      }
  json j = {{"schema", kSchemaVersion},
            {"kind", "abc_sweep_summary"},
            {"h_range", {h_min, h_hi}},
            {"step_ratio", step},
            {"certificates", certs.size()},
            {"vol_policy", vt.policy()},
            {"worst", worst},
            {"covered", cov.ok},
            {"passed", cov.ok}};
  if (!cov.ok) j["reason"] = cov.reason;
  if (!cfg.out.empty()) j["file"] = cfg.out;
  emit(j);
  return verdict(cov.ok);
}

int cmd_cor33(const RunConfig& cfg) {
  SweepCertificate c = height_constant_check();
  json j = c;
  write_out(cfg, j);
  emit(j);
  return verdict(c.passed);
}

int cmd_table1(const RunConfig& cfg, const std::vector<std::string>& rows) {
  PrimeTables t = tables_for(cfg, 3 * table1_l_max() + 1);
  auto result = table1(t, rows);
  bool all = true;
  json jr = json::array();
  std::ofstream f;
  if (!cfg.out.empty()) {
    f.open(cfg.out);
    if (!f) throw std::runtime_error("cannot write " + cfg.out);
  }
  for (const auto& r : result) {
    all = all && r.passed;
    jr.push_back(r);
    for (const auto& c : r.chain)
      if (f) f << json(c).dump() << '\n';
  }
  json j = {{"schema", kSchemaVersion}, {"kind", "table1"}, {"rows", jr}, {"passed", all}};
  j["height_cap"] = height_cap_certificate();
  all = all && j["height_cap"]["passed"].get<bool>();
  j["passed"] = all;
  if (!cfg.out.empty()) j["file"] = cfg.out;
  emit(j);
  return verdict(all);
}

int cmd_flt(const RunConfig& cfg, std::uint64_t p, const std::string& bound) {
  SweepCertificate c = flt_contradiction(p, Enclosure::decimal(bound));
  json j = c;
  write_out(cfg, j);
  emit(j);
  return verdict(c.passed);
}

int cmd_search(const RunConfig& cfg, double h_max, unsigned k_min, bool all) {
  progress("search h < " + std::to_string(h_max) + ", exponents >= " + std::to_string(k_min));
  SearchReport r = search(h_max, k_min, !all);
  json j = r;
  write_out(cfg, j);
  emit(j);
  if (!r.exhaustive) return kError;
  return r.solutions.empty() && r.boundary.empty() && r.one_base.empty() ? kVerified : kViolation;
}

int cmd_catalog(const RunConfig& cfg) {
  SweepCertificate c = verify_catalog();
  json j = c;
  write_out(cfg, j);
  emit(j);
  return verdict(c.passed);
}

// ---- recheck ----

std::vector<json> read_json_documents(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::vector<json> docs;
  try {
    json j = json::parse(text);
    docs.push_back(std::move(j));
    return docs;
  } catch (const json::parse_error&) {
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) docs.push_back(json::parse(line));
  return docs;
}

struct RecheckTally {
  json items = json::array();
  bool reproduced = true;  // every recorded verdict came out the same
  bool all_pass = true;    // and every one was a pass

  void add(const std::string& what, bool recorded, bool again, const std::string& reason = "") {
    json e = {{"item", what}, {"recorded", recorded}, {"recomputed", again}};
    if (!reason.empty()) e["reason"] = reason;
    items.push_back(e);
    reproduced = reproduced && recorded == again;
    all_pass = all_pass && again;
  }
};

void recheck_exclusions(const RunConfig& cfg, const std::vector<ExclusionCertificate>& certs, RecheckTally& tally) {
  // group by dataset, one Vol table per dataset sized to the widest window
  std::map<std::string, std::uint64_t> reach;
  for (const auto& c : certs) {
    reach[c.dataset] = std::max(reach[c.dataset], c.S.window_hi);
  }
  std::uint64_t l_all = 0;
  for (auto& [d, l] : reach) {
    l = std::max(l, std::uint64_t{11});
    l_all = std::max(l_all, l);
  }
  PrimeTables t = tables_for(cfg, 3 * l_all + 1);
  std::map<std::string, VolTable> tables;
  for (const auto& [d, l] : reach) tables.emplace(d, VolTable::build(l, dataset_of(d), t));

  std::vector<ExclusionCertificate> sweep;
  std::map<std::string, std::vector<ExclusionCertificate>> chains;
  for (const auto& c : certs) {
    const VolTable& vt = tables.at(c.dataset);
    RecheckResult r = c.check_kind == CheckKind::abc_sweep ? recheck(c, vt) : recheck_fermat(c, vt);
    std::string what = c.check_kind == CheckKind::abc_sweep
                           ? "abc_sweep [" + std::to_string(c.h_lo) + ", " + std::to_string(c.h_hi) + "]"
                           : "fermat " + c.signature_class + " k(S)=" + c.k_s;
    tally.add(what, true, r.ok, r.reason);
    if (c.check_kind == CheckKind::abc_sweep)
      sweep.push_back(c);
    else
      chains[c.signature_class].push_back(c);
  }
  if (!sweep.empty()) {
    double lo = sweep.front().h_lo, hi = sweep.front().h_hi;
    for (const auto& c : sweep) {
      lo = std::min(lo, c.h_lo);
      hi = std::max(hi, c.h_hi);
    }
    RecheckResult r = check_coverage(sweep, lo, hi);
    tally.add("abc_sweep coverage [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", true, r.ok, r.reason);
  }
  for (const auto& [cls, chain] : chains) {
    double bound = chain.front().L.hi();
    for (const auto& c : chain) bound = std::min(bound, c.L.hi());
    RecheckResult r = check_chain(chain, bound, kHeightCap);
    tally.add("fermat " + cls + " chain to 1e6", true, r.ok, r.reason);
  }
}

void recheck_sweep_certificate(const RunConfig& cfg, const SweepCertificate& c, RecheckTally& tally) {
  SweepCertificate again;
  if (c.kind == "f1_sweep") {
    PrimeTables t = tables_for(cfg, c.tables_limit);
    again = sweep_f1(static_cast<std::uint64_t>(c.range_lo), static_cast<std::uint64_t>(c.range_hi), t);
  } else if (c.kind == "f3_f4") {
    Enclosure x = enclosure_from_json(c.details.at("x"));
    PrimeTables t = tables_for(cfg, c.tables_limit);
    again = f3_f4_check(x, t);
  } else if (c.kind == "lemma_aux") {
    PrimeTables t = tables_for(cfg, c.tables_limit);
    again = auxiliary_certificate(t);
  } else if (c.kind == "height_constants") {
    again = height_constant_check();
  } else if (c.kind == "height_cap") {
    again = height_cap_certificate();
  } else if (c.kind == "flt_contradiction") {
    again = flt_contradiction(c.details.at("p").get<std::uint64_t>(), enclosure_from_json(c.details.at("bound")));
  } else if (c.kind == "cor48_33n") {
    again = cor48_33n_check(enclosure_from_json(c.details.at("bound")));
  } else if (c.kind == "catalog") {
    again = verify_catalog();
  } else {
    throw std::invalid_argument("no recheck for certificate kind " + c.kind);
  }
  tally.add(c.kind, c.passed, again.passed);
}

void recheck_search(const json& j, RecheckTally& tally) {
  // solutions are re-verified from scratch and the caps are re-derived; the scan itself is not repeated
  bool ok = true;
  for (const char* key : {"solutions", "boundary", "one_base"})
    for (const auto& s : j.at(key)) {
      SolutionRecord r;
      r.x = mpz_class(s.at("x").get<std::string>());
      r.y = mpz_class(s.at("y").get<std::string>());
      r.z = mpz_class(s.at("z").get<std::string>());
      r.r = s.at("r").get<unsigned>();
      r.s = s.at("s").get<unsigned>();
      r.t = s.at("t").get<unsigned>();
      r.primitive = s.at("primitive").get<bool>();
      ok = ok && verify_solution(r);
    }
  SearchCaps caps = search_caps(j.at("h_max").get<double>(), j.at("k_min").get<unsigned>());
  ok = ok && std::abs(caps.log2_zt_max - j.at("caps").at("log2_zt_max").get<double>()) < 1e-9;
  bool empty = j.at("solutions").empty() && j.at("boundary").empty() && j.at("one_base").empty();
  bool recorded = j.at("exhaustive").get<bool>() && empty;
  tally.add("power_search", recorded, ok && recorded);
}

int cmd_recheck(const RunConfig& cfg, const std::string& file) {
  auto docs = read_json_documents(file);
  RecheckTally tally;
  std::vector<ExclusionCertificate> exclusions;
  for (const auto& d : docs) {
    if (d.value("schema", "") != kSchemaVersion) throw std::invalid_argument("missing or unknown schema version");
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "exclusion") {
      exclusions.push_back(d.get<ExclusionCertificate>());
    } else if (kind == "power_search") {
      recheck_search(d, tally);
    } else if (kind == "table1" || kind == "abc_sweep_summary" || kind == "vol" || kind == "prime_tables") {
      throw std::invalid_argument("summary documents carry no certificate; recheck the file written with --out");
    } else {
      recheck_sweep_certificate(cfg, d.get<SweepCertificate>(), tally);
    }
  }
  if (!exclusions.empty()) recheck_exclusions(cfg, exclusions, tally);
  json j = {{"schema", kSchemaVersion},
            {"kind", "recheck"},
            {"file", file},
            {"items", tally.items},
            {"reproduced", tally.reproduced},
            {"passed", tally.reproduced && tally.all_pass}};
  emit(j);
  if (!tally.reproduced) return kError;
  return verdict(tally.all_pass);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified computations for explicit abc and generalized Fermat bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--threads", cfg.threads, "worker count (default: all cores)")->check(CLI::PositiveNumber);
  app.add_option("--precision", cfg.precision, "standard or extended")
      ->check(CLI::IsMember({"standard", "extended"}));
  app.add_option("--cache", cfg.cache, "prime table cache directory (overrides EFFABC_CACHE_DIR)");
  app.add_option("--out", cfg.out, "output file");

  std::uint64_t limit = 0;
  auto* sieve = app.add_subcommand("sieve", "build cumulative prime tables");
  sieve->add_option("--limit", limit)->required();
  sieve->add_option("--out", cfg.out);

  std::uint64_t l = 0;
  std::string variant = "rl", method = "exact";
  auto* volc = app.add_subcommand("vol", "Vol(R_l) or Vol(R'_l)");
  volc->add_option("--l", l)->required();
  volc->add_option("--variant", variant)->check(CLI::IsMember({"rl", "rlprime"}));
  volc->add_option("--method", method)->check(CLI::IsMember({"exact", "relaxed", "closed", "f2"}));

  std::uint64_t from = 0, to = 0;
  auto* f1c = app.add_subcommand("sweep-f1", "f1(n) < n/2 + 0.01865 n/log n on an integer range");
  f1c->add_option("--from", from)->required();
  f1c->add_option("--to", to)->required();

  std::string xs;
  auto* f34 = app.add_subcommand("check-f3f4", "the f3 and f4 inequalities at one x (e.g. --x e33)");
  f34->add_option("--x", xs)->required();

  double h_min = 680, step = 1.1;
  std::string h_max_s = "e31";
  auto* abc = app.add_subcommand("sweep-abc", "cover an h-range with exclusion certificates");
  abc->add_option("--h-min", h_min);
  abc->add_option("--h-max", h_max_s);
  abc->add_option("--step", step)->check(CLI::Range(1.0001, 10.0));
  abc->add_flag("--resume", cfg.resume);

  auto* cor = app.add_subcommand("check-cor33", "f(10) and the u0/eps identity");

  std::vector<std::string> rows;
  auto* t1 = app.add_subcommand("table1", "optimize and certify the Fermat height bounds");
  t1->add_option("--rows", rows, "class labels, e.g. 'min>=8' '(3,3)'");

  std::uint64_t p = 11;
  std::string bound = "600";
  auto* flt = app.add_subcommand("flt", "exclude x^p + y^p = z^p below the height bound");
  flt->add_option("--p", p)->required();
  flt->add_option("--bound", bound);

  double h_max = 0;
  unsigned k_min = 2;
  bool all_solutions = false;
  auto* srch = app.add_subcommand("search", "exhaustive x^r + y^s = z^t search");
  srch->add_option("--h-max", h_max)->required()->check(CLI::Range(0.0, kSearchHardCap));
  srch->add_option("--min-exp", k_min)->required()->check(CLI::Range(2u, 1000u));
  srch->add_option("--threads", cfg.threads)->check(CLI::PositiveNumber);
  srch->add_flag("--all", all_solutions, "include non-primitive solutions");

  auto* cat = app.add_subcommand("verify-catalog", "the known solutions in exact arithmetic");

  std::string cert_file;
  auto* rc = app.add_subcommand("recheck", "re-derive the verdicts recorded in a certificate file");
  rc->add_option("--cert", cert_file)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit({{"error", e.what()}, {"type", "usage"}});
    return kError;
  }

  try {
    set_precision_tier(parse_precision_tier(cfg.precision));
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    if (*sieve) return cmd_sieve(cfg, limit);
    if (*volc) return cmd_vol(cfg, l, variant, method);
    if (*f1c) return cmd_sweep_f1(cfg, from, to);
    if (*f34) return cmd_f3f4(cfg, xs);
    if (*abc) return cmd_sweep_abc(cfg, h_min, h_max_s, step);
    if (*cor) return cmd_cor33(cfg);
    if (*t1) return cmd_table1(cfg, rows);
    if (*flt) return cmd_flt(cfg, p, bound);
    if (*srch) return cmd_search(cfg, h_max, k_min, all_solutions);
    if (*cat) return cmd_catalog(cfg);
    if (*rc) return cmd_recheck(cfg, cert_file);
  } catch (const IndecisiveError& e) {
    emit({{"error", e.what()},
          {"type", "indecisive"},
          {"at", e.at()},
          {"lhs", enclosure_json(e.lhs())},
          {"rhs", enclosure_json(e.rhs())}});
    return kError;
  } catch (const IndexCapacityError& e) {
    emit({{"error", e.what()}, {"type", "capacity"}, {"estimate", e.estimate()}});
    return kError;
  } catch (const std::exception& e) {
    emit({{"error", e.what()}, {"type", "error"}});
    return kError;
  }
  return kError;
}
