#include "effabc/certificate.hpp"

#include <cmath>
#include <limits>

namespace effabc {

nlohmann::json enclosure_json(const Enclosure& e) { return {{"lo", e.lo()}, {"hi", e.hi()}}; }

Enclosure enclosure_from_json(const nlohmann::json& j) {
  return Enclosure(j.at("lo").get<double>(), j.at("hi").get<double>());
}

namespace {
// JSON has no infinity; unbounded range ends are written as strings
nlohmann::json bound_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}
double bound_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("bad range bound: " + s);
  }
  return j.get<double>();
}
}  // namespace

std::string to_string(CheckKind k) { return k == CheckKind::abc_sweep ? "abc_sweep" : "fermat_case"; }

void to_json(nlohmann::json& j, const SweepCertificate& c) {
  j = nlohmann::json{{"schema", kSchemaVersion},
                     {"kind", c.kind},
                     {"range", {bound_json(c.range_lo), bound_json(c.range_hi)}},
                     {"grid", c.grid},
                     {"worst_margin", enclosure_json(c.worst_margin)},
                     {"worst_at", c.worst_at},
                     {"tables_limit", c.tables_limit},
                     {"duration_ms", c.duration_ms},
                     {"passed", c.passed},
                     {"details", c.details}};
}

void from_json(const nlohmann::json& j, SweepCertificate& c) {
  c.kind = j.at("kind").get<std::string>();
  c.range_lo = bound_from_json(j.at("range").at(0));
  c.range_hi = bound_from_json(j.at("range").at(1));
  c.grid = j.at("grid").get<std::string>();
  c.worst_margin = enclosure_from_json(j.at("worst_margin"));
  c.worst_at = j.at("worst_at").get<double>();
  c.tables_limit = j.at("tables_limit").get<std::uint64_t>();
  c.duration_ms = j.at("duration_ms").get<double>();
  c.passed = j.at("passed").get<bool>();
  c.details = j.value("details", nlohmann::json::object());
}

void to_json(nlohmann::json& j, const ExclusionCertificate& c) {
  j = nlohmann::json{{"schema", kSchemaVersion},
                     {"kind", "exclusion"},
                     {"check_kind", to_string(c.check_kind)},
                     {"S",
                      {{"window_lo", c.S.window_lo},
                       {"window_hi", c.S.window_hi},
                       {"excluded", c.S.excluded},
                       {"n", c.S.n}}},
                     {"k", c.k},
                     {"dataset", c.dataset},
                     {"vol_policy", c.vol_policy},
                     {"a1", enclosure_json(c.a1)},
                     {"a2", enclosure_json(c.a2)},
                     {"a3", enclosure_json(c.a3)},
                     {"k_s", c.k_s},
                     {"k_s_log2", enclosure_json(c.k_s_log2)}};
  if (c.check_kind == CheckKind::abc_sweep) {
    j["h_range"] = {c.h_lo, c.h_hi};
    j["step_ratio"] = c.step_ratio;
    j["margin"] = {{"at_lo", enclosure_json(c.margin_lo)}, {"at_hi", enclosure_json(c.margin_hi)}};
    j["loose_margin"] = {{"at_lo", enclosure_json(c.loose_margin_lo)}, {"at_hi", enclosure_json(c.loose_margin_hi)}};
  } else {
    j["signature_class"] = c.signature_class;
    j["b1"] = enclosure_json(c.b1);
    j["b2"] = enclosure_json(c.b2);
    j["excluded_interval"] = {{"L", enclosure_json(c.L)}, {"U", enclosure_json(c.k_s_log2)}};
    j["extremal"] = c.extremal;
  }
}

void from_json(const nlohmann::json& j, ExclusionCertificate& c) {
  const std::string kind = j.at("check_kind").get<std::string>();
  if (kind == "abc_sweep") c.check_kind = CheckKind::abc_sweep;
  else if (kind == "fermat_case") c.check_kind = CheckKind::fermat_case;
  else throw std::invalid_argument("unknown check_kind " + kind);
  const auto& s = j.at("S");
  c.S.window_lo = s.at("window_lo").get<std::uint64_t>();
  c.S.window_hi = s.at("window_hi").get<std::uint64_t>();
  c.S.excluded = s.at("excluded").get<std::vector<std::uint64_t>>();
  c.S.n = s.at("n").get<std::uint64_t>();
  c.k = j.at("k").get<int>();
  c.dataset = j.at("dataset").get<std::string>();
  c.vol_policy = j.at("vol_policy").get<std::string>();
  c.a1 = enclosure_from_json(j.at("a1"));
  c.a2 = enclosure_from_json(j.at("a2"));
  c.a3 = enclosure_from_json(j.at("a3"));
  c.k_s = j.at("k_s").get<std::string>();
  c.k_s_log2 = enclosure_from_json(j.at("k_s_log2"));
  if (c.check_kind == CheckKind::abc_sweep) {
    c.h_lo = j.at("h_range").at(0).get<double>();
    c.h_hi = j.at("h_range").at(1).get<double>();
    c.step_ratio = j.at("step_ratio").get<double>();
    c.margin_lo = enclosure_from_json(j.at("margin").at("at_lo"));
    c.margin_hi = enclosure_from_json(j.at("margin").at("at_hi"));
    c.loose_margin_lo = enclosure_from_json(j.at("loose_margin").at("at_lo"));
    c.loose_margin_hi = enclosure_from_json(j.at("loose_margin").at("at_hi"));
  } else {
    c.signature_class = j.at("signature_class").get<std::string>();
    c.b1 = enclosure_from_json(j.at("b1"));
    c.b2 = enclosure_from_json(j.at("b2"));
    c.L = enclosure_from_json(j.at("excluded_interval").at("L"));
    c.extremal = j.at("extremal");
  }
}

}  // namespace effabc
