#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "propest/config.hpp"
#include "propest/error.hpp"
#include "propest/montecarlo.hpp"
#include "propest/population.hpp"
#include "propest/sensitivity.hpp"
#include "propest/theory.hpp"

namespace propest {

using json = nlohmann::json;

inline constexpr std::string_view kToolName = "propest";
inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  out << content;
  if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

/// 64-bit FNV-1a, hex encoded; identifies inputs in reports.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

// ---------------------------------------------------------------------------
// CSV population frames: header `phi,x`, one unit per line.

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline PopulationFrame parse_population_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<Unit> units;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = detail::trim(line);
    if (!header_seen) {
      if (line != "phi,x") {
        throw Error(Errc::SchemaError, "line 1: expected header 'phi,x', got '" + std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw Error(Errc::ParseError, where + "expected two fields");
    }
    const auto phi = detail::trim(line.substr(0, comma));
    if (phi != "0" && phi != "1") {
      throw Error(Errc::ParseError, where + "phi must be 0 or 1, got '" + std::string(phi) + "'");
    }
    const auto x = detail::parse_double(line.substr(comma + 1));
    if (!x || !std::isfinite(*x)) throw Error(Errc::ParseError, where + "x is not a finite decimal");
    units.push_back(Unit{static_cast<std::uint8_t>(phi == "1" ? 1 : 0), *x});
  }
  if (!header_seen) throw Error(Errc::SchemaError, "line 1: missing header 'phi,x'");
  try {
    return PopulationFrame(std::move(units));
  } catch (const Error& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

inline PopulationFrame read_population_csv(const std::string& path) {
  return parse_population_csv(read_file(path));
}

inline std::string format_population_csv(const PopulationFrame& frame) {
  std::string out = "phi,x\n";
  for (const auto& u : frame.units()) {
    out += u.phi ? '1' : '0';
    out += ',';
    out += detail::format_double(u.x);
    out += '\n';
  }
  return out;
}

inline void write_population_csv(const std::string& path, const PopulationFrame& frame) {
  write_file(path, format_population_csv(frame));
}

/// Sample indices, inline ("0,3,7") or from a file of comma/whitespace separated integers.
inline std::vector<std::size_t> parse_indices(const std::string& arg) {
  std::error_code ec;
  const std::string text =
      std::filesystem::is_regular_file(arg, ec) ? read_file(arg) : arg;
  std::vector<std::size_t> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::size_t v = 0;
    const auto [ptr, err] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (err != std::errc{} || ptr != token.data() + token.size()) {
      throw Error(Errc::ParseError, "bad sample index '" + token + "'");
    }
    out.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\n' || c == '\r' || c == '\t') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  if (out.empty()) throw Error(Errc::ParseError, "no sample indices given");
  return out;
}

// ---------------------------------------------------------------------------
// key=value flags, e.g. --tc a=1,b=0,alpha=1,beta=0

inline std::map<std::string, std::string> parse_assignments(std::string_view text,
                                                            std::initializer_list<std::string_view> keys) {
  std::map<std::string, std::string> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = detail::trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::InvalidParams, "expected key=value, got '" + std::string(item) + "'");
    }
    const std::string key(detail::trim(item.substr(0, eq)));
    bool known = false;
    for (auto k : keys) known = known || k == key;
    if (!known) throw Error(Errc::InvalidParams, "unknown key '" + key + "'");
    out[key] = std::string(detail::trim(item.substr(eq + 1)));
  }
  return out;
}

namespace detail {

inline double number_value(const std::map<std::string, std::string>& kv, const std::string& key,
                           double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const auto v = parse_double(it->second);
  if (!v || !std::isfinite(*v)) throw Error(Errc::InvalidParams, key + " must be a number");
  return *v;
}

inline Coefficient coefficient_value(const std::map<std::string, std::string>& kv,
                                     const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end() || it->second == "optimal") return kOptimal;
  return number_value(kv, key, 0.0);
}

}  // namespace detail

inline TcConfig parse_tc_flag(std::string_view text) {
  const auto kv = parse_assignments(text, {"a", "b", "alpha", "beta", "q1", "q2"});
  TcConfig c;
  c.a = detail::number_value(kv, "a", c.a);
  c.b = detail::number_value(kv, "b", c.b);
  c.alpha = detail::number_value(kv, "alpha", c.alpha);
  c.beta = detail::number_value(kv, "beta", c.beta);
  c.q1 = detail::coefficient_value(kv, "q1");
  c.q2 = detail::coefficient_value(kv, "q2");
  return c;
}

inline T1Config parse_t1_flag(std::string_view text) {
  const auto kv = parse_assignments(text, {"alpha", "beta"});
  return T1Config{detail::coefficient_value(kv, "alpha"), detail::coefficient_value(kv, "beta")};
}

inline T2Config parse_t2_flag(std::string_view text) {
  const auto kv = parse_assignments(text, {"h1", "h2"});
  return T2Config{detail::coefficient_value(kv, "h1"), detail::coefficient_value(kv, "h2")};
}

inline RegressionConfig parse_tb_flag(std::string_view text) {
  const auto kv = parse_assignments(text, {"h1"});
  return RegressionConfig{detail::coefficient_value(kv, "h1")};
}

/// Parsed --t3 flag; `explicit_shape` is set when g or delta were given.
struct T3Flag {
  T3Config config;
  bool explicit_shape = false;
};

inline T3Flag parse_t3_flag(std::string_view text) {
  const auto kv = parse_assignments(text, {"gamma", "g", "delta", "m1", "m2"});
  T3Flag out;
  out.config.gamma = detail::number_value(kv, "gamma", out.config.gamma);
  out.config.g = detail::number_value(kv, "g", out.config.g);
  out.config.delta = detail::number_value(kv, "delta", out.config.delta);
  out.config.m1 = detail::coefficient_value(kv, "m1");
  out.config.m2 = detail::coefficient_value(kv, "m2");
  out.explicit_shape = kv.count("g") || kv.count("delta");
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

inline json coefficient_json(const Coefficient& c) { return c ? json(*c) : json("optimal"); }

inline Coefficient coefficient_from(const json& j, const char* key) {
  if (!j.contains(key)) return kOptimal;
  const json& v = j.at(key);
  if (v.is_string() && v.get<std::string>() == "optimal") return kOptimal;
  if (!v.is_number()) throw Error(Errc::SchemaError, std::string(key) + " must be a number or \"optimal\"");
  return v.get<double>();
}

}  // namespace detail

inline json config_to_json(const EstimatorConfig& config) {
  struct Visitor {
    json operator()(const UsualConfig&) const { return {{"kind", "usual"}}; }
    json operator()(const RatioConfig&) const { return {{"kind", "ratio_ta"}}; }
    json operator()(const RegressionConfig& c) const {
      return {{"kind", "regression_tb"}, {"h1", detail::coefficient_json(c.h1)}};
    }
    json operator()(const TcConfig& c) const {
      return {{"kind", "family_tc"}, {"a", c.a}, {"b", c.b}, {"alpha", c.alpha}, {"beta", c.beta},
              {"q1", detail::coefficient_json(c.q1)}, {"q2", detail::coefficient_json(c.q2)}};
    }
    json operator()(const T1Config& c) const {
      return {{"kind", "t1"}, {"alpha", detail::coefficient_json(c.alpha)},
              {"beta", detail::coefficient_json(c.beta)}};
    }
    json operator()(const T2Config& c) const {
      return {{"kind", "t2"}, {"h1", detail::coefficient_json(c.h1)},
              {"h2", detail::coefficient_json(c.h2)}};
    }
    json operator()(const T3Config& c) const {
      return {{"kind", "t3"}, {"gamma", c.gamma}, {"g", c.g}, {"delta", c.delta},
              {"m1", detail::coefficient_json(c.m1)}, {"m2", detail::coefficient_json(c.m2)}};
    }
  };
  json j = std::visit(Visitor{}, config);
  j["label"] = label(config);
  return j;
}

inline EstimatorConfig config_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "usual") return UsualConfig{};
  if (kind == "ratio_ta") return RatioConfig{};
  if (kind == "regression_tb") return RegressionConfig{detail::coefficient_from(j, "h1")};
  if (kind == "family_tc") {
    return TcConfig{j.value("a", 1.0), j.value("b", 0.0), j.value("alpha", 1.0),
                    j.value("beta", 0.0), detail::coefficient_from(j, "q1"),
                    detail::coefficient_from(j, "q2")};
  }
  if (kind == "t1") return T1Config{detail::coefficient_from(j, "alpha"), detail::coefficient_from(j, "beta")};
  if (kind == "t2") return T2Config{detail::coefficient_from(j, "h1"), detail::coefficient_from(j, "h2")};
  if (kind == "t3") {
    return T3Config{j.value("gamma", 1.0), j.value("g", 1.0), j.value("delta", 1.0),
                    detail::coefficient_from(j, "m1"), detail::coefficient_from(j, "m2")};
  }
  throw Error(Errc::SchemaError, "unknown estimator kind '" + kind + "'");
}

inline void to_json(json& j, const Design& d) {
  j = {{"sample_size", d.n}, {"population_size", d.N}, {"sampling_fraction", d.f}};
}

inline void from_json(const json& j, Design& d) {
  d.n = j.at("sample_size").get<std::size_t>();
  d.N = j.at("population_size").get<std::size_t>();
  d.f = j.at("sampling_fraction").get<double>();
}

inline void to_json(json& j, const PopulationParams& p) {
  j = {{"population_size", p.N}, {"proportion", p.P}, {"xbar", p.xbar},   {"sx2", p.sx2},
       {"sp2", p.sp2},           {"cp", p.cp},        {"cx", p.cx},       {"rho_pb", p.rho_pb},
       {"lambda03", p.lambda03}, {"lambda04", p.lambda04}, {"lambda12", p.lambda12}};
}

inline void from_json(const json& j, PopulationParams& p) {
  p.N = j.at("population_size").get<std::size_t>();
  p.P = j.at("proportion").get<double>();
  p.xbar = j.at("xbar").get<double>();
  p.cp = j.at("cp").get<double>();
  p.cx = j.at("cx").get<double>();
  p.rho_pb = j.at("rho_pb").get<double>();
  p.lambda03 = j.at("lambda03").get<double>();
  p.lambda04 = j.at("lambda04").get<double>();
  p.lambda12 = j.at("lambda12").get<double>();
  p.sx2 = j.contains("sx2") ? j.at("sx2").get<double>() : (p.cx * p.xbar) * (p.cx * p.xbar);
  p.sp2 = j.contains("sp2") ? j.at("sp2").get<double>() : (p.cp * p.P) * (p.cp * p.P);
}

inline void to_json(json& j, const TheoryRow& r) {
  j = {{"label", r.label},          {"config", config_to_json(r.config)}, {"bias", detail::opt(r.bias)},
       {"mse", detail::opt(r.mse)}, {"pre", detail::opt(r.pre)},         {"mse_formula", r.mse_formula},
       {"error", r.error}};
}

inline void from_json(const json& j, TheoryRow& r) {
  r.label = j.at("label").get<std::string>();
  r.config = config_from_json(j.at("config"));
  r.bias = detail::get_opt(j, "bias");
  r.mse = detail::get_opt(j, "mse");
  r.pre = detail::get_opt(j, "pre");
  r.mse_formula = j.at("mse_formula").get<std::string>();
  r.error = j.at("error").get<std::string>();
}

inline void to_json(json& j, const Condition& c) {
  j = {{"name", c.name},
       {"statement", c.statement},
       {"lhs", detail::opt(c.lhs)},
       {"rhs", detail::opt(c.rhs)},
       {"holds", c.holds ? json(*c.holds) : json(nullptr)},
       {"slack", detail::opt(c.slack)},
       {"error", c.error}};
}

inline void from_json(const json& j, Condition& c) {
  c.name = j.at("name").get<std::string>();
  c.statement = j.at("statement").get<std::string>();
  c.lhs = detail::get_opt(j, "lhs");
  c.rhs = detail::get_opt(j, "rhs");
  c.holds = j.at("holds").is_null() ? std::nullopt : std::optional<bool>(j.at("holds").get<bool>());
  c.slack = detail::get_opt(j, "slack");
  c.error = j.at("error").get<std::string>();
}

inline void to_json(json& j, const ComparisonReport& c) {
  j = {{"conditions", c.conditions},
       {"t1_reduction", detail::opt(c.t1_reduction)},
       {"t1_reduction_nonnegative", c.t1_reduction_nonnegative}};
}

inline void from_json(const json& j, ComparisonReport& c) {
  c.conditions = j.at("conditions").get<std::vector<Condition>>();
  c.t1_reduction = detail::get_opt(j, "t1_reduction");
  c.t1_reduction_nonnegative = j.at("t1_reduction_nonnegative").get<bool>();
}

inline void to_json(json& j, const TheoryReport& r) {
  j = {{"design", r.design}, {"var_usual", r.var_usual}, {"rows", r.rows}, {"comparisons", r.comparisons}};
}

inline void from_json(const json& j, TheoryReport& r) {
  r.design = j.at("design").get<Design>();
  r.var_usual = j.at("var_usual").get<double>();
  r.rows = j.at("rows").get<std::vector<TheoryRow>>();
  r.comparisons = j.at("comparisons").get<ComparisonReport>();
}

inline void to_json(json& j, const EstimatorSummary& s) {
  j = {{"label", s.label},
       {"config", config_to_json(s.config)},
       {"evaluated", s.evaluated},
       {"failures", s.failures},
       {"mean", detail::opt(s.mean)},
       {"bias", detail::opt(s.bias)},
       {"mse", detail::opt(s.mse)},
       {"mse_std_error", detail::opt(s.mse_std_error)},
       {"theoretical_mse", detail::opt(s.theoretical_mse)},
       {"ratio", detail::opt(s.ratio)},
       {"error", s.error}};
}

inline void from_json(const json& j, EstimatorSummary& s) {
  s.label = j.at("label").get<std::string>();
  s.config = config_from_json(j.at("config"));
  s.evaluated = j.at("evaluated").get<std::size_t>();
  s.failures = j.at("failures").get<std::size_t>();
  s.mean = detail::get_opt(j, "mean");
  s.bias = detail::get_opt(j, "bias");
  s.mse = detail::get_opt(j, "mse");
  s.mse_std_error = detail::get_opt(j, "mse_std_error");
  s.theoretical_mse = detail::get_opt(j, "theoretical_mse");
  s.ratio = detail::get_opt(j, "ratio");
  s.error = j.at("error").get<std::string>();
}

inline void to_json(json& j, const SimulationReport& r) {
  j = {{"exact", r.exact},           {"stream", r.stream},         {"seed", r.seed},
       {"replicates", r.replicates}, {"design", r.design},         {"true_value", r.true_value},
       {"estimators", r.estimators}};
}

inline void from_json(const json& j, SimulationReport& r) {
  r.exact = j.at("exact").get<bool>();
  r.stream = j.at("stream").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.replicates = j.at("replicates").get<std::size_t>();
  r.design = j.at("design").get<Design>();
  r.true_value = j.at("true_value").get<double>();
  r.estimators = j.at("estimators").get<std::vector<EstimatorSummary>>();
}

inline void to_json(json& j, const PerturbedInput& p) {
  j = {{"name", p.name}, {"value", p.value}, {"half_width", p.half_width}};
}

inline void from_json(const json& j, PerturbedInput& p) {
  p.name = j.at("name").get<std::string>();
  p.value = j.at("value").get<double>();
  p.half_width = j.at("half_width").get<double>();
}

inline void to_json(json& j, const SensitivityInterval& s) {
  j = {{"label", s.label},
       {"config", config_to_json(s.config)},
       {"point_pre", detail::opt(s.point_pre)},
       {"min_pre", detail::opt(s.min_pre)},
       {"max_pre", detail::opt(s.max_pre)},
       {"width", detail::opt(s.width())},
       {"evaluated", s.evaluated},
       {"unstable", s.unstable}};
}

inline void from_json(const json& j, SensitivityInterval& s) {
  s.label = j.at("label").get<std::string>();
  s.config = config_from_json(j.at("config"));
  s.point_pre = detail::get_opt(j, "point_pre");
  s.min_pre = detail::get_opt(j, "min_pre");
  s.max_pre = detail::get_opt(j, "max_pre");
  s.evaluated = j.at("evaluated").get<std::size_t>();
  s.unstable = j.at("unstable").get<std::size_t>();
}

inline void to_json(json& j, const SensitivityReport& r) {
  j = {{"digits", r.digits}, {"scan_points", r.scan_points}, {"inputs", r.inputs}, {"intervals", r.intervals}};
}

inline void from_json(const json& j, SensitivityReport& r) {
  r.digits = j.at("digits").get<int>();
  r.scan_points = j.at("scan_points").get<std::size_t>();
  r.inputs = j.at("inputs").get<std::vector<PerturbedInput>>();
  r.intervals = j.at("intervals").get<std::vector<SensitivityInterval>>();
}

// ---------------------------------------------------------------------------
// Parameter documents

inline constexpr std::string_view kFromFrame = "computed-from-frame";
inline constexpr std::string_view kUserSupplied = "user-supplied";

struct ParamsDocument {
  std::string provenance = std::string(kFromFrame);
  PopulationParams params;
  std::optional<std::size_t> sample_size;

  Design design() const {
    if (!sample_size) throw Error(Errc::InvalidDesign, "parameter document has no sample size");
    return Design::make(*sample_size, params.N);
  }

  friend bool operator==(const ParamsDocument&, const ParamsDocument&) = default;
};

/// Range checks for user-supplied statistics.
inline void validate_params(const PopulationParams& p) {
  auto fail = [](const std::string& why) { throw Error(Errc::InvalidParams, why); };
  if (p.N < 2) fail("population_size must be >= 2");
  if (!(p.P > 0.0 && p.P < 1.0)) fail("proportion must lie strictly between 0 and 1");
  if (!(p.xbar > 0.0)) fail("xbar must be positive");
  if (!(p.cp > 0.0)) fail("cp must be positive");
  if (!(p.cx > 0.0)) fail("cx must be positive");
  if (!(std::abs(p.rho_pb) <= 1.0)) fail("rho_pb must lie in [-1, 1]");
  if (!(p.lambda04 >= 1.0 + p.lambda03 * p.lambda03 - 1e-12)) {
    fail("lambda04 must be at least 1 + lambda03^2");
  }
  for (double v : {p.sx2, p.sp2, p.lambda12}) {
    if (!std::isfinite(v)) fail("non-finite statistic");
  }
}

inline json params_document_to_json(const ParamsDocument& doc) {
  json design = {{"sample_size", doc.sample_size ? json(*doc.sample_size) : json(nullptr)},
                 {"population_size", doc.params.N}};
  design["sampling_fraction"] =
      doc.sample_size ? json(sampling_fraction(*doc.sample_size, doc.params.N)) : json(nullptr);
  return {{"provenance", doc.provenance}, {"design", design}, {"params", doc.params}};
}

inline ParamsDocument params_document_from_json(const json& j) {
  try {
    ParamsDocument doc;
    doc.provenance = j.value("provenance", std::string(kUserSupplied));
    if (doc.provenance != kFromFrame && doc.provenance != kUserSupplied) {
      throw Error(Errc::SchemaError, "unknown provenance '" + doc.provenance + "'");
    }
    doc.params = j.at("params").get<PopulationParams>();
    if (j.contains("design")) {
      const json& d = j.at("design");
      if (d.contains("sample_size") && !d.at("sample_size").is_null()) {
        doc.sample_size = d.at("sample_size").get<std::size_t>();
      }
      if (d.contains("population_size") && d.at("population_size").get<std::size_t>() != doc.params.N) {
        throw Error(Errc::SchemaError, "design.population_size disagrees with params.population_size");
      }
    }
    validate_params(doc.params);
    if (doc.sample_size) sampling_fraction(*doc.sample_size, doc.params.N);
    return doc;
  } catch (const json::exception& e) {
    throw Error(Errc::SchemaError, e.what());
  }
}

inline ParamsDocument read_params_document(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, path + ": " + e.what());
  }
  return params_document_from_json(j);
}

// ---------------------------------------------------------------------------
// Report documents

struct ReportDocument {
  std::string tool = std::string(kToolName);
  std::string version = std::string(kToolVersion);
  std::string input_digest;
  std::vector<EstimatorConfig> configurations;
  std::optional<PopulationParams> params;
  std::optional<TheoryReport> theory;
  std::optional<SimulationReport> simulation;
  std::optional<SensitivityReport> sensitivity;

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

inline json report_to_json(const ReportDocument& r) {
  json j = {{"tool", r.tool}, {"version", r.version}, {"input_digest", r.input_digest}};
  json configs = json::array();
  for (const auto& c : r.configurations) configs.push_back(config_to_json(c));
  j["configurations"] = configs;
  j["params"] = r.params ? json(*r.params) : json(nullptr);
  j["theory"] = r.theory ? json(*r.theory) : json(nullptr);
  j["simulation"] = r.simulation ? json(*r.simulation) : json(nullptr);
  j["sensitivity"] = r.sensitivity ? json(*r.sensitivity) : json(nullptr);
  return j;
}

inline ReportDocument report_from_json(const json& j) {
  try {
    ReportDocument r;
    r.tool = j.at("tool").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.input_digest = j.at("input_digest").get<std::string>();
    for (const auto& c : j.at("configurations")) r.configurations.push_back(config_from_json(c));
    if (!j.at("params").is_null()) r.params = j.at("params").get<PopulationParams>();
    if (!j.at("theory").is_null()) r.theory = j.at("theory").get<TheoryReport>();
    if (!j.at("simulation").is_null()) r.simulation = j.at("simulation").get<SimulationReport>();
    if (!j.at("sensitivity").is_null()) r.sensitivity = j.at("sensitivity").get<SensitivityReport>();
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::SchemaError, e.what());
  }
}

// ---------------------------------------------------------------------------
// Synthetic population specs

inline json spec_to_json(const SyntheticSpec& s) {
  return {{"size", s.N},
          {"aux_shape", s.aux_shape == AuxShape::SkewedPositive ? "skewed-positive" : "symmetric"},
          {"shape", s.shape},
          {"scale", s.scale},
          {"location", s.location},
          {"link_intercept", s.link_intercept},
          {"link_slope", s.link_slope},
          {"target_rho", detail::opt(s.target_rho)},
          {"max_attempts", s.max_attempts}};
}

inline SyntheticSpec spec_from_json(const json& j) {
  try {
    SyntheticSpec s;
    s.N = j.value("size", s.N);
    const std::string shape = j.value("aux_shape", std::string("skewed-positive"));
    if (shape == "skewed-positive") {
      s.aux_shape = AuxShape::SkewedPositive;
    } else if (shape == "symmetric") {
      s.aux_shape = AuxShape::Symmetric;
    } else {
      throw Error(Errc::SchemaError, "aux_shape must be skewed-positive or symmetric");
    }
    if (s.aux_shape == AuxShape::Symmetric) {
      s.location = 10.0;
      s.scale = 2.0;
    }
    s.shape = j.value("shape", s.shape);
    s.scale = j.value("scale", s.scale);
    s.location = j.value("location", s.location);
    s.link_intercept = j.value("link_intercept", s.link_intercept);
    s.link_slope = j.value("link_slope", s.link_slope);
    s.target_rho = detail::get_opt(j, "target_rho");
    s.max_attempts = j.value("max_attempts", s.max_attempts);
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::SchemaError, e.what());
  }
}

}  // namespace propest
