// propest: command-line front end for the proportion-estimator toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 numerical error (singular system, negative MSE).

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "propest/propest.hpp"

namespace {

using namespace propest;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigFlags {
  std::string tc;
  std::string tb;
  std::string t1;
  std::string t2;
  std::string t3;

  void attach(CLI::App* cmd, bool all) {
    cmd->add_option("--tc", tc, "t_c transform, e.g. a=1,b=0,alpha=1,beta=0");
    cmd->add_option("--t3", t3, "t3 shape, e.g. gamma=1,g=1,delta=1");
    if (all) {
      cmd->add_option("--tb", tb, "t_b slope, e.g. h1=optimal");
      cmd->add_option("--t1", t1, "t1 exponents, e.g. alpha=1,beta=0");
      cmd->add_option("--t2", t2, "t2 offsets, e.g. h1=optimal,h2=0");
    }
  }
};

struct ParsedConfigs {
  TcConfig tc;
  RegressionConfig tb;
  T1Config t1;
  T2Config t2;
  T3Flag t3;
};

ParsedConfigs parse_configs(const ConfigFlags& flags) {
  try {
    ParsedConfigs out;
    out.tc = parse_tc_flag(flags.tc);
    out.tb = parse_tb_flag(flags.tb);
    out.t1 = parse_t1_flag(flags.t1);
    out.t2 = parse_t2_flag(flags.t2);
    out.t3 = parse_t3_flag(flags.t3);
    return out;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

/// The table set, or p..t2 plus the single t3 shape named on the command line.
std::vector<EstimatorConfig> table_configs(const ParsedConfigs& c) {
  std::vector<EstimatorConfig> out = standard_configs(c.tc, c.t3.config.gamma);
  for (auto& cfg : out) {
    if (auto* tc = std::get_if<TcConfig>(&cfg)) {
      tc->q1 = c.tc.q1;
      tc->q2 = c.tc.q2;
    }
  }
  if (c.t3.explicit_shape || c.t3.config.m1 || c.t3.config.m2) {
    out.resize(6);
    out.push_back(c.t3.config);
  }
  return out;
}

void emit(const std::string& output, const std::string& text) {
  if (output.empty() || output == "-") {
    std::cout << text;
  } else {
    write_file(output, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_pre_cell(const TheoryRow& row) {
  if (!row.error.empty()) return "error";
  if (!row.pre) return "—";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *row.pre);
  return buf;
}

bool report_row_errors(const TheoryReport& report) {
  bool any = false;
  for (const auto& row : report.rows) {
    if (!row.error.empty()) {
      std::cerr << "propest: " << row.label << ": " << row.error << "\n";
      any = true;
    }
  }
  return any;
}

// ---------------------------------------------------------------------------

int cmd_params(const std::string& input, std::optional<std::size_t> n, const std::string& output) {
  const PopulationFrame frame = read_population_csv(input);
  ParamsDocument doc;
  doc.provenance = std::string(kFromFrame);
  doc.params = compute_population_params(frame);
  doc.sample_size = n;
  if (n) sampling_fraction(*n, frame.size());
  emit(output, dump(params_document_to_json(doc)));
  return 0;
}

int cmd_theory(const std::string& params_path, const ConfigFlags& flags, const std::string& output) {
  const ParsedConfigs cfg = parse_configs(flags);
  const ParamsDocument doc = read_params_document(params_path);
  const Design design = doc.design();
  ReportDocument report;
  report.input_digest = digest(read_file(params_path));
  report.configurations = table_configs(cfg);
  report.params = doc.params;
  report.theory = theory_report(doc.params, design, report.configurations, cfg.tc, cfg.t3.config);
  emit(output, dump(report_to_json(report)));
  return report_row_errors(*report.theory) ? kExitNumerical : 0;
}

int cmd_pre(const std::string& params_path, const ConfigFlags& flags, const std::string& format) {
  const ParsedConfigs cfg = parse_configs(flags);
  const ParamsDocument doc = read_params_document(params_path);
  const auto configs = table_configs(cfg);
  const TheoryReport report = theory_report(doc.params, doc.design(), configs, cfg.tc, cfg.t3.config);

  if (format == "json") {
    json rows = json::array();
    for (const auto& row : report.rows) {
      rows.push_back({{"label", row.label},
                      {"pre", row.pre ? json(*row.pre) : json(nullptr)},
                      {"mse", row.mse ? json(*row.mse) : json(nullptr)},
                      {"error", row.error}});
    }
    std::cout << dump({{"tool", kToolName},
                       {"version", kToolVersion},
                       {"input_digest", digest(read_file(params_path))},
                       {"design", report.design},
                       {"rows", rows}});
  } else if (format == "csv") {
    std::cout << "estimator,pre\n";
    for (const auto& row : report.rows) std::cout << row.label << "," << format_pre_cell(row) << "\n";
  } else {
    std::vector<std::string> labels{"Estimator"}, cells{"PRE"};
    for (const auto& row : report.rows) {
      labels.push_back(row.label);
      cells.push_back(format_pre_cell(row));
    }
    auto print_line = [&](const std::vector<std::string>& items) {
      std::string line;
      for (std::size_t i = 0; i < items.size(); ++i) {
        const std::size_t width = std::max(labels[i].size(), std::size_t{9}) + 2;
        std::string item = items[i];
        // the em dash is one column wide but three bytes long
        const std::size_t shown = item == "—" ? 1 : item.size();
        line += item + std::string(width > shown ? width - shown : 1, ' ');
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      std::cout << line << "\n";
    };
    print_line(labels);
    print_line(cells);
  }
  return report_row_errors(report) ? kExitNumerical : 0;
}

int cmd_estimate(const std::string& input, const std::string& indices_arg, const std::string& name,
                 const ConfigFlags& flags, const std::string& output) {
  const ParsedConfigs cfg = parse_configs(flags);
  EstimatorConfig config;
  if (name == "p" || name == "usual") {
    config = UsualConfig{};
  } else if (name == "ta") {
    config = RatioConfig{};
  } else if (name == "tb") {
    config = cfg.tb;
  } else if (name == "tc") {
    config = cfg.tc;
  } else if (name == "t1") {
    config = cfg.t1;
  } else if (name == "t2") {
    config = cfg.t2;
  } else if (name == "t3") {
    config = cfg.t3.config;
  } else {
    throw UsageError("unknown estimator '" + name + "' (p, ta, tb, tc, t1, t2, t3)");
  }
  const std::string csv = read_file(input);
  const PopulationFrame frame = parse_population_csv(csv);
  const PopulationParams pop = compute_population_params(frame);
  const SampleStats s = sample_stats(frame, parse_indices(indices_arg));
  const Estimate est = estimate(s, pop, config);
  json j = {{"tool", kToolName},
            {"version", kToolVersion},
            {"input_digest", digest(csv)},
            {"sample", {{"n", s.n}, {"a", s.a}, {"p", s.p}, {"xbar", s.xbar}, {"sx2", s.sx2}}},
            {"estimate", {{"label", label(est.config_used)},
                          {"value", est.value},
                          {"config", config_to_json(est.config_used)}}}};
  emit(output, dump(j));
  return 0;
}

int cmd_simulate(const std::string& input, std::size_t n, std::size_t reps, std::uint64_t seed,
                 unsigned workers, bool exact, const ConfigFlags& flags, const std::string& output) {
  const ParsedConfigs cfg = parse_configs(flags);
  const std::string csv = read_file(input);
  const PopulationFrame frame = parse_population_csv(csv);
  ReportDocument report;
  report.input_digest = digest(csv);
  report.configurations = table_configs(cfg);
  report.params = compute_population_params(frame);
  report.simulation = exact ? enumerate_exact(frame, n, report.configurations)
                            : run_experiment(frame, n, report.configurations, reps, seed, workers);
  emit(output, dump(report_to_json(report)));
  return 0;
}

int cmd_generate(std::size_t size, std::uint64_t seed, const std::string& spec_path,
                 const std::string& output, const std::string& log_path) {
  SyntheticSpec spec;
  if (!spec_path.empty()) {
    try {
      spec = spec_from_json(json::parse(read_file(spec_path)));
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, spec_path + ": " + e.what());
    }
  }
  if (size > 0) spec.N = size;
  const GeneratedPopulation gen = generate_population(spec, seed);
  emit(output, format_population_csv(gen.frame));
  const json log = {{"spec", spec_to_json(spec)},
                    {"seed", seed},
                    {"stream", kStreamName},
                    {"attempts", gen.attempts},
                    {"link_slope", gen.link_slope},
                    {"achieved", gen.params}};
  if (!log_path.empty()) write_file(log_path, dump(log));
  std::cerr << "propest: generated N=" << gen.frame.size() << " P=" << gen.params.P
            << " rho_pb=" << gen.params.rho_pb << " lambda03=" << gen.params.lambda03
            << " lambda04=" << gen.params.lambda04 << " lambda12=" << gen.params.lambda12
            << " attempts=" << gen.attempts << "\n";
  return 0;
}

int cmd_sensitivity(const std::string& params_path, int digits, const ConfigFlags& flags,
                    const std::string& output) {
  const ParsedConfigs cfg = parse_configs(flags);
  if (digits < 1) throw UsageError("--digits must be >= 1");
  const ParamsDocument doc = read_params_document(params_path);
  const Design design = doc.design();
  ReportDocument report;
  report.input_digest = digest(read_file(params_path));
  report.configurations = table_configs(cfg);
  report.params = doc.params;
  report.theory = theory_report(doc.params, design, report.configurations, cfg.tc, cfg.t3.config);
  report.sensitivity = sensitivity(doc.params, design.f, report.configurations, digits);
  emit(output, dump(report_to_json(report)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-population proportion estimators: theory, PRE tables and simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string input, output, params_path, indices, estimator_name, format = "table", spec_path,
                                                                     log_path;
  std::optional<std::size_t> n_opt;
  std::size_t n = 0, reps = 0, size = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  int digits = 3;
  bool exact = false;
  ConfigFlags flags;

  auto* params = app.add_subcommand("params", "compute summary statistics from a phi,x frame");
  params->add_option("--input", input, "population CSV")->required();
  params->add_option("--n", n_opt, "sample size for the design");
  params->add_option("--output", output, "parameter document (.json)")->required();

  auto* theory = app.add_subcommand("theory", "first-order bias, MSE, optimal constants");
  theory->add_option("--params", params_path, "parameter document")->required();
  theory->add_option("--output", output, "report (.json); stdout when omitted");
  flags.attach(theory, false);

  auto* pre_cmd = app.add_subcommand("pre", "percent relative efficiency table");
  pre_cmd->add_option("--params", params_path, "parameter document")->required();
  pre_cmd->add_option("--format", format, "table|csv|json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  flags.attach(pre_cmd, false);

  auto* est = app.add_subcommand("estimate", "point estimate from one sample");
  est->add_option("--input", input, "population CSV")->required();
  est->add_option("--indices", indices, "file or inline comma list of 0-based unit indices")->required();
  est->add_option("--estimator", estimator_name, "p|ta|tb|tc|t1|t2|t3")->required();
  est->add_option("--output", output, "result (.json); stdout when omitted");
  flags.attach(est, true);

  auto* sim = app.add_subcommand("simulate", "seeded Monte Carlo (or exact enumeration)");
  sim->add_option("--input", input, "population CSV")->required();
  sim->add_option("--n", n, "sample size")->required();
  sim->add_option("--reps", reps, "replicates")->required();
  sim->add_option("--seed", seed, "seed")->required();
  sim->add_option("--workers", workers, "worker threads (0 = all cores)");
  sim->add_flag("--exact", exact, "enumerate every sample instead of sampling");
  sim->add_option("--output", output, "report (.json); stdout when omitted");
  flags.attach(sim, false);

  auto* gen = app.add_subcommand("generate", "synthetic population");
  gen->add_option("--size", size, "population size")->required();
  gen->add_option("--seed", seed, "seed")->required();
  gen->add_option("--spec", spec_path, "synthetic spec (.json)");
  gen->add_option("--log", log_path, "write the achieved statistics (.json)");
  gen->add_option("--output", output, "population CSV")->required();

  auto* sens = app.add_subcommand("sensitivity", "PRE intervals under input rounding");
  sens->add_option("--params", params_path, "parameter document")->required();
  sens->add_option("--digits", digits, "significant digits of the inputs")->required();
  sens->add_option("--output", output, "report (.json); stdout when omitted");
  flags.attach(sens, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (params->parsed()) return cmd_params(input, n_opt, output);
    if (theory->parsed()) return cmd_theory(params_path, flags, output);
    if (pre_cmd->parsed()) return cmd_pre(params_path, flags, format);
    if (est->parsed()) return cmd_estimate(input, indices, estimator_name, flags, output);
    if (sim->parsed()) return cmd_simulate(input, n, reps, seed, workers, exact, flags, output);
    if (gen->parsed()) return cmd_generate(size, seed, spec_path, output, log_path);
    if (sens->parsed()) return cmd_sensitivity(params_path, digits, flags, output);
  } catch (const UsageError& e) {
    std::cerr << "propest: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "propest: " << e.what() << "\n";
    return is_numerical(e.code()) ? kExitNumerical : kExitData;
  } catch (const json::exception& e) {
    std::cerr << "propest: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "propest: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
