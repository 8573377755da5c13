// depspec command-line front end: spectrum analysis, disagreement bounds,
// scheme generation, and the three experiment drivers.
//
// Exit codes: 0 success, 2 parse/validation error, 3 dimension cap,
// 4 dimension mismatch, 5 trend assertion failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "depspec/corrbounds.hpp"
#include "depspec/experiments.hpp"
#include "depspec/slcs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kExitParse = 2;
constexpr int kExitCap = 3;
constexpr int kExitMismatch = 4;
constexpr int kExitTrend = 5;

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << content;
}

// One manifest per run; timestamps live here and never in the data files.
struct ManifestScope {
  json params;
  std::vector<std::string> outputs;
  std::string subcommand;
  std::string started = iso_now();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void emit(const fs::path& path) {
    json m;
    m["subcommand"] = subcommand;
    m["parameters"] = params;
    // fingerprint of the serialized parameter set, for quick run comparison
    char fp[32];
    std::snprintf(fp, sizeof fp, "%016zx", std::hash<std::string>{}(params.dump()));
    m["config_fingerprint"] = fp;
    m["tool_version"] = kToolVersion;
    m["started_at"] = started;
    m["finished_at"] = iso_now();
    m["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m["outputs"] = outputs;
    write_file(path, m.dump(2) + "\n");
  }
};

int jobs_from_env() {
  if (const char* env = std::getenv("DEPSPEC_JOBS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

// --- function sources -----------------------------------------------------

depspec::BooleanFunction builtin_function(const std::string& name, int n, int threshold_k) {
  using depspec::make_threshold;
  if (name == "dictator") return depspec::make_dictator(n);
  if (name == "parity") return depspec::make_parity(n);
  if (name == "and") return depspec::make_and(n);
  if (name == "majority") return depspec::make_majority(n);
  if (name == "threshold") return make_threshold(n, threshold_k);
  if (name.rfind("threshold-", 0) == 0)
    return make_threshold(n, std::stoi(name.substr(10)));
  throw std::runtime_error("unknown builtin function '" + name + "'");
}

depspec::BooleanFunction read_truth_table(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open truth table " + path.string());
  std::string header;
  if (!std::getline(is, header) || header.rfind("n=", 0) != 0)
    throw std::runtime_error("truth table must start with an n=<k> header line");
  const int n = std::stoi(header.substr(2));
  if (n < 1 || n > depspec::kMaxDim)
    throw depspec::dimension_cap_error("truth table dimension out of range");
  depspec::BooleanFunction e{n, std::vector<std::uint8_t>(1u << n, 0)};
  std::string line;
  std::uint32_t count = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (count >= (1u << n)) throw std::runtime_error("truth table has too many rows");
    if (line != "0" && line != "1")
      throw std::runtime_error("truth table rows must be a single 0 or 1");
    e.table[count++] = line == "1" ? 1 : 0;
  }
  if (count != (1u << n))
    throw std::runtime_error("truth table must list all 2^n outputs in input order");
  return e;
}

depspec::DependencySpectrum read_spectrum_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open spectrum " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != "mask,weight,variance")
    throw std::runtime_error("spectrum CSV must start with mask,weight,variance");
  int n = -1;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string mask_s, weight_s, var_s;
    if (!std::getline(row, mask_s, ',') || !std::getline(row, weight_s, ',') ||
        !std::getline(row, var_s))
      throw std::runtime_error("malformed spectrum row: " + line);
    if (n < 0) {
      n = static_cast<int>(mask_s.size());
      if (n < 1 || n > depspec::kMaxSpectrumDim)
        throw depspec::dimension_cap_error("spectrum dimension out of range");
      values.assign(1u << n, 0.0);
    }
    if (static_cast<int>(mask_s.size()) != n)
      throw std::runtime_error("inconsistent mask width in " + path.string());
    std::uint32_t bits = 0;
    for (int j = 0; j < n; ++j) {
      if (mask_s[j] == '1')
        bits |= 1u << (n - 1 - j);
      else if (mask_s[j] != '0')
        throw std::runtime_error("mask must be a binary string: " + mask_s);
    }
    values[bits] = std::stod(var_s);
  }
  if (n < 0) throw std::runtime_error("spectrum CSV has no rows");
  depspec::DependencySpectrum s;
  s.n = n;
  s.variances = Eigen::Map<Eigen::ArrayXd>(values.data(), values.size());
  s.total = s.variances.sum();
  return s;
}

// --- slcs config flags ----------------------------------------------------

struct SlcsFlags {
  int n = 8;
  double rate = 0.5;
  double eps_typ = 0.3;
  double p_x = 0.5;
  double pu1_x0 = 0.2;
  double pu1_x1 = 0.8;
  std::string mode = "uniform";
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "blocklength");
    app->add_option("--rate", rate, "codebook rate in bits per symbol");
    app->add_option("--eps-typ", eps_typ, "typicality slack");
    app->add_option("--p-x", p_x, "source parameter P(X=1)");
    app->add_option("--pu1-given-x0", pu1_x0, "P(U=1|X=0)");
    app->add_option("--pu1-given-x1", pu1_x1, "P(U=1|X=1)");
    app->add_option("--mode", mode, "codebook mode (uniform|iid)")
        ->check(CLI::IsMember({"uniform", "iid"}));
    app->add_option("--seed", seed, "master seed");
  }

  depspec::SlcsConfig config() const {
    depspec::SlcsConfig c;
    c.n = n;
    c.rate = rate;
    c.eps_typ = eps_typ;
    c.p_x = p_x;
    c.p_u_given_x << 1.0 - pu1_x0, pu1_x0, 1.0 - pu1_x1, pu1_x1;
    c.mode = mode == "uniform" ? depspec::CodebookMode::kUniformTypical
                               : depspec::CodebookMode::kIidProduct;
    c.seed = seed;
    return c;
  }
};

// --- subcommand bodies ------------------------------------------------------

int cmd_spectrum(const std::string& builtin, const std::string& table_path, int n, double p,
                 int threshold_k, const std::string& out_prefix) {
  depspec::BooleanFunction e =
      table_path.empty() ? builtin_function(builtin, n, threshold_k)
                         : read_truth_table(table_path);
  const depspec::ProductSource src{e.n, p};
  const auto f = depspec::center(e, src);
  const auto s = depspec::spectrum(f, src);

  ManifestScope manifest;
  manifest.subcommand = "spectrum";
  manifest.params = {{"builtin", builtin}, {"table", table_path}, {"n", e.n},
                     {"p", p},             {"out", out_prefix}};

  std::ostringstream csv;
  depspec::write_spectrum_csv(csv, s);
  write_file(out_prefix + ".csv", csv.str());
  manifest.outputs.push_back(out_prefix + ".csv");

  json summary;
  summary["n"] = e.n;
  summary["p"] = p;
  summary["q"] = f.q;
  summary["total_variance"] = s.total;
  std::vector<double> level_masses(static_cast<std::size_t>(e.n) + 1, 0.0);
  for (std::uint32_t i = 0; i < (1u << e.n); ++i)
    level_masses[static_cast<std::size_t>(depspec::weight({i, e.n}))] += s.variances[i];
  summary["level_masses"] = level_masses;
  write_file(out_prefix + ".json", summary.dump(2) + "\n");
  manifest.outputs.push_back(out_prefix + ".json");

  manifest.emit(out_prefix + ".manifest.json");
  std::cout << "spectrum written to " << out_prefix << ".csv\n";
  return 0;
}

int cmd_bound(const std::vector<std::string>& spectra, const std::string& builtin_e,
              const std::string& builtin_f, int n, double p, double eps,
              std::int64_t mc_trials, std::uint64_t seed, const std::string& out) {
  ManifestScope manifest;
  manifest.subcommand = "bound";
  manifest.params = {{"spectra", spectra}, {"builtin_e", builtin_e},
                     {"builtin_f", builtin_f}, {"n", n}, {"p", p}, {"eps", eps},
                     {"mc_trials", mc_trials}, {"seed", seed}, {"out", out}};

  depspec::CorrelationReport report;
  json extra;
  if (!spectra.empty()) {
    if (spectra.size() != 2)
      throw std::runtime_error("--spectra needs exactly two CSV paths");
    const auto P = read_spectrum_csv(spectra[0]);
    const auto Q = read_spectrum_csv(spectra[1]);
    if (P.n != Q.n)
      throw depspec::dimension_mismatch_error("spectra have different dimensions");
    report = depspec::make_report(P, Q, eps, 0.0);
    report.method = "bounds-only";
    report.disagreement = std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto e = builtin_function(builtin_e, n, (n + 1) / 2);
    const auto f = builtin_function(builtin_f, n, (n + 1) / 2);
    const depspec::ProductSource src{n, p};
    const auto P = depspec::spectrum(depspec::center(e, src), src);
    const auto Q = depspec::spectrum(depspec::center(f, src), src);
    const depspec::CorrelatedPairSource pair{n, p, eps};
    if (n <= depspec::kMaxDecompositionDim) {
      const double d = depspec::exact_disagreement(e, f, pair);
      report = depspec::make_report(P, Q, eps, d);
      report.method = "exact";
      const bool ok = report.lower_bound - 1e-9 <= d && d <= report.upper_bound + 1e-9;
      extra["sandwich"] = ok ? "pass" : "fail";
    } else {
      const auto mc = depspec::mc_disagreement(e, f, pair, mc_trials, seed);
      report = depspec::make_report(P, Q, eps, mc.estimate);
      report.method = "mc";
      report.estimate_stderr = mc.stderr_;
      report.seed = seed;
      report.trials = mc_trials;
    }
  }

  json j = json::parse(depspec::report_json(report));
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_file(out, j.dump(2) + "\n");
  manifest.outputs.push_back(out);
  manifest.emit(out + ".manifest.json");
  std::cout << "report written to " << out << "\n";
  return 0;
}

int cmd_slcs_dump(const SlcsFlags& flags, const std::string& out) {
  const auto config = flags.config();
  const auto enc = depspec::build_encoder(config);
  std::ostringstream os;
  depspec::dump_encoder(os, enc, config);
  write_file(out, os.str());

  ManifestScope manifest;
  manifest.subcommand = "slcs dump-encoder";
  manifest.params = json::parse(depspec::config_json_line(config));
  manifest.outputs.push_back(out);
  manifest.emit(out + ".manifest.json");
  std::cout << "encoder written to " << out << " (failure rate "
            << depspec::failure_rate(enc) << ")\n";
  return 0;
}

int cmd_slcs_marginal(const SlcsFlags& flags, int m, int coordinate, const std::string& out) {
  const auto config = flags.config();
  std::string csv = "m,x,coordinate,p0,p1\n";
  char buf[64];
  for (std::uint32_t x = 0; x < (1u << m); ++x) {
    double p1;
    try {
      p1 = depspec::single_letter_marginal(config, m, x, coordinate, 1);
    } catch (const std::domain_error&) {
      continue;  // empty conditional typical set: the encoder never sees x
    }
    std::snprintf(buf, sizeof buf, "%.12g", 1.0 - p1);
    csv += std::to_string(m) + ',' + depspec::mask_string({x, m}) + ',' +
           std::to_string(coordinate) + ',' + buf;
    std::snprintf(buf, sizeof buf, "%.12g", p1);
    csv += std::string(",") + buf + '\n';
  }
  write_file(out, csv);

  ManifestScope manifest;
  manifest.subcommand = "slcs marginal";
  manifest.params = json::parse(depspec::config_json_line(config));
  manifest.params["m"] = m;
  manifest.params["coordinate"] = coordinate;
  manifest.outputs.push_back(out);
  manifest.emit(out + ".manifest.json");
  std::cout << "marginals written to " << out << "\n";
  return 0;
}

int cmd_slcs_check_props(const SlcsFlags& flags, int draws, const std::string& out) {
  const auto config = flags.config();
  json j;
  j["config"] = json::parse(depspec::config_json_line(config));

  const auto pairwise = depspec::check_pairwise_independence(config, draws, config.seed);
  j["pairwise_independence"] = {
      {"pairs_tested", pairwise.pairs_tested},
      {"max_abs_correlation", pairwise.max_abs_correlation},
      {"stderr_scale", pairwise.stderr_scale},
      {"degenerate", pairwise.degenerate},
      {"verdict", pairwise.degenerate
                      ? "degenerate"
                      : (pairwise.max_abs_correlation < 4.5 * pairwise.stderr_scale
                             ? "pass"
                             : "fail")}};

  const auto trend = depspec::single_letter_deviation_trend(config, {4, 6, 8, 10, 12});
  json rows = json::array();
  for (const auto& r : trend)
    rows.push_back({{"m", r.m},
                    {"weighted_deviation", r.weighted_deviation},
                    {"max_abs_deviation", r.max_abs_deviation},
                    {"excluded_mass", r.excluded_mass}});
  // baseline: the shortest blocklength whose window covers any input at all
  std::size_t base = 0;
  while (base < trend.size() && trend[base].excluded_mass >= 1.0) ++base;
  std::string trend_verdict;
  if (base + 1 >= trend.size()) {
    trend_verdict = "degenerate";
  } else {
    bool decays = trend.back().weighted_deviation < trend[base].weighted_deviation &&
                  trend.back().excluded_mass < trend[base].excluded_mass;
    for (std::size_t i = base + 1; i < trend.size(); ++i)
      if (trend[i].weighted_deviation > trend[base].weighted_deviation) decays = false;
    trend_verdict = decays ? "pass" : "fail";
  }
  j["single_letter_trend"] = {{"rows", rows}, {"verdict", trend_verdict}};

  std::vector<int> swap_perm(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) swap_perm[static_cast<std::size_t>(i)] = i;
  if (config.n >= 2) std::swap(swap_perm[0], swap_perm[1]);
  const auto perm = depspec::check_permutation_invariance(config, swap_perm, draws,
                                                          config.seed + 1);
  j["permutation_invariance"] = {
      {"max_abs_difference", perm.max_abs_difference},
      {"stderr", perm.max_stderr},
      {"verdict", perm.max_abs_difference <= 4.0 * std::max(perm.max_stderr, 1e-4)
                      ? "pass"
                      : "fail"}};

  write_file(out, j.dump(2) + "\n");
  ManifestScope manifest;
  manifest.subcommand = "slcs check-props";
  manifest.params = json::parse(depspec::config_json_line(config));
  manifest.params["draws"] = draws;
  manifest.outputs.push_back(out);
  manifest.emit(out + ".manifest.json");
  std::cout << "property report written to " << out << "\n";
  return 0;
}

json grid_params(const SlcsFlags& flags, std::uint64_t seed, int draws, int jobs) {
  json p = json::parse(depspec::config_json_line(flags.config()));
  p["master_seed"] = seed;
  p["draws"] = draws;
  p["jobs"] = jobs;
  return p;
}

int cmd_experiment_concentration(const SlcsFlags& flags, depspec::ConcentrationGrid grid,
                                 const std::string& scheme, std::uint64_t seed,
                                 const std::string& out_dir, bool do_assert) {
  const depspec::EncoderScheme sch = scheme == "uncoded" ? depspec::EncoderScheme::kUncoded
                                     : scheme == "constant"
                                         ? depspec::EncoderScheme::kConstant
                                         : depspec::EncoderScheme::kSlcs;
  const auto rows = depspec::run_concentration(flags.config(), grid, sch, seed);

  ManifestScope manifest;
  manifest.subcommand = "experiment concentration";
  manifest.params = grid_params(flags, seed, grid.draws, grid.jobs);
  manifest.params["n_grid"] = grid.ns;
  manifest.params["m_grid"] = grid.ms;
  manifest.params["gamma_grid"] = grid.gammas;
  manifest.params["k"] = grid.k;
  manifest.params["scheme"] = scheme;

  const fs::path csv_path = fs::path(out_dir) / "concentration.csv";
  write_file(csv_path, depspec::concentration_csv(rows));
  manifest.outputs.push_back(csv_path.string());
  manifest.emit(fs::path(out_dir) / "concentration_manifest.json");
  std::cout << "wrote " << csv_path.string() << "\n";

  if (do_assert) {
    const auto violations = depspec::concentration_trend_violations(rows);
    for (const auto& v : violations) std::cerr << "trend violation: " << v << "\n";
    if (!violations.empty()) return kExitTrend;
  }
  return 0;
}

int cmd_experiment_collapse(const SlcsFlags& flags, depspec::CollapseGrid grid,
                            std::uint64_t seed, const std::string& out_dir, bool do_assert) {
  const auto rows = depspec::run_collapse(flags.config(), grid, seed);

  ManifestScope manifest;
  manifest.subcommand = "experiment collapse";
  manifest.params = grid_params(flags, seed, grid.draws, grid.jobs);
  manifest.params["n_grid"] = grid.ns;
  manifest.params["eps_grid"] = grid.eps_grid;
  manifest.params["delta"] = grid.delta;
  manifest.params["shared"] = grid.shared;

  const fs::path csv_path = fs::path(out_dir) / "collapse.csv";
  write_file(csv_path, depspec::collapse_csv(rows));
  manifest.outputs.push_back(csv_path.string());
  manifest.emit(fs::path(out_dir) / "collapse_manifest.json");
  std::cout << "wrote " << csv_path.string() << "\n";

  if (do_assert) {
    const auto violations = depspec::collapse_trend_violations(rows);
    for (const auto& v : violations) std::cerr << "trend violation: " << v << "\n";
    if (!violations.empty()) return kExitTrend;
  }
  return 0;
}

int cmd_experiment_iccs(const SlcsFlags& flags, depspec::IccsParams params,
                        const std::vector<int>& ns, const std::vector<std::string>& schemes,
                        int draws, std::uint64_t seed, const std::string& out_dir,
                        bool do_assert) {
  std::vector<depspec::EncoderScheme> sch;
  for (const auto& s : schemes) {
    if (s == "uncoded")
      sch.push_back(depspec::EncoderScheme::kUncoded);
    else if (s == "slcs")
      sch.push_back(depspec::EncoderScheme::kSlcs);
    else if (s == "constant")
      sch.push_back(depspec::EncoderScheme::kConstant);
    else
      throw std::runtime_error("unknown scheme '" + s + "'");
  }

  std::vector<depspec::IccsReport> all;
  for (const int n : ns) {
    depspec::IccsParams p = params;
    p.n = n;
    p.alpha_y = p.alpha_x * (1.0 - p.eps) + (1.0 - p.alpha_x) * p.eps;
    SlcsFlags f = flags;
    f.n = n;
    const auto rows = depspec::run_iccs_comparison(p, f.config(), sch, draws,
                                                   depspec::derive_seed(seed, n));
    all.insert(all.end(), rows.begin(), rows.end());
  }

  ManifestScope manifest;
  manifest.subcommand = "experiment iccs";
  manifest.params = grid_params(flags, seed, draws, 1);
  manifest.params["n_grid"] = ns;
  manifest.params["schemes"] = schemes;
  manifest.params["channel_delta"] = params.delta;
  manifest.params["q_ary"] = params.q_ary;
  manifest.params["eps"] = params.eps;
  manifest.params["alpha_x"] = params.alpha_x;

  const fs::path csv_path = fs::path(out_dir) / "iccs.csv";
  write_file(csv_path, depspec::iccs_csv(all));
  manifest.outputs.push_back(csv_path.string());
  manifest.emit(fs::path(out_dir) / "iccs_manifest.json");
  std::cout << "wrote " << csv_path.string() << "\n";

  if (do_assert) {
    const auto violations = depspec::iccs_trend_violations(all);
    for (const auto& v : violations) std::cerr << "trend violation: " << v << "\n";
    if (!violations.empty()) return kExitTrend;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dependency-spectrum toolkit for binary block codes"};
  app.require_subcommand(1);

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "decompose a Boolean function");
  std::string sp_builtin, sp_table, sp_out = "spectrum";
  int sp_n = 4, sp_k = -1;
  double sp_p = 0.5;
  sp->add_option("--builtin", sp_builtin,
                 "dictator|parity|and|majority|threshold[-k]");
  sp->add_option("--table", sp_table, "truth table file (n=<k> header, one bit per line)");
  sp->add_option("--n", sp_n, "dimension for builtins");
  sp->add_option("--p", sp_p, "source parameter P(X=1)");
  sp->add_option("--k", sp_k, "threshold for the threshold builtin");
  sp->add_option("--out", sp_out, "output path prefix");

  // bound
  auto* bd = app.add_subcommand("bound", "disagreement bounds for a function pair");
  std::vector<std::string> bd_spectra;
  std::string bd_e = "dictator", bd_f = "dictator", bd_out = "bound.json";
  int bd_n = 4;
  double bd_p = 0.5, bd_eps = 0.1;
  std::int64_t bd_trials = 200000;
  std::uint64_t bd_seed = 1;
  bd->add_option("--spectra", bd_spectra, "two spectrum CSV paths")->expected(2);
  bd->add_option("--builtin-e", bd_e, "first function (builtin name)");
  bd->add_option("--builtin-f", bd_f, "second function (builtin name)");
  bd->add_option("--n", bd_n, "dimension for builtins");
  bd->add_option("--p", bd_p, "source parameter");
  bd->add_option("--eps", bd_eps, "per-coordinate flip probability");
  bd->add_option("--mc-trials", bd_trials, "trials when n exceeds the exact cap");
  bd->add_option("--seed", bd_seed, "Monte-Carlo seed");
  bd->add_option("--out", bd_out, "report path");

  // slcs
  auto* sl = app.add_subcommand("slcs", "typicality-encoding scheme tools");
  SlcsFlags sl_flags;
  sl_flags.attach(sl);
  sl->require_subcommand(1);
  auto* sl_dump = sl->add_subcommand("dump-encoder", "realize and dump a full encoder");
  std::string sl_dump_out = "encoder.txt";
  sl_dump->add_option("--out", sl_dump_out, "output path");
  auto* sl_marg = sl->add_subcommand("marginal", "single-letter conditional marginals");
  int sl_m = 6, sl_coord = 1;
  std::string sl_marg_out = "marginal.csv";
  sl_marg->add_option("--m", sl_m, "blocklength for the counting formula");
  sl_marg->add_option("--coord", sl_coord, "output coordinate (1-based)");
  sl_marg->add_option("--out", sl_marg_out, "output path");
  auto* sl_check = sl->add_subcommand("check-props", "scheme property report");
  int sl_draws = 1500;
  std::string sl_check_out = "props.json";
  sl_check->add_option("--draws", sl_draws, "encoder draws per estimate");
  sl_check->add_option("--out", sl_check_out, "output path");

  // experiment
  auto* ex = app.add_subcommand("experiment", "run an experiment grid");
  std::string ex_name;
  ex->add_option("name", ex_name, "concentration|collapse|iccs")->required();
  SlcsFlags ex_flags;
  ex_flags.attach(ex);
  std::vector<int> ex_ns{4, 6, 8, 10};
  std::vector<int> ex_ms{1, 2, 3};
  std::vector<double> ex_gammas{0.02, 0.05, 0.1};
  std::vector<double> ex_eps{0.0, 0.05, 0.1, 0.2};
  std::vector<std::string> ex_schemes{"uncoded", "slcs", "constant"};
  int ex_draws = 200, ex_k = 1, ex_q = 4, ex_jobs = jobs_from_env();
  double ex_delta = 0.05, ex_channel_delta = 0.1, ex_iccs_eps = 0.1, ex_alpha_x = 0.5;
  bool ex_shared = false, ex_assert = false;
  std::uint64_t ex_seed = 1;
  std::string ex_out_dir = "results";
  ex->add_option("--n-grid", ex_ns, "blocklength grid")->delimiter(',');
  ex->add_option("--m-grid", ex_ms, "weight cutoffs (concentration)")->delimiter(',');
  ex->add_option("--gamma-grid", ex_gammas, "thresholds (concentration)")->delimiter(',');
  ex->add_option("--eps-grid", ex_eps, "correlation grid (collapse)")->delimiter(',');
  ex->add_option("--schemes", ex_schemes, "encoder schemes (iccs)")->delimiter(',');
  ex->add_option("--k", ex_k, "output coordinate (concentration)");
  ex->add_option("--draws", ex_draws, "encoder draws per cell");
  ex->add_option("--delta", ex_delta, "threshold slack (collapse)");
  ex->add_option("--channel-delta", ex_channel_delta, "receiver-1 crossover (iccs)");
  ex->add_option("--q", ex_q, "q-ary alphabet (iccs)");
  ex->add_option("--iccs-eps", ex_iccs_eps, "source correlation (iccs)");
  ex->add_option("--alpha-x", ex_alpha_x, "source parameter (iccs)");
  ex->add_flag("--shared", ex_shared, "collapse: both terminals share one encoder draw");
  ex->add_flag("--assert", ex_assert, "fail (exit 5) when a trend property is violated");
  ex->add_option("--master-seed", ex_seed, "master seed");
  ex->add_option("--out-dir", ex_out_dir, "output directory");
  ex->add_option("--jobs", ex_jobs, "parallel cells (default from DEPSPEC_JOBS)");
  std::string ex_scheme_one = "slcs";
  ex->add_option("--scheme", ex_scheme_one, "encoder scheme (concentration)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  try {
    if (sp->parsed()) {
      if (sp_builtin.empty() == sp_table.empty())
        throw std::runtime_error("spectrum needs exactly one of --builtin or --table");
      return cmd_spectrum(sp_builtin, sp_table, sp_n, sp_p,
                          sp_k > 0 ? sp_k : (sp_n + 1) / 2, sp_out);
    }
    if (bd->parsed())
      return cmd_bound(bd_spectra, bd_e, bd_f, bd_n, bd_p, bd_eps, bd_trials, bd_seed,
                       bd_out);
    if (sl->parsed()) {
      if (sl_dump->parsed()) return cmd_slcs_dump(sl_flags, sl_dump_out);
      if (sl_marg->parsed()) return cmd_slcs_marginal(sl_flags, sl_m, sl_coord, sl_marg_out);
      if (sl_check->parsed()) return cmd_slcs_check_props(sl_flags, sl_draws, sl_check_out);
    }
    if (ex->parsed()) {
      if (ex_name == "concentration") {
        depspec::ConcentrationGrid grid;
        grid.ns = ex_ns;
        grid.ms = ex_ms;
        grid.gammas = ex_gammas;
        grid.k = ex_k;
        grid.draws = ex_draws;
        grid.jobs = ex_jobs;
        return cmd_experiment_concentration(ex_flags, grid, ex_scheme_one, ex_seed,
                                            ex_out_dir, ex_assert);
      }
      if (ex_name == "collapse") {
        depspec::CollapseGrid grid;
        grid.ns = ex_ns;
        grid.eps_grid = ex_eps;
        grid.delta = ex_delta;
        grid.draws = ex_draws;
        grid.shared = ex_shared;
        grid.jobs = ex_jobs;
        return cmd_experiment_collapse(ex_flags, grid, ex_seed, ex_out_dir, ex_assert);
      }
      if (ex_name == "iccs") {
        depspec::IccsParams params;
        params.delta = ex_channel_delta;
        params.q_ary = ex_q;
        params.eps = ex_iccs_eps;
        params.alpha_x = ex_alpha_x;
        params.alpha_y =
            params.alpha_x * (1.0 - params.eps) + (1.0 - params.alpha_x) * params.eps;
        return cmd_experiment_iccs(ex_flags, params, ex_ns, ex_schemes, ex_draws, ex_seed,
                                   ex_out_dir, ex_assert);
      }
      std::cerr << "unknown experiment '" << ex_name
                << "'; expected concentration, collapse, or iccs\n"
                << ex->help();
      return kExitParse;
    }
  } catch (const depspec::dimension_cap_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const depspec::dimension_mismatch_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitParse;
}
