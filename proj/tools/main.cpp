#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tvsar/csv.hpp"
#include "tvsar/estimator.hpp"
#include "tvsar/gof.hpp"
#include "tvsar/parallel.hpp"
#include "tvsar/sim.hpp"

namespace {

using nlohmann::json;
using namespace tvsar;

constexpr int kExitError = 1;
constexpr int kExitMissingInput = 2;

void require_input(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw MissingData("input file does not exist: " + path);
}

Contiguity parse_scheme(const std::string& s) {
  if (s == "rook") return Contiguity::Rook;
  if (s == "queen") return Contiguity::Queen;
  throw ParseError("unknown contiguity scheme '" + s + "' (rook|queen)");
}

RhoShape parse_rho(const std::string& s) {
  if (s == "rho1") return RhoShape::Rho1;
  if (s == "rho2") return RhoShape::Rho2;
  throw ParseError("unknown rho shape '" + s + "' (rho1|rho2)");
}

ErrorLaw parse_error_law(const std::string& s) {
  if (s == "normal") return ErrorLaw::Normal;
  if (s == "uniform") return ErrorLaw::Uniform;
  if (s == "chisq") return ErrorLaw::ChiSq;
  throw ParseError("unknown error law '" + s + "' (normal|uniform|chisq)");
}

Beta4Shape parse_beta4(const std::string& s) {
  if (s == "sin2pi") return Beta4Shape::Sin2PiTau;
  if (s == "sinpi") return Beta4Shape::SinPiTau;
  throw ParseError("unknown beta4 shape '" + s + "' (sin2pi|sinpi)");
}

std::string scheme_name(Contiguity c) {
  return c == Contiguity::Rook ? "rook" : "queen";
}
std::string rho_name(RhoShape r) { return r == RhoShape::Rho1 ? "rho1" : "rho2"; }
std::string law_name(ErrorLaw e) {
  switch (e) {
    case ErrorLaw::Normal: return "normal";
    case ErrorLaw::Uniform: return "uniform";
    case ErrorLaw::ChiSq: return "chisq";
  }
  return "?";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t b = item.find_first_not_of(" \t");
    std::size_t e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// fit / test shared input handling

struct FitInputs {
  std::string panel_path;
  std::string weights_path;
  std::string response;
  std::vector<std::string> varying;
  std::vector<std::string> constant;
  double h_override = 0.0;  // 0 means ROT
  bool standardize = true;

  LoadedPanel panel;
  SpatialWeights weights;
  ModelSpec spec;

  json config() const {
    json j;
    j["panel"] = panel_path;
    j["weights"] = weights_path;
    j["response"] = response;
    j["varying"] = varying;
    j["constant"] = constant;
    j["bandwidth"] = h_override > 0.0 ? json(h_override) : json("rot");
    j["standardize_weights"] = standardize;
    return j;
  }

  std::string config_comment() const {
    std::ostringstream os;
    os << "fit panel=" << panel_path << " weights=" << weights_path
       << " response=" << response << " varying=";
    for (std::size_t i = 0; i < varying.size(); ++i)
      os << (i ? "," : "") << varying[i];
    os << " constant=";
    for (std::size_t i = 0; i < constant.size(); ++i)
      os << (i ? "," : "") << constant[i];
    if (h_override > 0.0) os << " bandwidth=" << h_override;
    os << " standardize=" << (standardize ? 1 : 0);
    return os.str();
  }
};

void add_fit_options(CLI::App* cmd, FitInputs& in) {
  cmd->add_option("--panel", in.panel_path, "Panel CSV path")->required();
  cmd->add_option("--weights", in.weights_path, "Weights CSV path")->required();
  cmd->add_option("--response", in.response, "Response column name")->required();
  cmd->add_option("--varying", in.varying,
                  "Covariates with time-varying coefficients (the intercept "
                  "is always varying)")
      ->delimiter(',');
  cmd->add_option("--constant", in.constant,
                  "Covariates with constant coefficients")
      ->delimiter(',');
  cmd->add_option("--bandwidth", in.h_override,
                  "Bandwidth override (default: ROT)");
  cmd->add_flag("!--no-standardize", in.standardize,
                "Use the weights file as-is instead of row-standardizing");
}

void load_fit_inputs(FitInputs& in) {
  require_input(in.panel_path);
  require_input(in.weights_path);
  PanelLayout layout;
  layout.response_col = in.response;
  for (const auto& name : in.varying) layout.covariate_cols.push_back(name);
  for (const auto& name : in.constant) layout.covariate_cols.push_back(name);
  in.panel = load_panel_csv(in.panel_path, layout);
  in.weights = load_weights_csv(in.weights_path);
  if (in.standardize) in.weights = row_standardize(in.weights);
  if (in.weights.n_locations() != in.panel.data.n)
    throw DimensionError("weights are " +
                         std::to_string(in.weights.n_locations()) + "x" +
                         std::to_string(in.weights.n_locations()) +
                         " but the panel has " +
                         std::to_string(in.panel.data.n) + " locations");
  in.spec.varying_cols = {0};  // intercept
  for (std::size_t j = 0; j < in.varying.size(); ++j)
    in.spec.varying_cols.push_back(static_cast<int>(j) + 1);
  for (std::size_t j = 0; j < in.constant.size(); ++j)
    in.spec.constant_cols.push_back(
        static_cast<int>(in.varying.size() + j) + 1);
  in.spec.intercept_col = 0;
  in.spec.validate(in.panel.data.p());
}

std::optional<Bandwidth> bandwidth_of(const FitInputs& in) {
  if (in.h_override > 0.0) return Bandwidth{in.h_override};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// subcommand bodies

int run_weights(int m, const std::string& scheme, const std::string& out) {
  const SpatialWeights w =
      row_standardize(build_lattice_weights(m, parse_scheme(scheme)));
  write_weights_csv(out, w,
                    "weights m=" + std::to_string(m) + " scheme=" + scheme +
                        " standardized=1");
  std::cout << "wrote " << out << " (" << w.n_locations() << "x"
            << w.n_locations() << ")\n";
  return 0;
}

int run_simulate(const DgpConfig& cfg, int replicate,
                 const std::string& out_panel, const std::string& out_truth,
                 const std::string& out_weights) {
  const SimulatedPanel sim = generate(cfg, replicate);
  std::ostringstream cfgline;
  cfgline << "simulate m=" << cfg.m << " t_len=" << cfg.t_len
          << " scheme=" << scheme_name(cfg.scheme)
          << " rho=" << rho_name(cfg.rho_shape)
          << " error=" << law_name(cfg.error_law) << " c=" << cfg.c
          << " beta4="
          << (cfg.beta4_shape == Beta4Shape::Sin2PiTau ? "sin2pi" : "sinpi")
          << " seed=" << cfg.seed << " replicate=" << replicate;
  write_panel_csv(out_panel, sim.data, "y", {"x2", "x3", "x4"}, cfgline.str());
  if (!out_weights.empty())
    write_weights_csv(out_weights, sim.weights, cfgline.str());
  if (!out_truth.empty()) {
    std::ostringstream os;
    os << "# " << cfgline.str() << "\n";
    os << "tau,rho,beta1,beta2,beta3,beta4\n";
    for (int t = 0; t < cfg.t_len; ++t)
      os << format_double(sim.data.tau(t)) << ","
         << format_double(sim.truth.rho(t)) << ","
         << format_double(sim.truth.beta1(t)) << ","
         << format_double(sim.truth.beta2(t)) << ","
         << format_double(sim.truth.beta3_curve(t)) << ","
         << format_double(sim.truth.beta4_curve(t)) << "\n";
    write_text(out_truth, os.str());
  }
  std::cout << "wrote " << out_panel << " (N=" << sim.data.n
            << ", T=" << sim.data.t_len << ")\n";
  return 0;
}

int run_fit(FitInputs& in, const std::string& out_prefix) {
  load_fit_inputs(in);
  const FitResult f =
      fit(in.panel.data, in.spec, in.weights, KernelSpec{}, bandwidth_of(in));

  json beta;
  beta["command"] = "fit";
  beta["config"] = in.config();
  beta["bandwidth_used"] = f.bandwidth.h;
  json coeffs = json::object();
  for (std::size_t j = 0; j < in.constant.size(); ++j)
    coeffs[in.constant[j]] = f.beta_c(static_cast<Eigen::Index>(j));
  beta["beta_c"] = coeffs;
  write_json(out_prefix + "_beta_c.json", beta);

  std::ostringstream curves;
  curves << "# " << in.config_comment()
         << " bandwidth_used=" << format_double(f.bandwidth.h) << "\n";
  curves << "tau,rho_hat,intercept";
  for (const auto& name : in.varying) curves << "," << name;
  curves << "\n";
  for (int t = 0; t < in.panel.data.t_len; ++t) {
    curves << format_double(in.panel.data.tau(t));
    for (int j = 0; j < f.gamma_v.cols(); ++j)
      curves << "," << format_double(f.gamma_v(t, j));
    curves << "\n";
  }
  write_text(out_prefix + "_gamma_v.csv", curves.str());

  std::ostringstream alpha;
  alpha << "# " << in.config_comment() << "\n";
  alpha << "location,alpha_hat\n";
  for (int i = 0; i < in.panel.data.n; ++i)
    alpha << in.panel.location_ids[static_cast<std::size_t>(i)] << ","
          << format_double(f.alpha(i)) << "\n";
  write_text(out_prefix + "_alpha.csv", alpha.str());

  json rss;
  rss["command"] = "fit";
  rss["config"] = in.config();
  rss["bandwidth_used"] = f.bandwidth.h;
  rss["rss_pl"] = f.rss;
  rss["rho_outside_unit"] = f.rho_outside_unit;
  rss["max_abs_rho"] = f.max_abs_rho;
  write_json(out_prefix + "_rss.json", rss);

  if (f.rho_outside_unit)
    std::cerr << "warning: |rho_hat| reaches " << f.max_abs_rho
              << ", outside the stationarity region (-1,1)\n";
  std::cout << "wrote " << out_prefix << "_{beta_c.json,gamma_v.csv,"
            << "alpha.csv,rss.json}\n";
  return 0;
}

int run_test(FitInputs& in, int k, std::uint64_t seed, int workers,
             bool emit_bootstrap, const std::string& out) {
  load_fit_inputs(in);
  const KernelSpec kernel;
  const Bandwidth h = bandwidth_of(in)
                          ? *bandwidth_of(in)
                          : rot_bandwidth(in.panel.data.n, in.panel.data.t_len);
  const Stage1Fit s1 = stage1_fit(in.panel.data, in.weights, h, kernel);
  const FitResult f = stage2_fit(in.panel.data, in.spec, s1, h, kernel);
  const TvFitResult tv = fit_full_tv(in.panel.data, s1, h, kernel);

  TestConfig tc;
  tc.n_bootstrap = k;
  tc.seed = seed;
  tc.parallel = resolve_workers(workers);
  const TestResult res =
      bootstrap_test(in.panel.data, in.spec, in.weights, kernel, f, tv, tc);

  json j;
  j["command"] = "test";
  j["config"] = in.config();
  j["config"]["k"] = k;
  j["config"]["seed"] = seed;
  j["bandwidth_used"] = h.h;
  j["w_observed"] = res.w_observed;
  j["p_value"] = res.p_value;
  j["k"] = res.k;
  j["seed"] = res.seed;
  j["rss_pl"] = f.rss;
  j["rss_tv"] = tv.rss;
  if (emit_bootstrap) {
    json arr = json::array();
    for (int i = 0; i < res.w_bootstrap.size(); ++i)
      arr.push_back(res.w_bootstrap(i));
    j["w_bootstrap"] = arr;
  }
  write_json(out, j);
  std::cout << "p-value: " << res.p_value << " (W=" << res.w_observed
            << ", k=" << res.k << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Monte-Carlo driver: flat key=value config with comma lists expanded into a
// grid over {m, t_len, scheme, rho, error, c}.

struct McConfig {
  std::map<std::string, std::vector<std::string>> kv;

  static McConfig load(const std::string& path) {
    require_input(path);
    std::ifstream in(path);
    McConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      std::size_t b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("config " + path + " line " + std::to_string(lineno) +
                         ": expected key = value");
      std::string key = line.substr(0, eq);
      key.erase(key.find_last_not_of(" \t") + 1);
      key.erase(0, key.find_first_not_of(" \t"));
      if (key.empty())
        throw ParseError("config " + path + " line " + std::to_string(lineno) +
                         ": empty key");
      // an empty value is legal for grid keys and yields an empty grid
      cfg.kv[key] = split_list(line.substr(eq + 1));
    }
    return cfg;
  }

  const std::vector<std::string>& list(const std::string& key,
                                       const std::vector<std::string>& dflt) const {
    const auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
  }

  std::string scalar(const std::string& key, const std::string& dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    if (it->second.size() != 1)
      throw ParseError("config key '" + key +
                       "' must be a single value, got " +
                       std::to_string(it->second.size()));
    return it->second[0];
  }
};

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': '" + value +
                     "' is not an integer");
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': '" + value +
                     "' is not a number");
  }
}

std::uint64_t to_seed(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': '" + value +
                     "' is not a seed");
  }
}

std::vector<DgpConfig> expand_grid(const McConfig& cfg, std::uint64_t seed) {
  static const std::vector<std::string> d_m = {"10"};
  static const std::vector<std::string> d_t = {"5"};
  static const std::vector<std::string> d_scheme = {"rook"};
  static const std::vector<std::string> d_rho = {"rho1"};
  static const std::vector<std::string> d_err = {"normal"};
  static const std::vector<std::string> d_c = {"0"};
  std::vector<DgpConfig> out;
  for (const auto& m : cfg.list("m", d_m))
    for (const auto& t : cfg.list("t_len", d_t))
      for (const auto& sch : cfg.list("scheme", d_scheme))
        for (const auto& rho : cfg.list("rho", d_rho))
          for (const auto& err : cfg.list("error", d_err))
            for (const auto& c : cfg.list("c", d_c)) {
              DgpConfig d;
              d.m = to_int("m", m);
              d.t_len = to_int("t_len", t);
              d.scheme = parse_scheme(sch);
              d.rho_shape = parse_rho(rho);
              d.error_law = parse_error_law(err);
              d.c = to_double("c", c);
              d.beta4_shape = parse_beta4(cfg.scalar("beta4", "sin2pi"));
              d.seed = seed;
              out.push_back(d);
            }
  return out;
}

std::string cell_prefix(const DgpConfig& d, int n_sim) {
  std::ostringstream os;
  os << d.m << "," << d.n() << "," << d.t_len << "," << scheme_name(d.scheme)
     << "," << rho_name(d.rho_shape) << "," << law_name(d.error_law) << ","
     << format_double(d.c) << "," << d.seed << "," << n_sim;
  return os.str();
}

int run_mc(const std::string& mode, const std::string& config_path,
           const std::string& out, const std::string& curves_out,
           std::uint64_t seed_override, int n_sim_override, int k_override,
           int workers) {
  const McConfig cfg = McConfig::load(config_path);
  const std::uint64_t seed =
      seed_override ? seed_override
                    : to_seed("seed", cfg.scalar("seed", "0"));
  const int n_sim = n_sim_override
                        ? n_sim_override
                        : to_int("n_sim", cfg.scalar("n_sim", "100"));
  const int k = k_override ? k_override : to_int("k", cfg.scalar("k", "200"));
  const int nworkers =
      workers > 0 ? workers : to_int("workers", cfg.scalar("workers", "0"));
  const std::vector<DgpConfig> grid = expand_grid(cfg, seed);

  std::ostringstream os;
  os << "# mc " << mode << " config=" << config_path << " seed=" << seed
     << " n_sim=" << n_sim;
  if (mode != "estimate") os << " k=" << k;
  os << "\n";

  if (mode == "estimate") {
    os << "m,n,t_len,scheme,rho,error,c,seed,n_sim,amse_rho,amse_beta1,"
          "amse_beta2,bias_beta3,sd_beta3,bias_beta4,sd_beta4\n";
    std::ostringstream curves;
    for (const auto& cell : grid) {
      const McSummary s = mc_estimation(cell, n_sim, nworkers);
      os << cell_prefix(cell, n_sim) << "," << format_double(s.amse_rho) << ","
         << format_double(s.amse_beta1) << "," << format_double(s.amse_beta2)
         << "," << format_double(s.bias_beta3) << ","
         << format_double(s.sd_beta3) << "," << format_double(s.bias_beta4)
         << "," << format_double(s.sd_beta4) << "\n";
      if (!curves_out.empty()) {
        curves << "# cell " << cell_prefix(cell, n_sim) << "\n";
        curves << "tau,rho_true,rho_mean,beta1_true,beta1_mean,beta2_true,"
                  "beta2_mean\n";
        for (int t = 0; t < cell.t_len; ++t) {
          curves << format_double(static_cast<double>(t + 1) / cell.t_len);
          for (int j = 0; j < 3; ++j)
            curves << "," << format_double(s.true_curves(t, j)) << ","
                   << format_double(s.mean_curves(t, j));
          curves << "\n";
        }
      }
    }
    if (!curves_out.empty()) write_text(curves_out, curves.str());
  } else if (mode == "size") {
    static const std::vector<std::string> d_alphas = {"0.01", "0.05", "0.10"};
    std::vector<double> alphas;
    for (const auto& a : cfg.list("alphas", d_alphas))
      alphas.push_back(to_double("alphas", a));
    os << "m,n,t_len,scheme,rho,error,c,seed,n_sim,k,alpha,rejection_rate\n";
    for (const auto& cell : grid) {
      const std::vector<double> rates =
          mc_size(cell, n_sim, k, alphas, nworkers);
      for (std::size_t a = 0; a < alphas.size(); ++a)
        os << cell_prefix(cell, n_sim) << "," << k << ","
           << format_double(alphas[a]) << "," << format_double(rates[a])
           << "\n";
    }
  } else if (mode == "power") {
    const double alpha = to_double("alpha", cfg.scalar("alpha", "0.05"));
    os << "m,n,t_len,scheme,rho,error,c,seed,n_sim,k,alpha,rejection_rate\n";
    for (const auto& cell : grid) {
      const double rate = mc_power(cell, n_sim, k, alpha, nworkers);
      os << cell_prefix(cell, n_sim) << "," << k << "," << format_double(alpha)
         << "," << format_double(rate) << "\n";
    }
  } else {
    throw ParseError("unknown mc mode: " + mode);
  }
  write_text(out, os.str());
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "2SLS-PLLDV estimation, goodness-of-fit testing and Monte-Carlo "
      "experiments for partially linear time-varying-coefficient spatial "
      "autoregressive panels"};
  app.require_subcommand(1);

  // weights
  int w_m = 2;
  std::string w_scheme = "rook", w_out = "weights.csv";
  auto* weights_cmd =
      app.add_subcommand("weights", "Write a row-standardized lattice "
                                    "contiguity matrix as CSV");
  weights_cmd->add_option("--m", w_m, "Lattice side (N = m^2)")->required();
  weights_cmd->add_option("--scheme", w_scheme, "rook|queen");
  weights_cmd->add_option("--out", w_out, "Output CSV path")->required();

  // simulate
  DgpConfig sim_cfg;
  int sim_m = 10, sim_t = 5, sim_replicate = 0;
  double sim_c = 0.0;
  std::uint64_t sim_seed = 0;
  std::string sim_scheme = "rook", sim_rho = "rho1", sim_error = "normal";
  std::string sim_beta4 = "sin2pi";
  std::string sim_out, sim_truth, sim_weights_out;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Generate one replicate of the simulation design as a "
                  "panel CSV");
  simulate_cmd->add_option("--m", sim_m, "Lattice side")->required();
  simulate_cmd->add_option("--t", sim_t, "Number of periods T")->required();
  simulate_cmd->add_option("--scheme", sim_scheme, "rook|queen");
  simulate_cmd->add_option("--rho", sim_rho, "rho1|rho2");
  simulate_cmd->add_option("--error", sim_error, "normal|uniform|chisq");
  simulate_cmd->add_option("--c", sim_c, "Deviation from the null");
  simulate_cmd->add_option("--beta4", sim_beta4, "sin2pi|sinpi");
  simulate_cmd->add_option("--seed", sim_seed, "Master seed");
  simulate_cmd->add_option("--replicate", sim_replicate, "Replicate index");
  simulate_cmd->add_option("--out", sim_out, "Panel CSV path")->required();
  simulate_cmd->add_option("--truth", sim_truth, "True-curve CSV path");
  simulate_cmd->add_option("--weights-out", sim_weights_out,
                           "Also write the lattice weights CSV");

  // fit
  FitInputs fit_in;
  std::string fit_out = "fit";
  auto* fit_cmd = app.add_subcommand(
      "fit", "Two-stage estimation of the partially linear model");
  add_fit_options(fit_cmd, fit_in);
  fit_cmd->add_option("--out", fit_out, "Output file prefix");

  // test
  FitInputs test_in;
  std::string test_out = "test.json";
  int test_k = 500, test_workers = 0;
  std::uint64_t test_seed = 0;
  bool test_emit_bootstrap = false;
  auto* test_cmd = app.add_subcommand(
      "test", "Bootstrap goodness-of-fit test of constant coefficients");
  add_fit_options(test_cmd, test_in);
  test_cmd->add_option("--k", test_k, "Bootstrap replicates");
  test_cmd->add_option("--seed", test_seed, "Bootstrap seed");
  test_cmd->add_option("--workers", test_workers,
                       "Worker threads (default: TVSAR_WORKERS or 1)");
  test_cmd->add_flag("--emit-bootstrap", test_emit_bootstrap,
                     "Include all bootstrap statistics in the JSON");
  test_cmd->add_option("--out", test_out, "Output JSON path");

  // mc
  std::string mc_config, mc_out = "mc.csv", mc_curves;
  std::uint64_t mc_seed = 0;
  int mc_nsim = 0, mc_k = 0, mc_workers = 0;
  auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo experiment grids");
  mc_cmd->require_subcommand(1);
  std::vector<CLI::App*> mc_modes;
  for (const std::string mode : {"estimate", "size", "power"}) {
    auto* sub = mc_cmd->add_subcommand(
        mode, mode == "estimate"
                  ? "AMSE / bias / SD of the estimators over a config grid"
                  : (mode == "size" ? "Empirical size of the bootstrap test"
                                    : "Empirical power of the bootstrap test"));
    sub->add_option("--config", mc_config, "Flat key=value config file")
        ->required();
    sub->add_option("--out", mc_out, "Output CSV path");
    if (mode == "estimate")
      sub->add_option("--curves", mc_curves,
                      "Also write averaged coefficient curves CSV");
    sub->add_option("--seed", mc_seed, "Override config seed");
    sub->add_option("--n-sim", mc_nsim, "Override config n_sim");
    if (mode != "estimate") sub->add_option("--k", mc_k, "Override config k");
    sub->add_option("--workers", mc_workers, "Worker threads");
    mc_modes.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (weights_cmd->parsed()) return run_weights(w_m, w_scheme, w_out);
    if (simulate_cmd->parsed()) {
      sim_cfg.m = sim_m;
      sim_cfg.t_len = sim_t;
      sim_cfg.scheme = parse_scheme(sim_scheme);
      sim_cfg.rho_shape = parse_rho(sim_rho);
      sim_cfg.error_law = parse_error_law(sim_error);
      sim_cfg.c = sim_c;
      sim_cfg.beta4_shape = parse_beta4(sim_beta4);
      sim_cfg.seed = sim_seed;
      return run_simulate(sim_cfg, sim_replicate, sim_out, sim_truth,
                          sim_weights_out);
    }
    if (fit_cmd->parsed()) return run_fit(fit_in, fit_out);
    if (test_cmd->parsed())
      return run_test(test_in, test_k, test_seed, test_workers,
                      test_emit_bootstrap, test_out);
    if (mc_cmd->parsed()) {
      for (std::size_t i = 0; i < mc_modes.size(); ++i)
        if (mc_modes[i]->parsed())
          return run_mc(i == 0 ? "estimate" : (i == 1 ? "size" : "power"),
                        mc_config, mc_out, mc_curves, mc_seed, mc_nsim, mc_k,
                        mc_workers);
    }
  } catch (const MissingData& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
