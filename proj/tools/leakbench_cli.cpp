// Copyright 2026 The leakbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// leakbench command line: lrb, ilrb, theory and fit subcommands.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "leakbench/io.hpp"
#include "leakbench/leakbench.hpp"
#include "leakbench/presets.hpp"

namespace fs = std::filesystem;
using namespace leakbench;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFit = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<unsigned> threads;
  bool exact = false;
  std::optional<std::uint64_t> shots;
  bool reuse_prefixes = false;
  bool reference_only = false;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_run_options(CLI::App* sub, RunOptions& o) {
  sub->add_option("--config", o.config, "YAML experiment config");
  sub->add_option("--preset", o.preset, "built-in experiment")->check(CLI::IsMember(preset_names()));
  sub->add_option("--seed", o.seed, "RNG seed (overrides the config)");
  sub->add_option("--out-dir", o.out_dir, "output directory");
  sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  auto* exact = sub->add_flag("--exact", o.exact, "exact expectation per circuit");
  auto* shots = sub->add_option("--shots", o.shots, "shots per circuit")->check(CLI::PositiveNumber);
  exact->excludes(shots);
  sub->add_flag("--reuse-prefixes", o.reuse_prefixes, "share circuit prefixes across lengths");
}

std::optional<unsigned> env_threads() {
  const char* v = std::getenv("LEAKBENCH_THREADS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    return static_cast<unsigned>(parse_uint(v));
  } catch (const std::invalid_argument&) {
    throw UsageError("LEAKBENCH_THREADS must be a non-negative integer");
  }
}

RunSpec resolve_spec(const RunOptions& o, Mode expected) {
  if (o.config.empty() == o.preset.empty()) throw UsageError("give exactly one of --config or --preset");
  RunSpec spec = o.preset.empty() ? load_config_file(o.config) : make_preset(o.preset, o.seed.value_or(1));
  auto& c = spec.experiment;
  if (o.seed) c.seed = *o.seed;
  if (o.threads) {
    c.threads = *o.threads;
  } else if (auto t = env_threads()) {
    c.threads = *t;
  }
  if (o.exact) c.shots.reset();
  if (o.shots) c.shots = *o.shots;
  if (o.reuse_prefixes) c.reuse_prefixes = true;
  if (c.mode != expected) {
    throw UsageError(std::string("config mode is ") + (c.mode == Mode::kLrb ? "lrb" : "ilrb") +
                     ", use the matching subcommand");
  }
  const auto& f = spec.fit;
  if (f.model == "cz" && f.order == 1) throw UsageError("cz model needs fit order 2");
  if (f.model == "crosstalk_free") {
    if (c.n > 2) throw UsageError("crosstalk_free model fits at most 2 exponents (n <= 2)");
    if (f.order != 0 && f.order != c.n) throw UsageError("crosstalk_free model needs fit order n");
  }
  if (f.model == "iswap" && c.mode != Mode::kIlrb) throw UsageError("iswap model needs ilrb mode");
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0);
  }
  return spec;
}

DecayFit fit_with(const SurvivalDataset& data, int order) {
  if (order == 0) return select_model(data);
  return fit_decay(data, order);
}

int effective_order(const FitOptions& f, int n) {
  if (f.order != 0) return f.order;
  if (f.model == "cz") return 2;
  if (f.model == "crosstalk_free") return n;
  return 0;
}

// Fit report shared by the run subcommands and `fit`.
Json fit_report(const SurvivalDataset& data, const SurvivalDataset* reference, const FitOptions& opt, int n) {
  const DecayFit fit = fit_with(data, effective_order(opt, n));
  std::optional<DecayFit> ref;
  if (reference != nullptr) ref = fit_decay(*reference, 1);
  std::optional<RateReport> rates;
  if (opt.model == "corollary1") {
    rates = rates_from_fit(fit, Corollary1Model{n, opt.ratio});
  } else if (opt.model == "iswap") {
    if (!ref) throw UsageError("iswap model needs a reference dataset");
    rates = rates_from_fit(fit, IswapModel{ref->exponents[0], ref->exponent_stderr(0)});
  } else if (opt.model == "cz") {
    rates = rates_from_fit(fit, CzModel{});
  } else if (opt.model == "crosstalk_free") {
    rates = rates_from_fit(fit, CrosstalkFreeModel{n, opt.ratio});
  } else if (opt.model != "none") {
    throw UsageError("unknown rate model '" + opt.model + "'");
  }
  Json j = fit_json(fit);
  add_rates(j, rates, opt.model);
  if (ref) j["reference"] = fit_json(*ref);
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string csv_text(const SurvivalDataset& ds) {
  std::ostringstream os;
  write_dataset_csv(ds, os);
  return os.str();
}

int run_experiment(const RunOptions& o, Mode mode, const std::string& command) {
  const RunSpec spec = resolve_spec(o, mode);
  const auto& c = spec.experiment;
  const std::string hash = config_hash(spec);
  const std::string started = utc_now();

  SurvivalDataset main;
  std::optional<SurvivalDataset> reference;
  if (mode == Mode::kLrb) {
    main = run_lrb(c);
  } else if (o.reference_only) {
    main = run_reference(c);
  } else {
    auto r = run_ilrb(c);
    main = std::move(r.interleaved);
    reference = std::move(r.reference);
  }

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  Json outputs;
  write_text(dir / "dataset.csv", csv_text(main));
  outputs["dataset"] = (dir / "dataset.csv").string();
  if (reference) {
    write_text(dir / "reference.csv", csv_text(*reference));
    outputs["reference"] = (dir / "reference.csv").string();
  }

  int code = 0;
  std::string fit_error;
  try {
    FitOptions opt = spec.fit;
    if (o.reference_only) {
      // Paulis alone: no interleaved decay to convert.
      if (opt.model == "iswap" || opt.model == "cz") opt.model = "none";
    }
    const Json report = fit_report(main, reference ? &*reference : nullptr, opt, c.n);
    write_text(dir / "fit.json", report.dump(2) + "\n");
    outputs["fit"] = (dir / "fit.json").string();
  } catch (const FitError& e) {
    fit_error = e.what();
    code = kExitFit;
  }

  Json manifest;
  manifest["version"] = LEAKBENCH_VERSION;
  manifest["command"] = command;
  manifest["config_path"] = o.config.empty() ? Json(nullptr) : Json(o.config);
  manifest["preset"] = o.preset.empty() ? Json(nullptr) : Json(o.preset);
  manifest["config_hash"] = hash;
  manifest["seed"] = c.seed;
  manifest["threads"] = c.threads;
  manifest["outputs"] = outputs;
  manifest["started_utc"] = started;
  manifest["finished_utc"] = utc_now();
  if (!fit_error.empty()) manifest["fit_error"] = fit_error;
  manifest["config"] = to_json(spec);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  if (code != 0) std::cerr << "leakbench: fit failed: " << fit_error << "\n";
  return code;
}

SurvivalDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return read_dataset_csv(in);
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Json spectrum_json(const SpectralSummary& s) {
  Json bounds = Json::array();
  for (const auto& b : s.bounds) bounds.push_back({b.lo, b.hi});
  return {{"eigenvalues", s.eigenvalues}, {"bounds", bounds}, {"notes", s.notes}};
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leakage randomized benchmarking simulator"};
  app.set_version_flag("--version", std::string(LEAKBENCH_VERSION));
  app.require_subcommand(1);

  RunOptions lrb_opts;
  auto* lrb = app.add_subcommand("lrb", "run a leakage RB experiment");
  add_run_options(lrb, lrb_opts);

  RunOptions ilrb_opts;
  auto* ilrb = app.add_subcommand("ilrb", "run an interleaved leakage RB experiment");
  add_run_options(ilrb, ilrb_opts);
  ilrb->add_flag("--reference-only", ilrb_opts.reference_only, "run the Pauli-only reference sequences");

  std::string csv;
  std::string ref_csv;
  std::string fit_out;
  std::string order = "1";
  FitOptions fit_opts;
  int fit_n = 1;
  auto* fit = app.add_subcommand("fit", "fit an existing dataset CSV");
  fit->add_option("--csv", csv, "dataset CSV")->required();
  fit->add_option("--reference", ref_csv, "reference CSV (iswap model)");
  fit->add_option("--order", order, "1, 2 or auto")->check(CLI::IsMember({"1", "2", "auto"}));
  fit->add_option("--model", fit_opts.model, "rate model")
      ->check(CLI::IsMember({"none", "corollary1", "iswap", "cz", "crosstalk_free"}));
  fit->add_option("--n", fit_n, "number of sites")->check(CLI::Range(1, 8));
  fit->add_option("--ratio", fit_opts.ratio, "seepage/leakage ratio of the rate model");
  fit->add_option("--out", fit_out, "write the report here instead of stdout");

  auto* theory = app.add_subcommand("theory", "analytic spectra and rates");
  theory->require_subcommand(1);
  std::vector<double> tp;
  std::vector<double> tq;
  double pbar = 0.0;
  double eps = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps3 = 0.0;
  double lambda = 1.0;
  double lambda_p = 1.0;
  double ratio = 1.0;
  int tn = 1;
  double g_hz = 0.0;
  double eta_hz = 0.0;
  double t_cycles = 1.0;

  auto* t_single = theory->add_subcommand("single-site", "spectrum and bounds of the single-site model");
  t_single->add_option("--p", tp, "per-site leakage rates")->required()->delimiter(',');
  t_single->add_option("--q", tq, "per-site seepage rates")->required()->delimiter(',');
  auto* t_ilrb = theory->add_subcommand("ilrb", "interleaved spectrum for the simplified model");
  t_ilrb->add_option("--pbar", pbar, "averaged Pauli leakage rate")->required();
  t_ilrb->add_option("--eps", eps, "target gate leakage rate")->required();
  t_ilrb->add_option("--n", tn, "number of sites")->required();
  auto* t_cz = theory->add_subcommand("cz", "CZ exchange model");
  t_cz->add_option("--eps1", eps1, "|11> <-> |02> strength")->required();
  t_cz->add_option("--eps2", eps2, "|11> <-> |20> strength")->required();
  auto* t_gen3 = theory->add_subcommand("gen3", "two-qubit exchange model with leaked-leaked coupling");
  t_gen3->add_option("--eps1", eps1, "|11> <-> |02> strength")->required();
  t_gen3->add_option("--eps2", eps2, "|11> <-> |20> strength")->required();
  t_gen3->add_option("--eps3", eps3, "|12> <-> |21> strength")->required();
  auto* t_ctf = theory->add_subcommand("crosstalk-free", "independent per-site channels");
  t_ctf->add_option("--p", tp, "per-site leakage rates")->required()->delimiter(',');
  t_ctf->add_option("--q", tq, "per-site seepage rates")->required()->delimiter(',');
  auto* t_c1 = theory->add_subcommand("corollary1", "rates from a uniform-model exponent");
  t_c1->add_option("--lambda", lambda, "fitted exponent")->required();
  t_c1->add_option("--n", tn, "number of sites")->required();
  t_c1->add_option("--ratio", ratio, "seepage/leakage ratio");
  auto* t_isw = theory->add_subcommand("iswap-rates", "rates from interleaved and reference exponents");
  t_isw->add_option("--lambda", lambda, "interleaved exponent")->required();
  t_isw->add_option("--lambda-p", lambda_p, "reference exponent")->required();
  auto* t_eps = theory->add_subcommand("epsilon-hat", "leaked population after resonant evolution");
  t_eps->add_option("--g", g_hz, "coupling in Hz")->required();
  t_eps->add_option("--eta", eta_hz, "anharmonicity in Hz")->required();
  t_eps->add_option("--t-cycles", t_cycles, "duration in units of 2pi/g");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (lrb->parsed()) return run_experiment(lrb_opts, Mode::kLrb, "lrb");
    if (ilrb->parsed()) return run_experiment(ilrb_opts, Mode::kIlrb, "ilrb");
    if (fit->parsed()) {
      fit_opts.order = order == "auto" ? 0 : std::stoi(order);
      const SurvivalDataset data = load_csv(csv);
      std::optional<SurvivalDataset> ref;
      if (!ref_csv.empty()) ref = load_csv(ref_csv);
      try {
        const Json report = fit_report(data, ref ? &*ref : nullptr, fit_opts, fit_n);
        if (fit_out.empty()) {
          print(report);
        } else {
          write_text(fit_out, report.dump(2) + "\n");
        }
      } catch (const FitError& e) {
        std::cerr << "leakbench: fit failed: " << e.what() << "\n";
        return kExitFit;
      }
      return 0;
    }
    if (t_single->parsed()) {
      const auto sq = single_site_q(tp, tq);
      Json j = spectrum_json(eigen_bounds(tp, tq));
      const auto r = rates_from_q(as_condensed(sq));
      j["L"] = r.leakage;
      j["S"] = r.seepage;
      print(j);
    } else if (t_ilrb->parsed()) {
      print(spectrum_json(ilrb_eigenvalues(pbar, eps, tn)));
    } else if (t_cz->parsed() || t_gen3->parsed()) {
      Json j = spectrum_json(gen3_eigenvalues(eps1, eps2, t_cz->parsed() ? 0.0 : eps3));
      const auto r = two_qubit_rates(eps1, eps2, eps3);
      j["L"] = r.leakage;
      j["S"] = r.seepage;
      print(j);
    } else if (t_ctf->parsed()) {
      const auto r = crosstalk_free_rates(tp, tq);
      print({{"site_exponents", r.site_exponents}, {"L", r.rates.leakage}, {"S", r.rates.seepage}});
    } else if (t_c1->parsed()) {
      const auto r = corollary1_estimates(lambda, tn, ratio);
      print({{"L", r.leakage}, {"S", r.seepage}});
    } else if (t_isw->parsed()) {
      const auto r = iswap_rates_from_lambdas(lambda, lambda_p);
      print({{"L", r.leakage}, {"S", r.seepage}});
    } else if (t_eps->parsed()) {
      const double g = 2.0 * std::numbers::pi * g_hz;
      const double eta = 2.0 * std::numbers::pi * eta_hz;
      const double t = t_cycles * 2.0 * std::numbers::pi / g;
      print({{"g", g}, {"eta", eta}, {"t", t}, {"epsilon_hat", hamiltonian_epsilon(g, eta, t)}});
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "leakbench: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "leakbench: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "leakbench: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "leakbench: " << e.what() << "\n";
    return 1;
  }
}
