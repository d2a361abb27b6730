// Command-line harness for the product memory library: scaling benchmarks,
// capacity and binding experiments, oracle checks, demo episodes, and
// snapshot save/load. Machine-readable output (CSV or JSON) is always
// emitted before the human-readable summary.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pkm/bench.hpp"
#include "pkm/episodes.hpp"
#include "pkm/mixture.hpp"
#include "pkm/oracle.hpp"
#include "pkm/snapshot.hpp"

namespace {

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

// Machine-readable payload goes to --out (or stdout); the summary follows on
// stdout (or stderr when the payload itself went to stdout).
void emit(const CommonOpts& opts, const std::string& payload,
          const std::string& summary) {
  if (!opts.out.empty()) {
    std::ofstream f(opts.out);
    if (!f) throw pkm::ConfigError("cannot open output file '" + opts.out + "'");
    f << payload;
    std::cout << summary;
  } else {
    std::cout << payload;
    std::cerr << summary;
  }
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "RNG seed")->envname("PKM_SEED");
  cmd->add_option("--out", opts.out, "write machine-readable output here");
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

pkm::AssignmentPolicy make_policy(const std::string& name, double tau,
                                  const std::vector<double>& r_list,
                                  const std::vector<double>& gamma_list) {
  if (name == "uniform") return pkm::AssignmentPolicy::Uniform();
  if (name == "residual") return pkm::AssignmentPolicy::ResidualSoftmax(tau);
  if (name == "fixed") {
    Eigen::VectorXd r =
        Eigen::Map<const Eigen::VectorXd>(r_list.data(), r_list.size());
    return pkm::AssignmentPolicy::Fixed(r);
  }
  if (name == "categorical") {
    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(gamma_list.data(),
                                                          gamma_list.size());
    return pkm::AssignmentPolicy::Categorical(g);
  }
  throw pkm::ConfigError("unknown policy '" + name + "'");
}

std::string capacity_csv(const std::vector<pkm::CapacityRow>& rows, int k) {
  std::ostringstream out;
  out << "T,k,mse,cosine\n";
  for (const auto& r : rows) {
    out << r.T << ',' << k << ',' << pkm::format_double(r.mse) << ','
        << pkm::format_double(r.cosine) << '\n';
  }
  return out.str();
}

std::string capacity_json(const std::vector<pkm::CapacityRow>& rows, int k) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"T", r.T}, {"k", k}, {"mse", r.mse}, {"cosine", r.cosine}});
  }
  return j.dump(2) + "\n";
}

std::string binding_csv(const std::vector<pkm::BindingRow>& rows, int k) {
  std::ostringstream out;
  out << "T,k,masked_cosine,full_mse\n";
  for (const auto& r : rows) {
    out << r.T << ',' << k << ',' << pkm::format_double(r.masked_cosine) << ','
        << pkm::format_double(r.full_mse) << '\n';
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pkm::ConfigError("cannot open input file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factorized Bayesian memory toolbox"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style config file; flags win");

  // bench-scaling ------------------------------------------------------
  CommonOpts bench_opts;
  pkm::BenchConfig bench_cfg;
  std::vector<std::string> bench_steps = {"write"};
  auto* bench = app.add_subcommand("bench-scaling",
                                   "time memory steps across machine counts");
  add_common(bench, bench_opts);
  bench->add_option("--m", bench_cfg.m, "total columns");
  bench->add_option("--k-list", bench_cfg.k_list, "machine counts to sweep");
  bench->add_option("--c", bench_cfg.code_size, "code size");
  bench->add_option("--trials", bench_cfg.trials, "timing trials per k");
  bench->add_option("--steps", bench_cfg.steps_per_trial, "timed steps per trial");
  bench->add_option("--threads", bench_cfg.threads, "per-machine worker threads");
  bench->add_option("--lambda", bench_cfg.lambda, "LS regularizer");
  bench->add_option("--sigma", bench_cfg.sigma, "observation noise");
  bench->add_option("--kind", bench_steps, "step kinds: write and/or read");
  bench->callback([&] {
    bench_cfg.seed = bench_opts.seed;
    bench_cfg.steps.clear();
    for (const auto& s : bench_steps) {
      bench_cfg.steps.push_back(pkm::step_kind_from_string(s));
    }
    auto records = pkm::run_bench(bench_cfg);
    std::string payload;
    if (bench_opts.format == "json") {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : records) {
        j.push_back({{"m", r.m},
                     {"k", r.k},
                     {"kind", pkm::to_string(r.kind)},
                     {"mean_seconds", r.mean_seconds},
                     {"std_seconds", r.std_seconds},
                     {"trials", r.trials}});
      }
      payload = j.dump(2) + "\n";
    } else {
      payload = pkm::bench_records_to_csv(records);
    }
    std::ostringstream summary;
    summary << "bench-scaling: m=" << bench_cfg.m << ", "
            << records.size() << " records\n";
    for (const auto& r : records) {
      summary << "  k=" << r.k << ' ' << pkm::to_string(r.kind) << ' '
              << r.mean_seconds * 1e3 << " ms/step\n";
    }
    emit(bench_opts, payload, summary.str());
  });

  // fit-scaling --------------------------------------------------------
  CommonOpts fit_opts;
  std::string fit_in;
  double fit_m = 0.0;
  auto* fit = app.add_subcommand("fit-scaling",
                                 "fit t(k) = c + a*k + b*(m/k)^3 to a bench CSV");
  add_common(fit, fit_opts);
  fit->add_option("--in", fit_in, "bench CSV produced by bench-scaling")
      ->required();
  fit->add_option("--m", fit_m, "total columns (default: taken from records)");
  fit->callback([&] {
    auto records = pkm::bench_records_from_csv(read_file(fit_in));
    if (records.empty()) throw pkm::InsufficientData("fit-scaling: no records");
    double m = fit_m > 0.0 ? fit_m : static_cast<double>(records.front().m);
    pkm::ScalingFit result = pkm::fit_scaling(records, m);
    std::string payload;
    if (fit_opts.format == "csv") {
      payload = "a,b,c,r_squared,k_opt\n" + pkm::format_double(result.a) + "," +
                pkm::format_double(result.b) + "," +
                pkm::format_double(result.c) + "," +
                pkm::format_double(result.r_squared) + "," +
                pkm::format_double(result.k_opt) + "\n";
    } else {
      payload = pkm::scaling_fit_to_json(result) + "\n";
    }
    std::ostringstream summary;
    summary << "fit-scaling: R^2=" << result.r_squared
            << " k_opt=" << result.k_opt << "\n";
    emit(fit_opts, payload, summary.str());
  });

  // capacity -----------------------------------------------------------
  CommonOpts cap_opts;
  Eigen::Index cap_m = 30, cap_c = 50;
  int cap_k = 2, cap_trials = pkm::kDefaultTrials;
  double cap_lambda = 0.1, cap_sigma = 0.2, cap_psi = pkm::kDefaultPsi;
  double cap_tau = pkm::kDefaultTau;
  std::string cap_policy = "uniform";
  std::vector<double> cap_r, cap_gamma;
  std::vector<int> cap_T = {5, 15, 30, 60, 90};
  auto* cap = app.add_subcommand("capacity", "store/recall error vs episode length");
  add_common(cap, cap_opts);
  cap->add_option("--m", cap_m, "total columns");
  cap->add_option("--k", cap_k, "machine count");
  cap->add_option("--c", cap_c, "code size");
  cap->add_option("--T", cap_T, "episode lengths");
  cap->add_option("--lambda", cap_lambda, "LS regularizer");
  cap->add_option("--sigma", cap_sigma, "observation noise");
  cap->add_option("--psi", cap_psi, "prior column variance scale");
  cap->add_option("--trials", cap_trials, "trials per T");
  cap->add_option("--policy", cap_policy, "uniform|fixed|residual|categorical");
  cap->add_option("--tau", cap_tau, "residual softmax temperature");
  cap->add_option("--r-list", cap_r, "exponents for --policy fixed");
  cap->add_option("--gamma-list", cap_gamma, "weights for --policy categorical");
  cap->callback([&] {
    auto policy = make_policy(cap_policy, cap_tau, cap_r, cap_gamma);
    auto rows = pkm::capacity_curve(cap_m, cap_k, cap_c, cap_T, policy,
                                    cap_lambda, cap_trials, cap_opts.seed,
                                    cap_sigma, cap_psi);
    std::string payload = cap_opts.format == "json"
                              ? capacity_json(rows, cap_k)
                              : capacity_csv(rows, cap_k);
    std::ostringstream summary;
    summary << "capacity: m=" << cap_m << " k=" << cap_k << " c=" << cap_c
            << "\n";
    for (const auto& r : rows) {
      summary << "  T=" << r.T << " mse=" << r.mse << " cosine=" << r.cosine
              << "\n";
    }
    emit(cap_opts, payload, summary.str());
  });

  // binding ------------------------------------------------------------
  CommonOpts bind_opts;
  Eigen::Index bind_m = 60, bind_c = 30;
  int bind_k = 2, bind_channels = 3, bind_trials = pkm::kDefaultTrials;
  double bind_lambda = 60.0, bind_sigma = 0.05, bind_psi = 400.0;
  std::vector<int> bind_T = {5, 180};
  auto* bind = app.add_subcommand(
      "binding", "pattern completion of channel-masked queries");
  add_common(bind, bind_opts);
  bind->add_option("--m", bind_m, "total columns");
  bind->add_option("--k", bind_k, "machine count");
  bind->add_option("--c", bind_c, "code size");
  bind->add_option("--T", bind_T, "episode lengths");
  bind->add_option("--channels", bind_channels, "channel count");
  bind->add_option("--lambda", bind_lambda, "LS regularizer");
  bind->add_option("--sigma", bind_sigma, "observation noise");
  bind->add_option("--psi", bind_psi, "prior column variance scale");
  bind->add_option("--trials", bind_trials, "trials per T");
  bind->callback([&] {
    auto policy = pkm::AssignmentPolicy::Uniform();
    auto rows = pkm::binding_curve(bind_m, bind_k, bind_c, bind_channels,
                                   bind_T, policy, bind_lambda, bind_trials,
                                   bind_opts.seed, bind_sigma, bind_psi);
    std::string payload;
    if (bind_opts.format == "json") {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) {
        j.push_back({{"T", r.T},
                     {"k", bind_k},
                     {"masked_cosine", r.masked_cosine},
                     {"full_mse", r.full_mse}});
      }
      payload = j.dump(2) + "\n";
    } else {
      payload = binding_csv(rows, bind_k);
    }
    std::ostringstream summary;
    summary << "binding: m=" << bind_m << " k=" << bind_k << " c=" << bind_c
            << " masked channel completion\n";
    for (const auto& r : rows) {
      summary << "  T=" << r.T << " masked_cosine=" << r.masked_cosine << "\n";
    }
    emit(bind_opts, payload, summary.str());
  });

  // oracle-check -------------------------------------------------------
  CommonOpts oracle_opts;
  pkm::OracleCheckConfig oracle_cfg;
  auto* oracle = app.add_subcommand(
      "oracle-check", "compare coupled writes against exact conditioning");
  add_common(oracle, oracle_opts);
  oracle->add_option("--reps", oracle_cfg.reps_per_case, "instances per case");
  oracle->add_option("--tolerance", oracle_cfg.tolerance, "max allowed deviation");
  bool oracle_failed = false;
  oracle->callback([&] {
    oracle_cfg.seed = oracle_opts.seed;
    pkm::OracleCheckResult result = pkm::run_oracle_check(oracle_cfg);
    nlohmann::json j = {{"instances", result.instances},
                        {"max_deviation", result.max_deviation},
                        {"tolerance", oracle_cfg.tolerance},
                        {"pass", result.pass}};
    std::ostringstream summary;
    summary << "oracle-check: " << result.instances
            << " instances, max deviation " << result.max_deviation
            << (result.pass ? " (pass)\n" : " (FAIL)\n");
    emit(oracle_opts, j.dump(2) + "\n", summary.str());
    oracle_failed = !result.pass;
  });

  // demo ---------------------------------------------------------------
  CommonOpts demo_opts;
  Eigen::Index demo_m = 60, demo_c = 30;
  int demo_k = 2, demo_T = 10;
  double demo_lambda = 0.1, demo_sigma = 0.2, demo_psi = pkm::kDefaultPsi;
  double demo_tau = pkm::kDefaultTau;
  std::string demo_policy = "residual";
  std::vector<double> demo_r, demo_gamma;
  auto* demo = app.add_subcommand(
      "demo", "write one episode and emit the per-step assignment log");
  add_common(demo, demo_opts);
  demo->add_option("--m", demo_m, "total columns");
  demo->add_option("--k", demo_k, "machine count");
  demo->add_option("--c", demo_c, "code size");
  demo->add_option("--T", demo_T, "episode length");
  demo->add_option("--lambda", demo_lambda, "LS regularizer");
  demo->add_option("--sigma", demo_sigma, "observation noise");
  demo->add_option("--psi", demo_psi, "prior column variance scale");
  demo->add_option("--policy", demo_policy, "uniform|fixed|residual|categorical");
  demo->add_option("--tau", demo_tau, "residual softmax temperature");
  demo->add_option("--r-list", demo_r, "exponents for --policy fixed");
  demo->add_option("--gamma-list", demo_gamma, "weights for --policy categorical");
  demo->callback([&] {
    if (demo_k < 1 || demo_m % demo_k != 0) {
      throw pkm::ConfigError("demo: k must divide m");
    }
    pkm::ProductConfig pc;
    pc.code_size = demo_c;
    pc.columns_per_machine = demo_m / demo_k;
    pc.machines = demo_k;
    pc.lambda = demo_lambda;
    pkm::Rng rng(demo_opts.seed);
    pkm::ProductState state = pkm::make_product(pc, demo_psi, demo_sigma, rng);
    auto policy = make_policy(demo_policy, demo_tau, demo_r, demo_gamma);
    pkm::Episode episode =
        pkm::gen_random_episode(demo_T, demo_c, demo_opts.seed);
    pkm::HistoryBuffer history = pkm::make_history(demo_c, demo_k);
    pkm::WriteEpisodeResult result =
        pkm::write_episode(state, episode.items, policy, history);

    std::ostringstream csv;
    csv << "t,machine,gamma,delta_norm\n";
    for (std::size_t t = 0; t < result.log.size(); ++t) {
      for (int i = 0; i < demo_k; ++i) {
        csv << t << ',' << i << ','
            << pkm::format_double(result.log[t].weights.gamma(i)) << ','
            << pkm::format_double(result.log[t].delta_norm) << '\n';
      }
    }
    std::ostringstream summary;
    summary << "demo: wrote " << demo_T << " items into k=" << demo_k
            << " machines (policy " << demo_policy << ")\n";
    for (std::size_t t = 0; t < result.log.size(); ++t) {
      summary << "  t=" << t << " delta_norm=" << result.log[t].delta_norm
              << " gamma=[" << result.log[t].weights.gamma.transpose() << "]\n";
    }
    emit(demo_opts, csv.str(), summary.str());
  });

  // snapshot -----------------------------------------------------------
  CommonOpts snap_opts;
  Eigen::Index snap_m = 60, snap_c = 30;
  int snap_k = 2;
  double snap_lambda = pkm::kDefaultLambda, snap_sigma = pkm::kDefaultSigma;
  double snap_psi = pkm::kDefaultPsi;
  std::string snap_in;
  auto* snap = app.add_subcommand(
      "snapshot", "save a fresh (or reloaded) memory state to a versioned file");
  add_common(snap, snap_opts);
  snap->add_option("--m", snap_m, "total columns");
  snap->add_option("--k", snap_k, "machine count");
  snap->add_option("--c", snap_c, "code size");
  snap->add_option("--lambda", snap_lambda, "LS regularizer");
  snap->add_option("--sigma", snap_sigma, "observation noise");
  snap->add_option("--psi", snap_psi, "prior column variance scale");
  snap->add_option("--in", snap_in, "load an existing snapshot instead");
  snap->callback([&] {
    pkm::ProductState state;
    if (!snap_in.empty()) {
      state = pkm::load_snapshot(snap_in);
    } else {
      if (snap_k < 1 || snap_m % snap_k != 0) {
        throw pkm::ConfigError("snapshot: k must divide m");
      }
      pkm::ProductConfig pc;
      pc.code_size = snap_c;
      pc.columns_per_machine = snap_m / snap_k;
      pc.machines = snap_k;
      pc.lambda = snap_lambda;
      pkm::Rng rng(snap_opts.seed);
      state = pkm::make_product(pc, snap_psi, snap_sigma, rng);
    }
    std::ostringstream summary;
    summary << "snapshot: k=" << state.k() << " c=" << state.config.code_size
            << " columns/machine=" << state.config.columns_per_machine << "\n";
    emit(snap_opts, pkm::snapshot_to_json(state) + "\n", summary.str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const pkm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return oracle_failed ? 2 : 0;
}
