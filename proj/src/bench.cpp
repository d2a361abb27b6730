#include "pkm/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace pkm {

namespace {

constexpr int kWarmupSteps = 3;

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double stddev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double parse_double(const std::string& s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("bench csv: bad double '" + s + "'");
  }
  return value;
}

}  // namespace

std::string to_string(StepKind kind) {
  return kind == StepKind::kWrite ? "write" : "read";
}

StepKind step_kind_from_string(const std::string& s) {
  if (s == "write") return StepKind::kWrite;
  if (s == "read") return StepKind::kRead;
  throw ConfigError("unknown step kind '" + s + "'");
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  if (config.trials < 1 || config.steps_per_trial < 1) {
    throw ConfigError("run_bench: trials and steps must be positive");
  }
  std::vector<BenchRecord> records;
  for (int k : config.k_list) {
    if (k < 1 || config.m % k != 0) {
      throw ConfigError("run_bench: k = " + std::to_string(k) +
                        " does not divide m");
    }
    ProductConfig pc;
    pc.code_size = config.code_size;
    pc.columns_per_machine = config.m / k;
    pc.machines = k;
    pc.lambda = config.lambda;

    Rng rng(config.seed + static_cast<std::uint64_t>(k));
    ProductState state = make_product(pc, kDefaultPsi, config.sigma, rng);
    MachineWeights weights = uniform_weights(state);

    std::normal_distribution<double> normal(0.0, 1.0);
    auto next_z = [&] {
      Eigen::VectorXd z(config.code_size);
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
      return z;
    };

    for (StepKind kind : config.steps) {
      auto one_step = [&](const Eigen::VectorXd& z) {
        if (kind == StepKind::kWrite) {
          std::vector<AddressWeights> addresses =
              solve_addresses(state, z, config.threads);
          state = write_product(state, z, weights, addresses, config.threads);
        } else {
          ReadResult r = read_product(state, z, weights, config.threads);
          (void)r;
        }
      };

      std::vector<double> trial_means;
      trial_means.reserve(config.trials);
      for (int trial = 0; trial < config.trials; ++trial) {
        for (int i = 0; i < kWarmupSteps; ++i) one_step(next_z());
        const auto start = std::chrono::steady_clock::now();
        for (int i = 0; i < config.steps_per_trial; ++i) one_step(next_z());
        const auto stop = std::chrono::steady_clock::now();
        const double elapsed =
            std::chrono::duration<double>(stop - start).count();
        trial_means.push_back(elapsed / config.steps_per_trial);
      }

      BenchRecord rec;
      rec.m = config.m;
      rec.k = k;
      rec.kind = kind;
      rec.mean_seconds = median(trial_means);
      rec.std_seconds = stddev(trial_means);
      rec.trials = config.trials;
      records.push_back(rec);
    }
  }
  return records;
}

double k_opt_formula(double a, double b, double m) {
  if (b <= 0.0) return 0.0;
  if (a <= 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(3.0 * b * m * m * m / a, 0.25);
}

ScalingFit fit_scaling(const std::vector<BenchRecord>& records, double m) {
  std::vector<double> ks;
  for (const BenchRecord& r : records) {
    if (std::find(ks.begin(), ks.end(), static_cast<double>(r.k)) == ks.end()) {
      ks.push_back(static_cast<double>(r.k));
    }
  }
  if (ks.size() < 4) {
    throw InsufficientData("fit_scaling: need at least 4 distinct k values");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(records.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = static_cast<double>(records[i].k);
    design(i, 0) = 1.0;
    design(i, 1) = k;
    design(i, 2) = std::pow(m / k, 3.0);
    target(i) = records[i].mean_seconds;
  }
  Eigen::Vector3d coef = design.colPivHouseholderQr().solve(target);

  ScalingFit fit;
  fit.c = std::max(coef(0), 0.0);
  fit.a = std::max(coef(1), 0.0);
  fit.b = std::max(coef(2), 0.0);

  Eigen::VectorXd predicted =
      design * Eigen::Vector3d(fit.c, fit.a, fit.b);
  const double ss_res = (target - predicted).squaredNorm();
  const double ss_tot = (target.array() - target.mean()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot
                               : (ss_res == 0.0 ? 1.0 : 0.0);
  fit.k_opt = std::clamp(k_opt_formula(fit.a, fit.b, m), 1.0, m);
  return fit;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw ConfigError("format_double: conversion failed");
  }
  return std::string(buf, ptr);
}

std::string bench_records_to_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "m,k,kind,mean_seconds,std_seconds,trials\n";
  for (const BenchRecord& r : records) {
    out << r.m << ',' << r.k << ',' << to_string(r.kind) << ','
        << format_double(r.mean_seconds) << ',' << format_double(r.std_seconds)
        << ',' << r.trials << '\n';
  }
  return out.str();
}

std::vector<BenchRecord> bench_records_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) ||
      line != "m,k,kind,mean_seconds,std_seconds,trials") {
    throw ConfigError("bench csv: missing or wrong header");
  }
  std::vector<BenchRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 6) {
      throw ConfigError("bench csv: expected 6 fields per row");
    }
    BenchRecord r;
    r.m = static_cast<Eigen::Index>(std::stoll(fields[0]));
    r.k = std::stoi(fields[1]);
    r.kind = step_kind_from_string(fields[2]);
    r.mean_seconds = parse_double(fields[3]);
    r.std_seconds = parse_double(fields[4]);
    r.trials = std::stoi(fields[5]);
    records.push_back(r);
  }
  return records;
}

std::string scaling_fit_to_json(const ScalingFit& fit) {
  nlohmann::json j;
  j["a"] = fit.a;
  j["b"] = fit.b;
  j["c"] = fit.c;
  j["r_squared"] = fit.r_squared;
  j["k_opt"] = fit.k_opt;
  return j.dump(2);
}

ScalingFit scaling_fit_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ScalingFit fit;
  fit.a = j.at("a").get<double>();
  fit.b = j.at("b").get<double>();
  fit.c = j.at("c").get<double>();
  fit.r_squared = j.at("r_squared").get<double>();
  fit.k_opt = j.at("k_opt").get<double>();
  return fit;
}

}  // namespace pkm
