#include "pkm/episodes.hpp"

#include <cmath>

namespace pkm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

ProductConfig experiment_config(Eigen::Index m, int k, Eigen::Index code_size,
                                double lambda) {
  if (k < 1 || m % k != 0) {
    throw ConfigError("episode experiment: k must divide m");
  }
  ProductConfig config;
  config.code_size = code_size;
  config.columns_per_machine = m / k;
  config.machines = k;
  config.lambda = lambda;
  return config;
}

}  // namespace

Episode gen_random_episode(int T, Eigen::Index code_size, std::uint64_t seed) {
  if (T < 0 || code_size < 1) {
    throw ConfigError("gen_random_episode: invalid T or code size");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Episode episode;
  episode.generator = "random";
  episode.seed = seed;
  episode.items.reserve(T);
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd z(code_size);
    for (Eigen::Index i = 0; i < code_size; ++i) z(i) = normal(rng);
    episode.items.push_back(std::move(z));
  }
  return episode;
}

BindingEpisode gen_binding_episode(int T, Eigen::Index code_size, int channels,
                                   std::uint64_t seed) {
  if (channels < 1) {
    throw ConfigError("gen_binding_episode: channels must be positive");
  }
  if (code_size % channels != 0) {
    throw IndivisibleCode("gen_binding_episode: code size not divisible");
  }
  BindingEpisode out;
  out.items = gen_random_episode(T, code_size, seed);
  out.items.generator = "binding";
  out.channels = channels;
  out.masked_channel = channels / 2;

  const Eigen::Index width = code_size / channels;
  out.queries.generator = "binding-query";
  out.queries.seed = seed;
  out.queries.items.reserve(T);
  for (const Eigen::VectorXd& item : out.items.items) {
    Eigen::VectorXd q = item;
    q.segment(out.masked_channel * width, width).setZero();
    out.queries.items.push_back(std::move(q));
  }
  return out;
}

std::vector<CapacityRow> capacity_curve(Eigen::Index m, int k,
                                        Eigen::Index code_size,
                                        const std::vector<int>& T_values,
                                        const AssignmentPolicy& policy,
                                        double lambda, int trials,
                                        std::uint64_t seed, double sigma,
                                        double psi) {
  if (T_values.empty()) {
    throw ConfigError("capacity_curve: empty T list");
  }
  if (trials < 1) {
    throw ConfigError("capacity_curve: trials must be positive");
  }
  const ProductConfig config = experiment_config(m, k, code_size, lambda);

  std::vector<CapacityRow> rows;
  rows.reserve(T_values.size());
  for (std::size_t ti = 0; ti < T_values.size(); ++ti) {
    const int T = T_values[ti];
    double mse_sum = 0.0;
    double cos_sum = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t s =
          trial_seed(seed, ti * static_cast<std::uint64_t>(trials) + trial);
      Rng rng(s);
      ProductState state = make_product(config, psi, sigma, rng);
      Episode episode = gen_random_episode(T, code_size, splitmix64(s));

      HistoryBuffer history = make_history(code_size, k);
      WriteEpisodeResult written =
          write_episode(state, episode.items, policy, history);

      double mse = 0.0;
      double cos = 0.0;
      for (const Eigen::VectorXd& z : episode.items) {
        MachineWeights weights =
            policy_evaluate(policy, written.state, z, written.history);
        ReadResult read = read_product(written.state, z, weights);
        mse += (read.mu_z - z).squaredNorm() / static_cast<double>(code_size);
        cos += cosine_similarity(read.mu_z, z);
      }
      if (T > 0) {
        mse_sum += mse / T;
        cos_sum += cos / T;
      }
    }
    rows.push_back({T, mse_sum / trials, cos_sum / trials});
  }
  return rows;
}

std::vector<BindingRow> binding_curve(Eigen::Index m, int k,
                                      Eigen::Index code_size, int channels,
                                      const std::vector<int>& T_values,
                                      const AssignmentPolicy& policy,
                                      double lambda, int trials,
                                      std::uint64_t seed, double sigma,
                                      double psi) {
  if (T_values.empty()) {
    throw ConfigError("binding_curve: empty T list");
  }
  const ProductConfig config = experiment_config(m, k, code_size, lambda);
  const Eigen::Index width = code_size / channels;

  std::vector<BindingRow> rows;
  rows.reserve(T_values.size());
  for (std::size_t ti = 0; ti < T_values.size(); ++ti) {
    const int T = T_values[ti];
    double cos_sum = 0.0;
    double mse_sum = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t s =
          trial_seed(seed, 0x8000000000000000ULL ^
                               (ti * static_cast<std::uint64_t>(trials) + trial));
      Rng rng(s);
      ProductState state = make_product(config, psi, sigma, rng);
      BindingEpisode binding =
          gen_binding_episode(T, code_size, channels, splitmix64(s));

      HistoryBuffer history = make_history(code_size, k);
      WriteEpisodeResult written =
          write_episode(state, binding.items.items, policy, history);

      const Eigen::Index mask_off = binding.masked_channel * width;
      double cos = 0.0;
      double mse = 0.0;
      for (int t = 0; t < T; ++t) {
        const Eigen::VectorXd& query = binding.queries.items[t];
        const Eigen::VectorXd& truth = binding.items.items[t];
        MachineWeights weights =
            policy_evaluate(policy, written.state, query, written.history);
        ReadResult read = read_product(written.state, query, weights);
        cos += cosine_similarity(read.mu_z.segment(mask_off, width),
                                 truth.segment(mask_off, width));
        mse += (read.mu_z - truth).squaredNorm() /
               static_cast<double>(code_size);
      }
      if (T > 0) {
        cos_sum += cos / T;
        mse_sum += mse / T;
      }
    }
    rows.push_back({T, cos_sum / trials, mse_sum / trials});
  }
  return rows;
}

}  // namespace pkm
