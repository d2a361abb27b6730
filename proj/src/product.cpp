#include "pkm/product.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "pkm/assignment.hpp"

namespace pkm {

namespace {

// Run fn(i) for i in [0, n), optionally split across workers. Results are
// written to disjoint slots, so no synchronization is needed.
template <typename Fn>
void for_each_machine(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

void check_weights(const ProductState& state, const MachineWeights& weights) {
  if (weights.k() != state.k()) {
    throw DimensionMismatch("machine weights length != machine count");
  }
}

void check_addresses(const ProductState& state,
                     const std::vector<AddressWeights>& addresses) {
  if (static_cast<int>(addresses.size()) != state.k()) {
    throw DimensionMismatch("address count != machine count");
  }
}

}  // namespace

ProductState make_product(const ProductConfig& config, double psi, double sigma,
                          Rng& rng) {
  if (config.machines < 1) {
    throw ConfigError("make_product: need at least one machine");
  }
  ProductState state;
  state.config = config;
  state.machines.reserve(config.machines);
  for (int i = 0; i < config.machines; ++i) {
    state.machines.push_back(init_prior(config.code_size,
                                        config.columns_per_machine, psi, sigma,
                                        rng));
  }
  return state;
}

MachineWeights compute_gamma(const Eigen::VectorXd& r,
                             const Eigen::VectorXd& sigmas) {
  const Eigen::Index k = r.size();
  if (sigmas.size() != k) {
    throw DimensionMismatch("compute_gamma: r and sigmas length mismatch");
  }
  if ((r.array() < 0.0).any()) {
    throw ConfigError("compute_gamma: negative exponent");
  }
  if ((sigmas.array() <= 0.0).any()) {
    throw ConfigError("compute_gamma: sigmas must be positive");
  }
  MachineWeights out;
  out.r = r;
  out.eta.resize(k);
  out.gamma.resize(k);
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (r(i) > 0.0) {
      out.eta(i) = sigmas(i) / std::sqrt(r(i));
      total += r(i) / (sigmas(i) * sigmas(i));
    } else {
      out.eta(i) = std::numeric_limits<double>::infinity();
    }
  }
  if (total <= 0.0) {
    throw AllZeroWeights("compute_gamma: every r_i is zero");
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    out.gamma(i) = r(i) > 0.0 ? (r(i) / (sigmas(i) * sigmas(i))) / total : 0.0;
  }
  return out;
}

MachineWeights uniform_weights(const ProductState& state) {
  Eigen::VectorXd sigmas(state.k());
  for (int i = 0; i < state.k(); ++i) sigmas(i) = state.machines[i].sigma;
  return compute_gamma(Eigen::VectorXd::Ones(state.k()), sigmas);
}

std::vector<AddressWeights> solve_addresses(const ProductState& state,
                                            const Eigen::VectorXd& z,
                                            int threads) {
  const int k = state.k();
  std::vector<AddressWeights> addresses(k);
  for_each_machine(k, threads, [&](int i) {
    addresses[i] = solve_address(state.machines[i], z, state.config.lambda);
  });
  return addresses;
}

ReadResult read_product(const ProductState& state,
                        const Eigen::VectorXd& z_query,
                        const MachineWeights& weights, int threads) {
  check_weights(state, weights);
  ReadResult out;
  out.weights = weights;
  out.addresses = solve_addresses(state, z_query, threads);
  out.per_machine.resize(state.k());
  for (int i = 0; i < state.k(); ++i) {
    out.per_machine[i] = state.machines[i].R * out.addresses[i].w;
  }
  out.mu_z = Eigen::VectorXd::Zero(state.config.code_size);
  for (int i = 0; i < state.k(); ++i) {
    if (weights.gamma(i) > 0.0) {
      out.mu_z += weights.gamma(i) * out.per_machine[i];
    }
  }
  return out;
}

ProductState write_product(const ProductState& state, const Eigen::VectorXd& z,
                           const MachineWeights& weights,
                           const std::vector<AddressWeights>& addresses,
                           int threads, WriteStatus* status) {
  check_weights(state, weights);
  check_addresses(state, addresses);
  if (z.size() != state.config.code_size) {
    throw DimensionMismatch("write_product: observation length != code size");
  }
  if ((weights.r.array() <= 0.0).all()) {
    throw AllZeroWeights("write_product: every r_i is zero");
  }

  // Phase 1: shared prediction error from the pre-update state.
  Eigen::VectorXd mu_z = Eigen::VectorXd::Zero(state.config.code_size);
  for (int i = 0; i < state.k(); ++i) {
    if (weights.gamma(i) > 0.0) {
      mu_z += weights.gamma(i) * (state.machines[i].R * addresses[i].w);
    }
  }
  const Eigen::VectorXd delta = z - mu_z;

  // Phase 2: independent per-machine updates.
  ProductState out;
  out.config = state.config;
  out.machines.resize(state.k());
  std::vector<unsigned char> degenerate(state.k(), 0);
  for_each_machine(state.k(), threads, [&](int i) {
    const MachineState& mach = state.machines[i];
    if (weights.r(i) <= 0.0) {
      out.machines[i] = mach;
      return;
    }
    const Eigen::VectorXd& w = addresses[i].w;
    const Eigen::VectorXd vw = mach.V.mat() * w;
    const double eta2 = weights.eta(i) * weights.eta(i);
    const double denom = w.dot(vw) + eta2;
    if (denom < kDegenerateFloor) {
      degenerate[i] = 1;
      out.machines[i] = mach;
      return;
    }
    const double beta = 1.0 / denom;
    MachineState next;
    next.R = mach.R + beta * delta * vw.transpose();
    next.V = SymMatrix(mach.V.mat() - beta * vw * vw.transpose());
    next.sigma = mach.sigma;
    out.machines[i] = std::move(next);
  });
  if (status != nullptr) {
    for (int i = 0; i < state.k(); ++i) {
      if (degenerate[i]) status->degenerate = true;
    }
  }
  return out;
}

WriteEpisodeResult write_episode(const ProductState& state,
                                 const std::vector<Eigen::VectorXd>& items,
                                 const AssignmentPolicy& policy,
                                 const HistoryBuffer& history) {
  WriteEpisodeResult result{state, history, {}};
  result.log.reserve(items.size());
  for (const Eigen::VectorXd& z : items) {
    MachineWeights weights =
        policy_evaluate(policy, result.state, z, result.history);
    std::vector<AddressWeights> addresses = solve_addresses(result.state, z);

    Eigen::VectorXd mu_z = Eigen::VectorXd::Zero(result.state.config.code_size);
    for (int i = 0; i < result.state.k(); ++i) {
      if (weights.gamma(i) > 0.0) {
        mu_z += weights.gamma(i) * (result.state.machines[i].R * addresses[i].w);
      }
    }
    result.log.push_back({weights, (z - mu_z).norm()});

    result.state = write_product(result.state, z, weights, addresses);
    result.history = history_update(result.history, z, weights.gamma);
  }
  return result;
}

std::vector<ReadResult> query_episode(const ProductState& state,
                                      const std::vector<Eigen::VectorXd>& queries,
                                      const AssignmentPolicy& policy,
                                      const HistoryBuffer& history) {
  std::vector<ReadResult> results;
  results.reserve(queries.size());
  for (const Eigen::VectorXd& z : queries) {
    MachineWeights weights = policy_evaluate(policy, state, z, history);
    results.push_back(read_product(state, z, weights));
  }
  return results;
}

Eigen::VectorXd attractor_settle(const ProductState& state,
                                 const Eigen::VectorXd& z0, int iters,
                                 const AssignmentPolicy& policy,
                                 const HistoryBuffer& history) {
  if (iters < 0) {
    throw ConfigError("attractor_settle: negative iteration count");
  }
  Eigen::VectorXd z = z0;
  for (int it = 0; it < iters; ++it) {
    MachineWeights weights = policy_evaluate(policy, state, z, history);
    z = read_product(state, z, weights).mu_z;
  }
  return z;
}

Eigen::VectorXd sample_latent(const ProductState& state,
                              const AssignmentPolicy& policy, Rng& rng,
                              int settle_iters) {
  HistoryBuffer history =
      make_history(state.config.code_size, state.k());
  // Policies stand in for the generative prior on r; conditioning input is
  // the zero latent since no observation exists yet.
  MachineWeights weights = policy_evaluate(
      policy, state, Eigen::VectorXd::Zero(state.config.code_size), history);

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd mu_z = Eigen::VectorXd::Zero(state.config.code_size);
  for (int i = 0; i < state.k(); ++i) {
    Eigen::VectorXd w(state.machines[i].columns());
    for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = normal(rng);
    if (weights.gamma(i) > 0.0) {
      mu_z += weights.gamma(i) * (state.machines[i].R * w);
    }
  }
  return attractor_settle(state, mu_z, settle_iters, policy, history);
}

}  // namespace pkm
