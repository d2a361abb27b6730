#ifndef PKM_PRODUCT_HPP
#define PKM_PRODUCT_HPP

#include <vector>

#include <Eigen/Dense>

#include "pkm/assignment.hpp"
#include "pkm/machine.hpp"

namespace pkm {

inline constexpr int kDefaultSettleIters = 12;

struct ProductConfig {
  Eigen::Index code_size = 0;           // c
  Eigen::Index columns_per_machine = 0; // mᵢ = m/k
  int machines = 1;                     // k
  double lambda = kDefaultLambda;
  int settle_iters = kDefaultSettleIters;

  Eigen::Index total_columns() const {
    return columns_per_machine * machines;
  }
};

/// k Kanerva Machines sharing one code space, combined through a
/// generalized product. Immutable value; writes return new states.
struct ProductState {
  std::vector<MachineState> machines;
  ProductConfig config;

  int k() const { return static_cast<int>(machines.size()); }
};

ProductState make_product(const ProductConfig& config, double psi, double sigma,
                          Rng& rng);

/// Per-step machine weighting: exponents r_i, effective noises
/// η_i = σ_i/√r_i (+∞ where r_i = 0), and the normalized simplex weights
/// γ_i ∝ r_i/σ_i².
struct MachineWeights {
  Eigen::VectorXd r;
  Eigen::VectorXd eta;
  Eigen::VectorXd gamma;

  int k() const { return static_cast<int>(r.size()); }
};

/// Normalize exponents into MachineWeights. Throws AllZeroWeights when
/// every r_i is zero.
MachineWeights compute_gamma(const Eigen::VectorXd& r,
                             const Eigen::VectorXd& sigmas);

MachineWeights uniform_weights(const ProductState& state);

struct ReadResult {
  Eigen::VectorXd mu_z;                     // Σ γ_i R_i w_i
  std::vector<Eigen::VectorXd> per_machine; // R_i w_i, including γ_i = 0 machines
  MachineWeights weights;
  std::vector<AddressWeights> addresses;
};

/// Solve every machine's address against its current memory mean with the
/// configured lambda. Machines are independent; `threads` > 1 splits them
/// across that many workers.
std::vector<AddressWeights> solve_addresses(const ProductState& state,
                                            const Eigen::VectorXd& z,
                                            int threads = 1);

ReadResult read_product(const ProductState& state,
                        const Eigen::VectorXd& z_query,
                        const MachineWeights& weights, int threads = 1);

/// One coupled write. The shared prediction error Δ = z − μ_z is computed
/// once from the pre-update state; afterwards each machine with r_i > 0
/// updates independently with
///   β_i = 1/(w_iᵀV_i w_i + σ_i²/r_i)
///   R_i ← R_i + β_i Δ w_iᵀ V_i
///   V_i ← V_i − β_i V_i w_i w_iᵀ V_i
/// Machines with r_i = 0 are returned unchanged.
ProductState write_product(const ProductState& state, const Eigen::VectorXd& z,
                           const MachineWeights& weights,
                           const std::vector<AddressWeights>& addresses,
                           int threads = 1, WriteStatus* status = nullptr);

struct EpisodeStep {
  MachineWeights weights;
  double delta_norm = 0.0;
};

struct WriteEpisodeResult {
  ProductState state;
  HistoryBuffer history;
  std::vector<EpisodeStep> log;
};

/// Write a whole episode: per item, evaluate the policy, solve addresses,
/// apply the coupled write, and fold (z_t, γ_t) into the history buffer.
WriteEpisodeResult write_episode(const ProductState& state,
                                 const std::vector<Eigen::VectorXd>& items,
                                 const AssignmentPolicy& policy,
                                 const HistoryBuffer& history);

/// Read-only episode sweep; the state and history are left untouched.
std::vector<ReadResult> query_episode(const ProductState& state,
                                      const std::vector<Eigen::VectorXd>& queries,
                                      const AssignmentPolicy& policy,
                                      const HistoryBuffer& history);

/// Iterate z ← read(z) so the memory settles toward a stored pattern.
/// Runs purely in latent space.
Eigen::VectorXd attractor_settle(const ProductState& state,
                                 const Eigen::VectorXd& z0, int iters,
                                 const AssignmentPolicy& policy,
                                 const HistoryBuffer& history);

/// Draw one latent from the memory: addresses w_i ~ N(0, I), machine
/// weights from the policy, combined readout, then attractor settling.
Eigen::VectorXd sample_latent(const ProductState& state,
                              const AssignmentPolicy& policy, Rng& rng,
                              int settle_iters);

}  // namespace pkm

#endif  // PKM_PRODUCT_HPP
