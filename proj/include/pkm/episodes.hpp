#ifndef PKM_EPISODES_HPP
#define PKM_EPISODES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pkm/assignment.hpp"
#include "pkm/product.hpp"

namespace pkm {

inline constexpr int kDefaultTrials = 20;

/// A synthetic latent-space episode.
struct Episode {
  std::vector<Eigen::VectorXd> items;
  std::string generator;
  std::uint64_t seed = 0;

  int length() const { return static_cast<int>(items.size()); }
};

/// T i.i.d. standard-normal latent vectors, deterministic per seed.
Episode gen_random_episode(int T, Eigen::Index code_size, std::uint64_t seed);

/// Binding episode: each item concatenates `channels` independent
/// sub-vectors; each query is its item with the masked channel zeroed.
struct BindingEpisode {
  Episode items;
  Episode queries;
  int masked_channel = 0;
  int channels = 3;
};

BindingEpisode gen_binding_episode(int T, Eigen::Index code_size, int channels,
                                   std::uint64_t seed);

struct CapacityRow {
  int T = 0;
  double mse = 0.0;      // mean over items of ‖μ_z − z‖²/c, then over trials
  double cosine = 0.0;   // mean cosine similarity of μ_z and z
};

/// Store/recall sweep: for each T write a fresh random episode, query every
/// stored item, and average reconstruction error over `trials` independent
/// runs. Trial seeds are derived deterministically from `seed`.
std::vector<CapacityRow> capacity_curve(Eigen::Index m, int k,
                                        Eigen::Index code_size,
                                        const std::vector<int>& T_values,
                                        const AssignmentPolicy& policy,
                                        double lambda, int trials,
                                        std::uint64_t seed,
                                        double sigma = kDefaultSigma,
                                        double psi = kDefaultPsi);

struct BindingRow {
  int T = 0;
  double masked_cosine = 0.0;  // masked-channel readout vs the true sub-vector
  double full_mse = 0.0;
};

/// Pattern-completion sweep over the binding task.
std::vector<BindingRow> binding_curve(Eigen::Index m, int k,
                                      Eigen::Index code_size, int channels,
                                      const std::vector<int>& T_values,
                                      const AssignmentPolicy& policy,
                                      double lambda, int trials,
                                      std::uint64_t seed,
                                      double sigma = kDefaultSigma,
                                      double psi = kDefaultPsi);

}  // namespace pkm

#endif  // PKM_EPISODES_HPP
