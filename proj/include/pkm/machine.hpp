#ifndef PKM_MACHINE_HPP
#define PKM_MACHINE_HPP

#include <random>

#include <Eigen/Dense>

#include "pkm/numerics.hpp"

namespace pkm {

using Rng = std::mt19937_64;

inline constexpr double kDefaultPsi = 1.0;
inline constexpr double kDefaultSigma = 1.0;
inline constexpr double kDefaultSampleStd = 0.3;

/// Predictive-variance floor below which a write is skipped instead of
/// dividing by a collapsed denominator.
inline constexpr double kDegenerateFloor = 1e-12;

/// One Kanerva Machine: a matrix-normal belief N(R, V ⊗ I) over the memory
/// matrix plus its observation noise. Values are immutable; writes return
/// new states.
struct MachineState {
  Eigen::MatrixXd R;   // memory mean, code_size × columns
  SymMatrix V;         // column covariance, columns × columns
  double sigma = kDefaultSigma;

  Eigen::Index code_size() const { return R.rows(); }
  Eigen::Index columns() const { return R.cols(); }
};

/// Column weights addressing one machine.
struct AddressWeights {
  enum class Source { kMean, kSampled };

  Eigen::VectorXd w;
  Source source = Source::kMean;
  double sample_std = kDefaultSampleStd;  // χ, only meaningful when sampled
};

/// Fresh prior state: R entries i.i.d. standard normal, V = psi·I.
MachineState init_prior(Eigen::Index code_size, Eigen::Index columns,
                        double psi, double sigma, Rng& rng);

/// Deterministic address: the regularized least-squares solution against
/// the memory mean.
AddressWeights solve_address(const MachineState& state,
                             const Eigen::VectorXd& z, double lambda);

/// Address with i.i.d. N(0, sample_std²) noise added to the LS mean.
AddressWeights solve_address_sampled(const MachineState& state,
                                     const Eigen::VectorXd& z, double lambda,
                                     double sample_std, Rng& rng);

struct ReadSingle {
  Eigen::VectorXd mean;     // R·w
  double predictive_var;    // wᵀVw + σ², isotropic over code dimensions
};

ReadSingle read_single(const MachineState& state, const AddressWeights& addr);

/// Reports writes that were skipped because the predictive variance
/// denominator collapsed below kDegenerateFloor.
struct WriteStatus {
  bool degenerate = false;
};

/// Posterior update after observing z at address w:
///   β  = 1/(wᵀVw + σ²)
///   R' = R + (z − Rw)·β·wᵀV
///   V' = V − β·Vw·wᵀV        (re-symmetrized)
MachineState write_single(const MachineState& state, const Eigen::VectorXd& z,
                          const AddressWeights& addr,
                          WriteStatus* status = nullptr);

}  // namespace pkm

#endif  // PKM_MACHINE_HPP
