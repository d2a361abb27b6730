#ifndef PKM_ORACLE_HPP
#define PKM_ORACLE_HPP

#include <vector>

#include "pkm/product.hpp"

namespace pkm {

/// Largest stacked dimension (1 + Σ mᵢ) the oracle accepts per code row.
/// It deliberately trades speed for clarity, so instances stay desk sized.
inline constexpr Eigen::Index kOracleMaxDim = 64;

/// Exact joint Gaussian over the stacked coordinates (z, M₁ row, …, M_k row)
/// of one code row, shared across the c independent rows. Machines with
/// r_i = 0 contribute nothing and are carried alongside for pass-through.
struct JointGaussian {
  // Row ℓ of `row_means` stacks (μ_z(ℓ), R_i rows…) for the active machines.
  Eigen::MatrixXd row_means;   // code_rows × dim
  SymMatrix precision;         // dim × dim, shared across code rows
  Eigen::Index code_rows = 0;

  std::vector<int> active;             // machine indices with r_i > 0
  std::vector<Eigen::Index> offsets;   // column offset of each active block
  std::vector<Eigen::Index> widths;    // mᵢ of each active block

  // Prior (R_i, V_i) per machine, used for r_i = 0 pass-through.
  std::vector<Eigen::MatrixXd> prior_means;
  std::vector<SymMatrix> prior_covs;

  Eigen::Index dim() const { return precision.dim(); }
};

/// Assemble the joint precision and mean. Per active machine the blocks are
///   Λ_z      += r_i/σ_i²
///   Λ_{c_i}   = −(r_i/σ_i²)·w_i
///   Λ_{M_i}   = V_i⁻¹ + (r_i/σ_i²)·w_i w_iᵀ
/// so each machine enters as a single Kanerva Machine whose observation
/// noise is the effective η_i² = σ_i²/r_i.
JointGaussian build_joint(const ProductState& state,
                          const std::vector<AddressWeights>& addresses,
                          const Eigen::VectorXd& r);

struct MachinePosterior {
  Eigen::MatrixXd mean;   // code_rows × mᵢ
  SymMatrix covariance;   // mᵢ × mᵢ
};

/// Condition the stacked Gaussian on the observed z (one scalar per code
/// row) by dense Cholesky of the z-block complement, then extract each
/// machine's marginal. Machines excluded from the joint pass through
/// with their prior.
std::vector<MachinePosterior> condition_on_observation(
    const JointGaussian& joint, const Eigen::VectorXd& z);

/// Dense covariance Λ⁻¹ of the joint (diagnostics; exposes the
/// cross-machine correlations the factored state never represents).
Eigen::MatrixXd joint_covariance(const JointGaussian& joint);

struct OracleCheckConfig {
  int reps_per_case = 9;   // cases: c∈{1,3} × k∈{1,2,3} × mᵢ∈{2,4}
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
};

struct OracleCheckResult {
  int instances = 0;
  double max_deviation = 0.0;
  bool pass = false;
};

/// Random-instance sweep comparing one write_product step against exact
/// joint-Gaussian conditioning, elementwise over every machine's posterior
/// mean and covariance.
OracleCheckResult run_oracle_check(const OracleCheckConfig& config);

}  // namespace pkm

#endif  // PKM_ORACLE_HPP
