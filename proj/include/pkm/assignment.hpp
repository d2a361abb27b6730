#ifndef PKM_ASSIGNMENT_HPP
#define PKM_ASSIGNMENT_HPP

#include <Eigen/Dense>

#include "pkm/errors.hpp"

namespace pkm {

struct ProductState;
struct MachineWeights;

inline constexpr double kDefaultTau = 1.0;

/// Running superposition of embedded (z, γ) pairs. With the identity
/// embedding, omega after T updates is the arithmetic mean of the T
/// concatenated inputs.
struct HistoryBuffer {
  Eigen::VectorXd omega;  // dimension code_size + k
  long steps = 0;
};

HistoryBuffer make_history(Eigen::Index code_size, int k);

/// omega' = (1/t')·[z, gamma] + (t/t')·omega with t' = t + 1.
HistoryBuffer history_update(const HistoryBuffer& history,
                             const Eigen::VectorXd& z,
                             const Eigen::VectorXd& gamma);

/// Machine-weight policies standing in for a learned assignment network.
struct AssignmentPolicy {
  enum class Kind { kUniform, kFixed, kResidualSoftmax, kCategorical };

  Kind kind = Kind::kUniform;
  Eigen::VectorXd fixed_r;             // kFixed
  Eigen::VectorXd categorical_gamma;   // kCategorical
  double tau = kDefaultTau;            // kResidualSoftmax temperature

  static AssignmentPolicy Uniform();
  static AssignmentPolicy Fixed(Eigen::VectorXd r);
  static AssignmentPolicy ResidualSoftmax(double tau = kDefaultTau);
  static AssignmentPolicy Categorical(Eigen::VectorXd gamma);
};

/// Evaluate a policy into MachineWeights:
///   uniform          r = all ones
///   fixed            the stored r
///   residual_softmax r_i = softmax(−‖z − R_i w_i‖²/τ) over LS addresses
///   categorical      the stored γ passed through unchanged
MachineWeights policy_evaluate(const AssignmentPolicy& policy,
                               const ProductState& state,
                               const Eigen::VectorXd& z,
                               const HistoryBuffer& history);

}  // namespace pkm

#endif  // PKM_ASSIGNMENT_HPP
