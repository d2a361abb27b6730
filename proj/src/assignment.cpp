#include "pkm/assignment.hpp"

#include <cmath>

#include "pkm/product.hpp"

namespace pkm {

HistoryBuffer make_history(Eigen::Index code_size, int k) {
  HistoryBuffer h;
  h.omega = Eigen::VectorXd::Zero(code_size + k);
  h.steps = 0;
  return h;
}

HistoryBuffer history_update(const HistoryBuffer& history,
                             const Eigen::VectorXd& z,
                             const Eigen::VectorXd& gamma) {
  if (history.omega.size() != z.size() + gamma.size()) {
    throw DimensionMismatch("history_update: omega dimension mismatch");
  }
  Eigen::VectorXd embedded(history.omega.size());
  embedded << z, gamma;

  HistoryBuffer out;
  const double t_next = static_cast<double>(history.steps + 1);
  out.omega = embedded / t_next +
              (static_cast<double>(history.steps) / t_next) * history.omega;
  out.steps = history.steps + 1;
  return out;
}

AssignmentPolicy AssignmentPolicy::Uniform() { return {}; }

AssignmentPolicy AssignmentPolicy::Fixed(Eigen::VectorXd r) {
  if ((r.array() < 0.0).any() || (r.array() > 0.0).count() == 0) {
    throw ConfigError("AssignmentPolicy::Fixed: r needs a positive entry");
  }
  AssignmentPolicy p;
  p.kind = Kind::kFixed;
  p.fixed_r = std::move(r);
  return p;
}

AssignmentPolicy AssignmentPolicy::ResidualSoftmax(double tau) {
  if (tau <= 0.0) {
    throw ConfigError("AssignmentPolicy::ResidualSoftmax: tau must be > 0");
  }
  AssignmentPolicy p;
  p.kind = Kind::kResidualSoftmax;
  p.tau = tau;
  return p;
}

AssignmentPolicy AssignmentPolicy::Categorical(Eigen::VectorXd gamma) {
  if ((gamma.array() < 0.0).any() ||
      std::abs(gamma.sum() - 1.0) > 1e-9) {
    throw InvalidSimplex("AssignmentPolicy::Categorical: not a simplex");
  }
  AssignmentPolicy p;
  p.kind = Kind::kCategorical;
  p.categorical_gamma = std::move(gamma);
  return p;
}

MachineWeights policy_evaluate(const AssignmentPolicy& policy,
                               const ProductState& state,
                               const Eigen::VectorXd& z,
                               const HistoryBuffer& /*history*/) {
  const int k = state.k();
  Eigen::VectorXd sigmas(k);
  for (int i = 0; i < k; ++i) sigmas(i) = state.machines[i].sigma;

  switch (policy.kind) {
    case AssignmentPolicy::Kind::kUniform:
      return compute_gamma(Eigen::VectorXd::Ones(k), sigmas);

    case AssignmentPolicy::Kind::kFixed:
      if (policy.fixed_r.size() != k) {
        throw DimensionMismatch("policy_evaluate: fixed r length != k");
      }
      return compute_gamma(policy.fixed_r, sigmas);

    case AssignmentPolicy::Kind::kResidualSoftmax: {
      if (z.size() != state.config.code_size) {
        throw DimensionMismatch("policy_evaluate: query length != code size");
      }
      Eigen::VectorXd logits(k);
      for (int i = 0; i < k; ++i) {
        AddressWeights addr =
            solve_address(state.machines[i], z, state.config.lambda);
        logits(i) = -(z - state.machines[i].R * addr.w).squaredNorm() /
                    policy.tau;
      }
      Eigen::VectorXd r = (logits.array() - logits.maxCoeff()).exp();
      r /= r.sum();
      return compute_gamma(r, sigmas);
    }

    case AssignmentPolicy::Kind::kCategorical: {
      if (policy.categorical_gamma.size() != k) {
        throw DimensionMismatch("policy_evaluate: gamma length != k");
      }
      // Pre-scaling by σ² makes compute_gamma reproduce the stored γ
      // exactly, whatever the machine noises are.
      Eigen::VectorXd r =
          policy.categorical_gamma.array() * sigmas.array().square();
      return compute_gamma(r, sigmas);
    }
  }
  throw ConfigError("policy_evaluate: unknown policy kind");
}

}  // namespace pkm
