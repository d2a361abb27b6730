#include "pkm/mixture.hpp"

#include <cmath>

namespace pkm {

OneHotAssignment sample_assignment(const Eigen::VectorXd& gamma, Rng& rng) {
  const int k = static_cast<int>(gamma.size());
  if (k < 1) {
    throw InvalidSimplex("sample_assignment: empty gamma");
  }
  if ((gamma.array() < 0.0).any() || std::abs(gamma.sum() - 1.0) > 1e-9) {
    throw InvalidSimplex("sample_assignment: gamma is not on the simplex");
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double cumulative = 0.0;
  int last_positive = 0;
  for (int i = 0; i < k; ++i) {
    if (gamma(i) > 0.0) last_positive = i;
    cumulative += gamma(i);
    if (u < cumulative) return {i, k};
  }
  return {last_positive, k};  // round-off spill lands on the last support point
}

ProductState write_mixture(const ProductState& state, const Eigen::VectorXd& z,
                           const OneHotAssignment& assignment,
                           const std::vector<AddressWeights>& addresses,
                           WriteStatus* status) {
  if (assignment.index < 0 || assignment.index >= state.k()) {
    throw DimensionMismatch("write_mixture: assignment index out of range");
  }
  if (static_cast<int>(addresses.size()) != state.k()) {
    throw DimensionMismatch("write_mixture: address count != machine count");
  }
  ProductState out = state;
  out.machines[assignment.index] =
      write_single(state.machines[assignment.index], z,
                   addresses[assignment.index], status);
  return out;
}

Eigen::VectorXd read_mixture(const ProductState& state,
                             const Eigen::VectorXd& z_query,
                             const OneHotAssignment& assignment) {
  if (assignment.index < 0 || assignment.index >= state.k()) {
    throw DimensionMismatch("read_mixture: assignment index out of range");
  }
  const MachineState& mach = state.machines[assignment.index];
  AddressWeights addr = solve_address(mach, z_query, state.config.lambda);
  return mach.R * addr.w;
}

}  // namespace pkm
