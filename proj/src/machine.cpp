#include "pkm/machine.hpp"

namespace pkm {

MachineState init_prior(Eigen::Index code_size, Eigen::Index columns,
                        double psi, double sigma, Rng& rng) {
  if (code_size <= 0 || columns <= 0) {
    throw ConfigError("init_prior: dimensions must be positive");
  }
  if (psi <= 0.0 || sigma <= 0.0) {
    throw ConfigError("init_prior: psi and sigma must be positive");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  MachineState state;
  state.R.resize(code_size, columns);
  for (Eigen::Index i = 0; i < code_size; ++i) {
    for (Eigen::Index j = 0; j < columns; ++j) {
      state.R(i, j) = normal(rng);
    }
  }
  state.V = SymMatrix::Identity(columns, psi);
  state.sigma = sigma;
  return state;
}

AddressWeights solve_address(const MachineState& state,
                             const Eigen::VectorXd& z, double lambda) {
  if (z.size() != state.code_size()) {
    throw DimensionMismatch("solve_address: query length != code size");
  }
  AddressWeights addr;
  addr.w = solve_regularized_ls(state.R, z, lambda);
  addr.source = AddressWeights::Source::kMean;
  return addr;
}

AddressWeights solve_address_sampled(const MachineState& state,
                                     const Eigen::VectorXd& z, double lambda,
                                     double sample_std, Rng& rng) {
  if (sample_std < 0.0) {
    throw ConfigError("solve_address_sampled: negative sample_std");
  }
  AddressWeights addr = solve_address(state, z, lambda);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Eigen::Index i = 0; i < addr.w.size(); ++i) {
    addr.w(i) += sample_std * noise(rng);
  }
  addr.source = AddressWeights::Source::kSampled;
  addr.sample_std = sample_std;
  return addr;
}

ReadSingle read_single(const MachineState& state, const AddressWeights& addr) {
  if (addr.w.size() != state.columns()) {
    throw DimensionMismatch("read_single: address length != columns");
  }
  ReadSingle out;
  out.mean = state.R * addr.w;
  out.predictive_var =
      addr.w.dot(state.V.mat() * addr.w) + state.sigma * state.sigma;
  return out;
}

MachineState write_single(const MachineState& state, const Eigen::VectorXd& z,
                          const AddressWeights& addr, WriteStatus* status) {
  if (z.size() != state.code_size()) {
    throw DimensionMismatch("write_single: observation length != code size");
  }
  if (addr.w.size() != state.columns()) {
    throw DimensionMismatch("write_single: address length != columns");
  }
  const Eigen::VectorXd vw = state.V.mat() * addr.w;
  const double denom = addr.w.dot(vw) + state.sigma * state.sigma;
  if (denom < kDegenerateFloor) {
    if (status != nullptr) status->degenerate = true;
    return state;
  }
  const double beta = 1.0 / denom;
  const Eigen::VectorXd delta = z - state.R * addr.w;

  MachineState out;
  out.R = state.R + beta * delta * vw.transpose();
  out.V = SymMatrix(state.V.mat() - beta * vw * vw.transpose());
  out.sigma = state.sigma;
  return out;
}

}  // namespace pkm
