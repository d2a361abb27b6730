#include "pkm/oracle.hpp"

#include <cmath>

namespace pkm {

JointGaussian build_joint(const ProductState& state,
                          const std::vector<AddressWeights>& addresses,
                          const Eigen::VectorXd& r) {
  const int k = state.k();
  if (static_cast<int>(addresses.size()) != k || r.size() != k) {
    throw DimensionMismatch("build_joint: addresses or r length != k");
  }
  if ((r.array() < 0.0).any()) {
    throw ConfigError("build_joint: negative exponent");
  }
  if ((r.array() > 0.0).count() == 0) {
    throw AllZeroWeights("build_joint: every r_i is zero");
  }

  JointGaussian joint;
  joint.code_rows = state.config.code_size;
  joint.prior_means.reserve(k);
  joint.prior_covs.reserve(k);

  Eigen::Index dim = 1;
  for (int i = 0; i < k; ++i) {
    joint.prior_means.push_back(state.machines[i].R);
    joint.prior_covs.push_back(state.machines[i].V);
    if (r(i) > 0.0) {
      joint.active.push_back(i);
      joint.offsets.push_back(dim);
      joint.widths.push_back(state.machines[i].columns());
      dim += state.machines[i].columns();
    }
  }
  if (dim > kOracleMaxDim) {
    throw ConfigError("build_joint: stacked dimension exceeds oracle cap");
  }

  Eigen::VectorXd sigmas(k);
  for (int i = 0; i < k; ++i) sigmas(i) = state.machines[i].sigma;
  MachineWeights weights = compute_gamma(r, sigmas);

  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(dim, dim);
  joint.row_means.resize(joint.code_rows, dim);
  joint.row_means.col(0).setZero();

  for (std::size_t a = 0; a < joint.active.size(); ++a) {
    const int i = joint.active[a];
    const Eigen::Index off = joint.offsets[a];
    const Eigen::Index mi = joint.widths[a];
    const MachineState& mach = state.machines[i];
    const Eigen::VectorXd& w = addresses[i].w;
    if (w.size() != mi) {
      throw DimensionMismatch("build_joint: address length != columns");
    }
    const double prec = r(i) / (mach.sigma * mach.sigma);  // 1/η_i²

    lambda(0, 0) += prec;
    lambda.block(0, off, 1, mi) = -prec * w.transpose();
    lambda.block(off, 0, mi, 1) = -prec * w;

    Eigen::MatrixXd vinv = solve_spd(mach.V, Eigen::MatrixXd::Identity(mi, mi));
    lambda.block(off, off, mi, mi) = vinv + prec * w * w.transpose();

    joint.row_means.col(0) += weights.gamma(i) * (mach.R * w);
    joint.row_means.block(0, off, joint.code_rows, mi) = mach.R;
  }
  joint.precision = SymMatrix(lambda);
  return joint;
}

std::vector<MachinePosterior> condition_on_observation(
    const JointGaussian& joint, const Eigen::VectorXd& z) {
  if (z.size() != joint.code_rows) {
    throw DimensionMismatch(
        "condition_on_observation: observation length != code rows");
  }
  const Eigen::Index n = joint.dim();
  const Eigen::Index nb = n - 1;

  // Conditional of the memory block given z, in precision form:
  //   cov  = Λ_bb⁻¹
  //   mean = μ_b − Λ_bb⁻¹ Λ_bz (z − μ_z)   per code row.
  SymMatrix lambda_bb(joint.precision.mat().block(1, 1, nb, nb));
  Eigen::MatrixXd l = cholesky_spd(lambda_bb);
  Eigen::MatrixXd cov = l.transpose().triangularView<Eigen::Upper>().solve(
      l.triangularView<Eigen::Lower>().solve(
          Eigen::MatrixXd::Identity(nb, nb)));
  Eigen::VectorXd lambda_bz = joint.precision.mat().block(1, 0, nb, 1);
  Eigen::VectorXd gain = l.transpose().triangularView<Eigen::Upper>().solve(
      l.triangularView<Eigen::Lower>().solve(lambda_bz));

  Eigen::MatrixXd post_means(joint.code_rows, nb);
  for (Eigen::Index row = 0; row < joint.code_rows; ++row) {
    const double innovation = z(row) - joint.row_means(row, 0);
    post_means.row(row) =
        joint.row_means.row(row).tail(nb) - innovation * gain.transpose();
  }

  std::vector<MachinePosterior> out;
  out.reserve(joint.prior_means.size());
  for (std::size_t i = 0; i < joint.prior_means.size(); ++i) {
    out.push_back({joint.prior_means[i], joint.prior_covs[i]});
  }
  for (std::size_t a = 0; a < joint.active.size(); ++a) {
    const int i = joint.active[a];
    const Eigen::Index off = joint.offsets[a] - 1;  // block coords exclude z
    const Eigen::Index mi = joint.widths[a];
    out[i].mean = post_means.block(0, off, joint.code_rows, mi);
    out[i].covariance = SymMatrix(cov.block(off, off, mi, mi));
  }
  return out;
}

Eigen::MatrixXd joint_covariance(const JointGaussian& joint) {
  return solve_spd(joint.precision,
                   Eigen::MatrixXd::Identity(joint.dim(), joint.dim()));
}

OracleCheckResult run_oracle_check(const OracleCheckConfig& config) {
  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  OracleCheckResult result;
  for (Eigen::Index c : {1, 3}) {
    for (int k : {1, 2, 3}) {
      for (Eigen::Index mi : {2, 4}) {
        for (int rep = 0; rep < config.reps_per_case; ++rep) {
          ProductState state;
          state.config.code_size = c;
          state.config.columns_per_machine = mi;
          state.config.machines = k;
          Eigen::VectorXd r(k);
          std::vector<AddressWeights> addresses(k);
          for (int i = 0; i < k; ++i) {
            MachineState mach;
            mach.R.resize(c, mi);
            for (Eigen::Index a = 0; a < c; ++a) {
              for (Eigen::Index b = 0; b < mi; ++b) mach.R(a, b) = normal(rng);
            }
            Eigen::MatrixXd g(mi, mi);
            for (Eigen::Index a = 0; a < mi; ++a) {
              for (Eigen::Index b = 0; b < mi; ++b) g(a, b) = normal(rng);
            }
            mach.V = SymMatrix(g * g.transpose() +
                               0.3 * Eigen::MatrixXd::Identity(mi, mi));
            mach.sigma = std::exp(0.6 * normal(rng) * 0.5);
            state.machines.push_back(std::move(mach));

            r(i) = 1.0 - uniform(rng);  // (0, 1]
            addresses[i].w.resize(mi);
            for (Eigen::Index a = 0; a < mi; ++a) addresses[i].w(a) = normal(rng);
          }
          Eigen::VectorXd z(c);
          for (Eigen::Index a = 0; a < c; ++a) z(a) = normal(rng);

          Eigen::VectorXd sigmas(k);
          for (int i = 0; i < k; ++i) sigmas(i) = state.machines[i].sigma;
          MachineWeights weights = compute_gamma(r, sigmas);
          ProductState updated = write_product(state, z, weights, addresses);

          JointGaussian joint = build_joint(state, addresses, r);
          std::vector<MachinePosterior> oracle =
              condition_on_observation(joint, z);

          double dev = 0.0;
          for (int i = 0; i < k; ++i) {
            dev = std::max(
                dev, (updated.machines[i].R - oracle[i].mean).cwiseAbs().maxCoeff());
            dev = std::max(dev, (updated.machines[i].V.mat() -
                                 oracle[i].covariance.mat())
                                    .cwiseAbs()
                                    .maxCoeff());
          }
          result.max_deviation = std::max(result.max_deviation, dev);
          ++result.instances;
        }
      }
    }
  }
  result.pass = result.max_deviation <= config.tolerance;
  return result;
}

}  // namespace pkm
