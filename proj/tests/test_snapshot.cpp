#include "pkm/snapshot.hpp"

#include <cstdio>

#include <gtest/gtest.h>

namespace pkm {
namespace {

ProductState written_state(std::uint64_t seed) {
  ProductConfig config;
  config.code_size = 4;
  config.columns_per_machine = 3;
  config.machines = 2;
  config.lambda = 0.2;
  Rng rng(seed);
  ProductState state = make_product(config, 1.0, 0.7, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  MachineWeights w = uniform_weights(state);
  for (int t = 0; t < 4; ++t) {
    Eigen::VectorXd z(4);
    for (int i = 0; i < 4; ++i) z(i) = normal(rng);
    state = write_product(state, z, w, solve_addresses(state, z));
  }
  return state;
}

TEST(Snapshot, JsonRoundTripIsBitExact) {
  ProductState state = written_state(17);
  ProductState loaded = snapshot_from_json(snapshot_to_json(state));
  ASSERT_EQ(loaded.k(), state.k());
  EXPECT_EQ(loaded.config.code_size, state.config.code_size);
  EXPECT_EQ(loaded.config.columns_per_machine,
            state.config.columns_per_machine);
  EXPECT_EQ(loaded.config.lambda, state.config.lambda);
  EXPECT_EQ(loaded.config.settle_iters, state.config.settle_iters);
  for (int i = 0; i < state.k(); ++i) {
    EXPECT_TRUE(loaded.machines[i].R == state.machines[i].R);
    EXPECT_TRUE(loaded.machines[i].V.mat() == state.machines[i].V.mat());
    EXPECT_EQ(loaded.machines[i].sigma, state.machines[i].sigma);
  }
}

TEST(Snapshot, FileRoundTrip) {
  ProductState state = written_state(23);
  const std::string path = ::testing::TempDir() + "/pkm_snapshot_test.json";
  save_snapshot(state, path);
  ProductState loaded = load_snapshot(path);
  for (int i = 0; i < state.k(); ++i) {
    EXPECT_TRUE(loaded.machines[i].R == state.machines[i].R);
  }
  std::remove(path.c_str());
}

TEST(Snapshot, RejectsBadMagicAndVersion) {
  ProductState state = written_state(5);
  std::string text = snapshot_to_json(state);
  std::string bad_magic = text;
  bad_magic.replace(bad_magic.find("pkm-snapshot"), 12, "not-snapshot");
  EXPECT_THROW(snapshot_from_json(bad_magic), ConfigError);

  std::string bad_version = text;
  bad_version.replace(bad_version.find("\"version\": 1"), 12, "\"version\": 9");
  EXPECT_THROW(snapshot_from_json(bad_version), ConfigError);

  EXPECT_THROW(load_snapshot("/nonexistent/path.json"), ConfigError);
}

}  // namespace
}  // namespace pkm
