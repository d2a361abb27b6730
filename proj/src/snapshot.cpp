#include "pkm/snapshot.hpp"

#include <fstream>

#include <json.hpp>

namespace pkm {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j.at(i).size()) != cols) {
      throw ConfigError("snapshot: ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = j.at(i).at(c).get<double>();
    }
  }
  return m;
}

}  // namespace

std::string snapshot_to_json(const ProductState& state) {
  nlohmann::json j;
  j["magic"] = kSnapshotMagic;
  j["version"] = kSnapshotVersion;
  j["config"] = {
      {"code_size", state.config.code_size},
      {"columns_per_machine", state.config.columns_per_machine},
      {"machines", state.config.machines},
      {"lambda", state.config.lambda},
      {"settle_iters", state.config.settle_iters},
  };
  nlohmann::json machines = nlohmann::json::array();
  for (const MachineState& m : state.machines) {
    machines.push_back({{"sigma", m.sigma},
                        {"R", matrix_to_json(m.R)},
                        {"V", matrix_to_json(m.V.mat())}});
  }
  j["machines"] = std::move(machines);
  return j.dump(2);
}

ProductState snapshot_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("magic") || j.at("magic").get<std::string>() != kSnapshotMagic) {
    throw ConfigError("snapshot: bad magic header");
  }
  if (j.at("version").get<int>() != kSnapshotVersion) {
    throw ConfigError("snapshot: unsupported version");
  }
  ProductState state;
  const nlohmann::json& cfg = j.at("config");
  state.config.code_size = cfg.at("code_size").get<Eigen::Index>();
  state.config.columns_per_machine =
      cfg.at("columns_per_machine").get<Eigen::Index>();
  state.config.machines = cfg.at("machines").get<int>();
  state.config.lambda = cfg.at("lambda").get<double>();
  state.config.settle_iters = cfg.at("settle_iters").get<int>();

  for (const nlohmann::json& jm : j.at("machines")) {
    MachineState m;
    m.sigma = jm.at("sigma").get<double>();
    m.R = matrix_from_json(jm.at("R"));
    m.V = SymMatrix(matrix_from_json(jm.at("V")));
    state.machines.push_back(std::move(m));
  }
  if (state.k() != state.config.machines) {
    throw ConfigError("snapshot: machine count does not match config");
  }
  return state;
}

void save_snapshot(const ProductState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("save_snapshot: cannot open '" + path + "'");
  }
  out << snapshot_to_json(state) << '\n';
}

ProductState load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("load_snapshot: cannot open '" + path + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return snapshot_from_json(text);
}

}  // namespace pkm
