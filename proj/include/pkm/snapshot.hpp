#ifndef PKM_SNAPSHOT_HPP
#define PKM_SNAPSHOT_HPP

#include <string>

#include "pkm/product.hpp"

namespace pkm {

inline constexpr const char* kSnapshotMagic = "pkm-snapshot";
inline constexpr int kSnapshotVersion = 1;

/// Versioned JSON snapshot of a ProductState (config, every R_i, V_i, σ_i).
/// Doubles are written with shortest-round-trip formatting, so
/// load(save(state)) reproduces the state bit for bit.
std::string snapshot_to_json(const ProductState& state);
ProductState snapshot_from_json(const std::string& text);

void save_snapshot(const ProductState& state, const std::string& path);
ProductState load_snapshot(const std::string& path);

}  // namespace pkm

#endif  // PKM_SNAPSHOT_HPP
