#ifndef PKM_MIXTURE_HPP
#define PKM_MIXTURE_HPP

#include "pkm/product.hpp"

namespace pkm {

/// Hard one-hot machine selection γ̂.
struct OneHotAssignment {
  int index = 0;
  int k = 1;

  Eigen::VectorXd as_vector() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
    v(index) = 1.0;
    return v;
  }
};

/// Draw an index from the categorical distribution γ. Throws InvalidSimplex
/// if γ has negative entries or does not sum to 1 within 1e−9.
OneHotAssignment sample_assignment(const Eigen::VectorXd& gamma, Rng& rng);

/// Gated write: the selected machine applies the single-machine posterior
/// update with its own prediction error z − R_i w_i; every other machine is
/// returned bitwise unchanged.
ProductState write_mixture(const ProductState& state, const Eigen::VectorXd& z,
                           const OneHotAssignment& assignment,
                           const std::vector<AddressWeights>& addresses,
                           WriteStatus* status = nullptr);

/// Readout of the selected machine only.
Eigen::VectorXd read_mixture(const ProductState& state,
                             const Eigen::VectorXd& z_query,
                             const OneHotAssignment& assignment);

}  // namespace pkm

#endif  // PKM_MIXTURE_HPP
