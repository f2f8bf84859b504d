#pragma once

#include <cstdint>

#include "tracegym/tensor.hpp"

namespace tracegym {

/// Counter-based deterministic generator (keyed SplitMix64). Identical
/// (key, counter) sequences are bit-identical across platforms, and any trial
/// can be seeded independently as CounterRng(key, trial_index).
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key, std::uint64_t stream = 0)
        : key_(key ^ (0x9e3779b97f4a7c15ULL * (stream + 1))), counter_(0) {}

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Standard normal via Box-Muller (pair cached).
    double normal();

    cplx complex_normal();

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
    bool have_spare_ = false;
    double spare_ = 0;
};

/// Ginibre tensor: iid standard complex normal entries.
DenseTensor draw_ginibre(const Shape& shape, CounterRng& rng);

/// Gaussian Hermitian (G + G^H)/2 with Ginibre G, scaled by sigma.
DenseTensor draw_hermitian(const Shape& shape, CounterRng& rng, double sigma = 1.0);

/// Positive definite G^H *_N G + eps_pd I, eps_pd = 1e-12 lambda_max.
DenseTensor draw_positive_definite(const Shape& shape, CounterRng& rng);

/// Haar-ish unitary tensor via QR of a Ginibre matricization.
DenseTensor draw_unitary(const Shape& shape, CounterRng& rng);

/// Commuting Hermitian family: shared random eigenbasis, independent random
/// eigenvalues per member.
std::vector<DenseTensor> draw_commuting_family(const Shape& shape, int n,
                                               CounterRng& rng);

} // namespace tracegym
