#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace f4f {

// splitmix64 step; used to derive independent stream seeds from a master
// seed so parallel work (trees, generation chunks) stays reproducible.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Seeded generator with portable derived distributions. The uniform/normal
// transforms are implemented here (not via std distributions) so that the
// produced sequences are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; caches the spare draw
    double normal();

    // unbiased integer in [0, n); n must be >= 1
    std::uint64_t uniform_index(std::uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::uint64_t i = v.size(); i > 1; --i) {
            std::uint64_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    Rng derive(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace f4f
