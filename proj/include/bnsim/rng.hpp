#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bnsim {

// Seeded uniform stream. Draws are produced from the top 53 bits of the
// engine output, so identical seeds give bit-identical sequences on any
// platform with the same standard library.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    // Uniform in [0, 1).
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() { return engine_(); }

    std::uint64_t seed() const { return seed_; }
    static const std::string& generator_id() {
        static const std::string id = "mt19937_64/u53";
        return id;
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// Cumulative-threshold inversion in declared value order: with probs
// (0.4, 0.4, 0.2), draws below 0.4 select index 0, below 0.8 index 1,
// and anything above index 2.
inline int draw_index(const std::vector<double>& probs, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace bnsim
