#ifndef TFIM_PHILOX_HPP
#define TFIM_PHILOX_HPP

#include <array>
#include <cstdint>

namespace tfim {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Streams are addressed by (seed, stream): the stream index occupies the
// upper counter words, so every trajectory owns a disjoint counter range
// and parallel scheduling cannot change the numbers it draws.
class PhiloxRng {
  public:
    PhiloxRng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint32_t next_u32() {
        if (have_ == 0) {
            block_ = philox(counter_++);
            have_ = 4;
        }
        return block_[4 - have_--];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // uniform in [0, 1) with 53 random bits
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // fair +-1
    double pm1() { return (next_u32() & 1u) ? 1.0 : -1.0; }

  private:
    std::array<std::uint32_t, 4> philox(std::uint64_t ctr) const {
        std::array<std::uint32_t, 4> x{static_cast<std::uint32_t>(ctr),
                                       static_cast<std::uint32_t>(ctr >> 32),
                                       stream_lo_, stream_hi_};
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * x[0];
            std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * x[2];
            std::array<std::uint32_t, 4> y{
                static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k0,
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k1,
                static_cast<std::uint32_t>(p0)};
            x = y;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return x;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int have_ = 0;
};

}  // namespace tfim

#endif
