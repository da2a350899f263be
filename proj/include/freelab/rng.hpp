#pragma once
// Counter-based splittable RNG. Streams are derived by hashing (key, stream id),
// so Monte Carlo substreams are reproducible independent of scheduling.
#include <cstdint>
#include <complex>
#include <cmath>

namespace freelab {

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ULL, 0x2545f4914f6cdd1dULL), stream)) {}

    // Independent substream; deterministic in (this stream, substream index).
    Rng split(std::uint64_t substream) const {
        Rng r(0);
        r.key_ = mix(key_, 0xd1b54a32d192ed03ULL + substream);
        r.ctr_ = 0;
        r.have_spare_ = false;
        return r;
    }

    std::uint64_t u64() { return mix(key_, ctr_++); }

    double uniform() {  // [0,1)
        return static_cast<double>(u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        // rejection-free modulo is fine here; n is tiny compared to 2^64
        return u64() % n;
    }

    double normal() {  // standard real gaussian, Box-Muller
        if (have_spare_) { have_spare_ = false; return spare_; }
        double u1 = 0.0, u2;
        while (u1 == 0.0) u1 = uniform();
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // complex gaussian with independent N(0,1) real and imaginary parts
    std::complex<double> cnormal() {
        double re = normal();
        double im = normal();
        return {re, im};
    }

private:
    static std::uint64_t mix(std::uint64_t k, std::uint64_t c) {
        std::uint64_t z = k + c * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= (z >> 31);
        z += k ^ (c << 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace freelab
