#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace taperflow {

// splitmix64: seed expander and stream-derivation mixer.
inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ by Blackman & Vigna. Small, fast, passes BigCrush.
class xoshiro256pp {
  public:
    using result_type = std::uint64_t;

    explicit xoshiro256pp(std::uint64_t seed = 0xA02B9FE5E8C35D27ULL) noexcept { reseed(seed); }

    void reseed(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

// Independent stream for replication `index` under a master seed. Parallel and
// serial runs agree because each replication owns the whole derivation.
inline xoshiro256pp replication_stream(std::uint64_t master_seed, std::uint64_t index) noexcept {
    std::uint64_t m = master_seed ^ (0x632BE59BD9B4E019ULL * (index + 1));
    std::uint64_t z = splitmix64_next(m);
    z ^= splitmix64_next(m);
    return xoshiro256pp(z);
}

// 53-bit uniform on [0, 1).
template <class Rng>
inline double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1]; safe as a log() argument.
template <class Rng>
inline double uniform01_open_below(Rng& rng) noexcept {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

template <class Rng>
inline double exponential_draw(Rng& rng) noexcept {
    return -std::log(uniform01_open_below(rng));
}

namespace detail {

// 256-layer ziggurat tables for the standard normal (Marsaglia & Tsang
// layout). The area V is closed from R via erfc, so the construction is
// self-consistent given R alone.
// 256-strip ziggurat for the standard normal: one base strip (rectangle plus
// tail beyond R) and 255 stacked rectangles. The strip area v is closed from
// R via erfc, so the table build is self-consistent given R alone; tests
// assert that the recursion closes at f = 1.
struct ziggurat_tables {
    std::array<double, 256> edge{};   // edge[0] = R, decreasing; edge[255] ~ 0
    std::array<double, 256> fedge{};  // fedge[i] = exp(-edge[i]^2/2)
    double r;
    double v;   // common strip area
    double w0;  // virtual width of the base strip, v / f(R)

    ziggurat_tables() {
        r = 3.6541528853610088;
        const auto pdf = [](double t) { return std::exp(-0.5 * t * t); };
        v = r * pdf(r) + std::sqrt(std::acos(-1.0) / 2.0) * std::erfc(r / std::sqrt(2.0));
        w0 = v / pdf(r);
        edge[0] = r;
        fedge[0] = pdf(r);
        for (int i = 1; i <= 255; ++i) {
            double arg = fedge[i - 1] + v / edge[i - 1];
            if (arg >= 1.0) {
                edge[i] = 0.0;
                fedge[i] = 1.0;
            } else {
                edge[i] = std::sqrt(-2.0 * std::log(arg));
                fedge[i] = arg;
            }
        }
    }
};

inline const ziggurat_tables& ziggurat() {
    static const ziggurat_tables tables;
    return tables;
}

}  // namespace detail

// Standard normal draw, ziggurat method. ~96% of draws cost one engine call
// plus a compare; hot enough to matter at 1e11 draws per experiment.
template <class Rng>
inline double normal_draw(Rng& rng) noexcept {
    const auto& z = detail::ziggurat();
    for (;;) {
        const std::uint64_t bits = rng();
        const int idx = static_cast<int>(bits & 255u);
        const double u = static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;  // [-1, 1)
        if (idx == 0) {
            const double x = u * z.w0;
            if (std::abs(x) < z.r) return x;
            // Marsaglia tail beyond R.
            double xx, yy;
            do {
                xx = -std::log(uniform01_open_below(rng)) / z.r;
                yy = -std::log(uniform01_open_below(rng));
            } while (yy + yy < xx * xx);
            return (u < 0.0) ? -(z.r + xx) : (z.r + xx);
        }
        // Rectangle idx: width edge[idx-1], vertical band [fedge[idx-1], fedge[idx]].
        const double x = u * z.edge[idx - 1];
        if (std::abs(x) < z.edge[idx]) return x;
        const double fx = std::exp(-0.5 * x * x);
        if (z.fedge[idx - 1] + uniform01(rng) * (z.fedge[idx] - z.fedge[idx - 1]) < fx) return x;
    }
}

}  // namespace taperflow
