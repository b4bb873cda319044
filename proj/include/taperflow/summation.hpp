#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace taperflow {

// Kahan-compensated accumulator. Long power-law coefficient sums span many
// orders of magnitude; plain accumulation loses digits at n ~ 1e6 and above.
class kahan_sum {
  public:
    void add(double x) noexcept {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    void operator+=(double x) noexcept { add(x); }
    double value() const noexcept { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Pairwise sum of a contiguous range, O(log n) error growth.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(std::span<const double>(xs));
}

}  // namespace taperflow
