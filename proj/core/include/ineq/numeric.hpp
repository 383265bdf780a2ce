#pragma once

#include <cmath>
#include <span>

namespace ineq {

/// Neumaier compensated accumulator. Keeps long weighted sums reproducible
/// to the last few ulps regardless of magnitude ordering.
class CompensatedSum {
public:
    CompensatedSum& add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }
    CompensatedSum& operator+=(double x) noexcept { return add(x); }

    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum acc;
    for (double x : xs) acc += x;
    return acc.value();
}

inline double compensated_dot(std::span<const double> a, std::span<const double> b) noexcept {
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) acc += a[i] * b[i];
    return acc.value();
}

}  // namespace ineq
