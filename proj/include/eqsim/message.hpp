// Scalar and vector Gaussian message algebra in precision form.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace eqsim {

/// Thrown when a caller asks for the mean/variance of a zero-weight message.
class NonInformativeMessage : public std::domain_error {
public:
    NonInformativeMessage()
        : std::domain_error("non-informative message has no mean/variance") {}
};

/// Weight magnitudes above this are scaled down at construction (mean preserved).
inline constexpr double kWeightCap = 1e12;

namespace detail {
inline std::atomic<std::uint64_t>& weight_clamp_counter() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}
}  // namespace detail

inline std::uint64_t weight_clamp_count() {
    return detail::weight_clamp_counter().load(std::memory_order_relaxed);
}
inline void reset_weight_clamp_count() {
    detail::weight_clamp_counter().store(0, std::memory_order_relaxed);
}

/// Scalar Gaussian message parameterized by weight = 1/variance and
/// wmean = mean/variance. Zero weight (with zero wmean) is the unique
/// non-informative message; negative weight is a legal corrective factor.
/// Messages are immutable values and safe to share between threads.
class GaussianMessage {
public:
    GaussianMessage() = default;  // non-informative (0, 0)

    GaussianMessage(double weight, double wmean) : weight_(weight), wmean_(wmean) {
        if (!std::isfinite(weight_) || !std::isfinite(wmean_))
            throw std::invalid_argument("GaussianMessage: parameters must be finite");
        if (weight_ == 0.0 && wmean_ != 0.0)
            throw std::invalid_argument(
                "GaussianMessage: zero weight requires zero weighted mean");
        const double mag = std::max(std::abs(weight_), std::abs(wmean_));
        if (mag > kWeightCap) {
            const double scale = kWeightCap / mag;  // preserves the mean
            weight_ *= scale;
            wmean_ *= scale;
            detail::weight_clamp_counter().fetch_add(1, std::memory_order_relaxed);
        }
    }

    static GaussianMessage from_mean_var(double mean, double variance) {
        if (!std::isfinite(mean) || !std::isfinite(variance))
            throw std::invalid_argument("from_mean_var: non-finite input");
        if (variance <= 0.0)
            throw std::invalid_argument("from_mean_var: variance must be positive");
        return GaussianMessage(1.0 / variance, mean / variance);
    }

    double weight() const { return weight_; }
    double wmean() const { return wmean_; }

    bool informative() const { return weight_ != 0.0; }

    /// True when the message is not itself a probability density (weight <= 0).
    bool corrective() const { return weight_ <= 0.0; }

    /// (mean, variance); variance is negative for negative-weight messages.
    std::pair<double, double> mean_var() const {
        if (weight_ == 0.0) throw NonInformativeMessage();
        return {wmean_ / weight_, 1.0 / weight_};
    }

private:
    double weight_ = 0.0;
    double wmean_ = 0.0;
};

/// Density product: precisions and weighted means add.
inline GaussianMessage multiply(const GaussianMessage& a, const GaussianMessage& b) {
    return GaussianMessage(a.weight() + b.weight(), a.wmean() + b.wmean());
}

/// Density quotient. The result may carry zero or negative weight.
inline GaussianMessage divide(const GaussianMessage& product, const GaussianMessage& divisor) {
    return GaussianMessage(product.weight() - divisor.weight(),
                           product.wmean() - divisor.wmean());
}

/// Vector Gaussian in moment form (state messages of the channel chain).
struct GaussianVec {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    GaussianVec(Eigen::VectorXd m, Eigen::MatrixXd c)
        : mean(std::move(m)), cov(std::move(c)) {
        if (cov.rows() != cov.cols() || mean.size() != cov.rows())
            throw std::invalid_argument("GaussianVec: dimension mismatch");
        const double scale = 1.0 + cov.cwiseAbs().maxCoeff();
        if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw std::invalid_argument("GaussianVec: covariance not symmetric");
    }

    Eigen::Index dim() const { return mean.size(); }
};

/// Moments of the normalized two-point function on {+1, -1}.
struct TrueMoments {
    double mean;
    double variance;

    TrueMoments(double mean_, double variance_) : mean(mean_), variance(variance_) {
        if (!(mean >= -1.0 && mean <= 1.0))
            throw std::invalid_argument("TrueMoments: mean outside [-1, 1]");
        if (std::abs(variance - (1.0 - mean * mean)) > 1e-12)
            throw std::invalid_argument("TrueMoments: variance != 1 - mean^2");
    }
};

}  // namespace eqsim
