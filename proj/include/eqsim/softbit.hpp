// Soft-bit (LLR) messages and their conversion to and from Gaussian messages.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "eqsim/message.hpp"

namespace eqsim {

/// Default clamp for log-likelihood ratios. Beyond +-30 the implied bit
/// probabilities are within ~1e-13 of certainty.
inline constexpr double kDefaultLlrMax = 30.0;

/// Binary {+1, -1} message stored as llr = ln(mu(+1)/mu(-1)), clamped.
class SoftBit {
public:
    SoftBit() = default;  // neutral

    explicit SoftBit(double llr, double llr_max = kDefaultLlrMax) {
        if (std::isnan(llr) || !(llr_max > 0.0))
            throw std::invalid_argument("SoftBit: invalid llr");
        llr_ = std::clamp(llr, -llr_max, llr_max);
    }

    double llr() const { return llr_; }

    /// Soft mean, tanh(llr/2); always strictly inside (-1, +1) after clamping.
    double mean() const { return std::tanh(0.5 * llr_); }

private:
    double llr_ = 0.0;
};

/// Mixing exponent for geometric message mixtures; must lie in [0, 1].
class AlphaValue {
public:
    explicit AlphaValue(double alpha) : alpha_(alpha) {
        if (!(alpha_ >= 0.0 && alpha_ <= 1.0))
            throw std::invalid_argument("AlphaValue: alpha outside [0, 1]");
    }
    double value() const { return alpha_; }

private:
    double alpha_;
};

/// Lossless Gaussian -> soft-bit conversion: llr = 2 m / sigma^2 = 2 wmean.
/// Applies by the same formula when the weight is zero or negative.
inline SoftBit gaussian_to_softbit(const GaussianMessage& g,
                                   double llr_max = kDefaultLlrMax) {
    return SoftBit(2.0 * g.wmean(), llr_max);
}

/// (mean, variance) of a soft bit: tanh(llr/2) and 1 - mean^2.
inline std::pair<double, double> softbit_moments(const SoftBit& s) {
    const double m = s.mean();
    return {m, 1.0 - m * m};
}

/// Standard conversion: Gaussian with the soft bit's own mean and variance.
inline GaussianMessage standard_gaussian(const SoftBit& s) {
    // 1/(1-m^2) = cosh^2(llr/2) and m/(1-m^2) = sinh(llr)/2, stable for large llr.
    const double half = 0.5 * s.llr();
    const double c = std::cosh(half);
    return GaussianMessage(c * c, 0.5 * std::sinh(s.llr()));
}

/// Moments of the normalized product of a forward and a backward soft bit:
/// mean (mf + mb) / (1 + mf mb) and variance 1 - mean^2. The product's LLRs
/// add, so by the tanh addition identity the mean is tanh((llr_f + llr_b)/2);
/// the ratio form cancels catastrophically when the two LLRs nearly oppose.
inline TrueMoments true_moments(const SoftBit& forward, const SoftBit& backward) {
    const double half_sum = 0.5 * (forward.llr() + backward.llr());
    const double mean = std::tanh(half_sum);
    const double c = std::cosh(half_sum);
    return TrueMoments(mean, 1.0 / (c * c));
}

/// Minka conversion of a soft bit against an informative incoming Gaussian:
/// moment-match the two-point product, then divide the incoming message back
/// out. The result may carry zero or negative weight. Returns nullopt when the
/// incoming weight is <= 0 (or the quotient is not representable); the caller
/// falls back to standard_gaussian.
inline std::optional<GaussianMessage> minka_gaussian(const SoftBit& forward,
                                                     const GaussianMessage& incoming,
                                                     double llr_max = kDefaultLlrMax) {
    if (incoming.weight() <= 0.0) return std::nullopt;
    const SoftBit backward = gaussian_to_softbit(incoming, llr_max);
    const TrueMoments t = true_moments(forward, backward);
    const GaussianMessage target = GaussianMessage::from_mean_var(t.mean, t.variance);
    if (target.weight() == incoming.weight() && target.wmean() != incoming.wmean())
        return std::nullopt;  // quotient would be a pure linear factor
    return divide(target, incoming);
}

/// Geometric mixture (minka^alpha * standard^(1-alpha)); affine in precision form.
inline GaussianMessage damped_msg(const GaussianMessage& minka,
                                  const GaussianMessage& standard, AlphaValue alpha) {
    const double a = alpha.value();
    return GaussianMessage(a * minka.weight() + (1.0 - a) * standard.weight(),
                           a * minka.wmean() + (1.0 - a) * standard.wmean());
}

}  // namespace eqsim
