#include "eqsim/oracles.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "eqsim/detail/logdomain.hpp"

namespace eqsim {

std::vector<GaussianMessage> joint_gaussian_extrinsic(const ChannelSpec& spec,
                                                      std::span<const double> observations,
                                                      double noise_var,
                                                      std::span<const GaussianMessage> input_msgs) {
    const std::size_t n = observations.size();
    if (n == 0 || n > 16) throw std::invalid_argument("joint_gaussian_extrinsic: need 1 <= n <= 16");
    if (input_msgs.size() != n)
        throw std::invalid_argument("joint_gaussian_extrinsic: message count mismatch");
    if (!(noise_var > 0.0)) throw std::invalid_argument("joint_gaussian_extrinsic: noise_var <= 0");

    const std::vector<double> h = impulse_response(spec, n);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c <= r; ++c) H(r, c) = h[r - c];

    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) y(i) = observations[i];

    Eigen::MatrixXd precision = H.transpose() * H / noise_var;
    Eigen::VectorXd wmean = H.transpose() * y / noise_var;
    for (std::size_t i = 0; i < n; ++i) {
        precision(i, i) += input_msgs[i].weight();
        wmean(i) += input_msgs[i].wmean();
    }

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(precision);
    if (!lu.isInvertible()) throw OracleFailure("joint precision is singular");
    const Eigen::MatrixXd cov = lu.inverse();
    const Eigen::VectorXd mean = cov * wmean;

    std::vector<GaussianMessage> extrinsic;
    extrinsic.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double post_weight = 1.0 / cov(i, i);
        const double post_wmean = mean(i) / cov(i, i);
        extrinsic.emplace_back(post_weight - input_msgs[i].weight(),
                               post_wmean - input_msgs[i].wmean());
    }
    return extrinsic;
}

std::vector<SoftBit> exhaustive_map_llrs(const ChannelSpec& spec,
                                         std::span<const double> observations,
                                         std::span<const SoftBit> priors, double noise_var) {
    using detail::kLogZero;
    using detail::log_add;

    const std::size_t n = observations.size();
    if (n == 0 || n > 14) throw std::invalid_argument("exhaustive_map_llrs: need 1 <= n <= 14");
    if (priors.size() != n) throw std::invalid_argument("exhaustive_map_llrs: priors mismatch");
    if (!(noise_var > 0.0)) throw std::invalid_argument("exhaustive_map_llrs: noise_var <= 0");

    const std::vector<double> h = impulse_response(spec, n);
    const double inv2v = 1.0 / (2.0 * noise_var);

    std::vector<double> num(n, kLogZero), den(n, kLogZero);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        double logp = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double xk = (mask >> k) & 1u ? -1.0 : 1.0;
            double mean = 0.0;
            for (std::size_t l = 0; l <= k; ++l)
                mean += h[l] * (((mask >> (k - l)) & 1u) ? -1.0 : 1.0);
            const double d = observations[k] - mean;
            logp += -d * d * inv2v + 0.5 * priors[k].llr() * xk;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if ((mask >> k) & 1u)
                den[k] = log_add(den[k], logp);
            else
                num[k] = log_add(num[k], logp);
        }
    }

    std::vector<SoftBit> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        out.emplace_back(num[k] - den[k] - priors[k].llr());
    return out;
}

std::pair<double, double> two_point_moments(double p_plus, const GaussianMessage& g) {
    if (!(p_plus > 0.0 && p_plus < 1.0))
        throw std::invalid_argument("two_point_moments: p_plus outside (0, 1)");
    if (!(g.weight() > 0.0))
        throw std::invalid_argument("two_point_moments: incoming Gaussian must be proper");

    const auto [m, v] = g.mean_var();
    const double log_plus = std::log(p_plus) - (1.0 - m) * (1.0 - m) / (2.0 * v);
    const double log_minus = std::log(1.0 - p_plus) - (1.0 + m) * (1.0 + m) / (2.0 * v);
    const double posterior_plus = 1.0 / (1.0 + std::exp(log_minus - log_plus));
    const double mean = 2.0 * posterior_plus - 1.0;
    // E[x^2] = 1 on {+1,-1}, so the variance is 1 - mean^2; compute it in the
    // cancellation-free product form 4 p (1-p).
    const double variance = 4.0 * posterior_plus * (1.0 - posterior_plus);
    return {mean, variance};
}

}  // namespace eqsim
