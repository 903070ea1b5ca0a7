// Brute-force reference implementations: dense joint-Gaussian inference,
// exhaustive MAP enumeration and direct two-point moment matching. Used by
// the test suites and the `verify` subcommand; deliberately O(n^3) / O(2^n).
#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eqsim/channel.hpp"
#include "eqsim/message.hpp"
#include "eqsim/softbit.hpp"

namespace eqsim {

class OracleFailure : public std::runtime_error {
public:
    explicit OracleFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Extrinsic Gaussian messages by dense linear algebra: assemble y = H x + w
/// from the impulse response, invert the joint precision, and divide each
/// input message out of its posterior marginal. n <= 16.
std::vector<GaussianMessage> joint_gaussian_extrinsic(const ChannelSpec& spec,
                                                      std::span<const double> observations,
                                                      double noise_var,
                                                      std::span<const GaussianMessage> input_msgs);

/// Extrinsic LLRs by enumerating all 2^n symbol sequences. n <= 14.
std::vector<SoftBit> exhaustive_map_llrs(const ChannelSpec& spec,
                                         std::span<const double> observations,
                                         std::span<const SoftBit> priors, double noise_var);

/// Mean and variance of the normalized two-point function
/// {p_plus * g(+1), (1 - p_plus) * g(-1)} with g a proper Gaussian density.
std::pair<double, double> two_point_moments(double p_plus, const GaussianMessage& g);

}  // namespace eqsim
