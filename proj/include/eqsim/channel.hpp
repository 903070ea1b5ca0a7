// Rational linear ISI channels, state-space realizations, AWGN transmission.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace eqsim {

/// Thrown for channels the requested algorithm cannot handle (e.g. trellis
/// equalization of an IIR channel).
class UnsupportedChannel : public std::invalid_argument {
public:
    explicit UnsupportedChannel(const std::string& what) : std::invalid_argument(what) {}
};

/// Rational transfer function H(z) = b(z^-1) / a(z^-1) with a0 = 1.
/// FIR channels have a = {1}; IIR denominators must be stable.
struct ChannelSpec {
    std::vector<double> b;
    std::vector<double> a{1.0};

    static ChannelSpec fir(std::vector<double> taps);
    static ChannelSpec iir(std::vector<double> numerator, std::vector<double> denominator);

    /// Named presets: "proakis5" (0.227, 0.46, 0.688, 0.46, 0.227) and
    /// "iir09" (1 / (1 - 0.9 z^-1)).
    static ChannelSpec preset(std::string_view name);

    /// CLI forms: a preset name, "fir:h0,h1,..." or "iir:b0,b1,../a0,a1,..".
    static ChannelSpec parse(std::string_view text);

    bool is_fir() const { return a.size() == 1; }
    int memory() const { return static_cast<int>(b.size()) - 1; }

    /// Checks coefficients are finite, a0 == 1 and all poles lie strictly
    /// inside the unit circle. Throws std::invalid_argument otherwise.
    void validate() const;
};

/// First `count` impulse-response taps by polynomial long division of b by a.
std::vector<double> impulse_response(const ChannelSpec& spec, std::size_t count);

/// Sum of squared impulse-response taps, truncated at 200 taps.
double channel_energy(const ChannelSpec& spec);

/// Realization (A, B, C) with h_l = C A^l B; the state is driven as
/// s_k = A s_{k-1} + B x_k and observed as y_k = C s_k + w_k.
/// Symbols before the start of the block are zero, so the initial state is
/// the zero vector with zero covariance.
struct StateSpaceModel {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;

    Eigen::Index dim() const { return A.rows(); }
};

/// Controllable-canonical realization of the channel.
StateSpaceModel realize_state_space(const ChannelSpec& spec);

/// One simulated block: transmitted symbols, noisy observations, and the
/// parameters that produced them.
struct TransmissionRecord {
    std::vector<int> symbols;  // in {+1, -1}
    std::vector<double> observations;
    double noise_var = 0.0;
    std::uint64_t seed = 0;
};

/// y_k = C s_k + w_k with w_k iid N(0, noise_var); deterministic given seed.
TransmissionRecord simulate(const StateSpaceModel& model, std::span<const int> symbols,
                            double noise_var, std::uint64_t seed);

/// Noise variance for a target SNR interpreted as Eb/N0 with unit symbol
/// energy: noise_var = E_h / (2 * code_rate * 10^(snr_db/10)).
double snr_to_noise_var(double snr_db, const ChannelSpec& spec, double code_rate = 1.0);

}  // namespace eqsim
