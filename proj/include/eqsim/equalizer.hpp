// Forward-backward Gaussian message passing over the channel chain, the
// iterative equalizer with Minka message conversion, and baseline equalizers.
#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eqsim/alpha.hpp"
#include "eqsim/channel.hpp"
#include "eqsim/message.hpp"
#include "eqsim/softbit.hpp"

namespace eqsim {

/// Thrown when a sweep loses positivity and the policy forbids recovery.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A: update output messages only after a complete forward-backward sweep.
/// B: update them immediately during both the forward and backward sweeps.
enum class Schedule { A, B };

/// What to do when a combined precision along a sweep becomes non-positive:
/// clamp the offending symbol's incoming weight to +1e-9 for the sweep, or
/// let the sweep fail with NumericalFailure.
enum class NegVarPolicy { allow, clamp };

struct EqualizerConfig {
    Schedule schedule = Schedule::B;
    int max_iters = 20;
    AlphaSchedule alpha = AlphaSchedule{AlphaSchedule::Kind::geometric_ramp, 0.05, 1.2, 0};
    double llr_max = kDefaultLlrMax;
    NegVarPolicy negvar_policy = NegVarPolicy::clamp;
    double convergence_tol = 1e-4;  // max absolute change in output LLRs

    /// Fill EqualizerDiagnostics::moment_residuals after the last iteration.
    bool record_residuals = false;
    /// Fill per_iteration_ber when the transmission record carries the truth.
    bool track_iteration_ber = false;

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("equalizer: max_iters < 1");
        if (!(convergence_tol > 0.0))
            throw std::invalid_argument("equalizer: convergence_tol <= 0");
        alpha.validate();
    }
};

struct EqualizerDiagnostics {
    int iterations_run = 0;
    long long negvar_count = 0;  // Minka messages that came out with weight <= 0
    long long clamp_count = 0;   // sweep recoveries under NegVarPolicy::clamp
    bool converged = false;
    std::vector<double> per_iteration_ber;
    /// Per-symbol |m_g - m_true| after the final iteration; NaN where no
    /// Minka message was available (fallback symbols).
    std::vector<double> moment_residuals;
};

/// Exact sum-product Gaussian message out of the channel model on each input
/// edge, given Gaussian input messages on all symbols and all observations.
/// The result for symbol k excludes input_msgs[k] itself (extrinsic).
/// Input messages may be non-informative (zero weight) or corrective
/// (negative weight) as long as combined precisions along the sweeps stay
/// positive; failures are handled per `policy` (clamps counted in *diag).
std::vector<GaussianMessage> kalman_extrinsic(const StateSpaceModel& model,
                                              std::span<const double> observations,
                                              double noise_var,
                                              std::span<const GaussianMessage> input_msgs,
                                              NegVarPolicy policy = NegVarPolicy::clamp,
                                              EqualizerDiagnostics* diag = nullptr);

/// Iterative equalizer: converts per-symbol soft-bit priors to damped Minka
/// input messages against the current output messages, re-runs the Gaussian
/// sweeps per the configured schedule, and returns extrinsic output LLRs.
std::pair<std::vector<SoftBit>, EqualizerDiagnostics> ep_equalize(
    const StateSpaceModel& model, const TransmissionRecord& record,
    std::span<const SoftBit> priors, const EqualizerConfig& config);

/// Single forward-backward sweep with standard Gaussian input messages.
std::vector<SoftBit> lmmse_equalize(const StateSpaceModel& model,
                                    const TransmissionRecord& record,
                                    std::span<const SoftBit> priors);

/// Exact per-symbol MAP extrinsic LLRs on the 2^M channel trellis (FIR only,
/// memory M <= 12). Log-domain forward-backward; symbols before the block
/// are zero and the terminal state is free.
std::vector<SoftBit> bcjr_equalize(const ChannelSpec& spec, const TransmissionRecord& record,
                                   std::span<const SoftBit> priors, double noise_var);

/// sign(llr + prior) with ties broken to +1.
std::vector<int> hard_decide(std::span<const SoftBit> llrs, std::span<const SoftBit> priors);

}  // namespace eqsim
