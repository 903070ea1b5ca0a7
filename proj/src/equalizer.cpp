#include "eqsim/equalizer.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "eqsim/detail/logdomain.hpp"

namespace eqsim {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kClampWeight = 1e-9;

// Messages along the state chain. Edge i carries the state entering section i
// (s_{i-1}): fwd[i] is the filtered moment-form message (observations and
// input messages of sections < i absorbed), bwd[i] the information-form
// message from sections >= i. Information form admits the flat start bwd[n]=0
// that Schedule A's "infinite variance" initialization requires; moment form
// admits the exactly known (zero covariance) initial state.
struct ChainMessages {
    std::vector<VectorXd> fwd_mean;
    std::vector<MatrixXd> fwd_cov;
    std::vector<MatrixXd> bwd_info;
    std::vector<VectorXd> bwd_wmean;

    void reset(std::size_t n, Eigen::Index dim) {
        fwd_mean.assign(n + 1, VectorXd::Zero(dim));
        fwd_cov.assign(n + 1, MatrixXd::Zero(dim, dim));
        bwd_info.assign(n + 1, MatrixXd::Zero(dim, dim));
        bwd_wmean.assign(n + 1, VectorXd::Zero(dim));
    }
};

struct SweepContext {
    const StateSpaceModel& model;
    std::span<const double> obs;
    double noise_var;
    NegVarPolicy policy;
    EqualizerDiagnostics* diag;
    double h0;  // direct feedthrough C*B

    SweepContext(const StateSpaceModel& m, std::span<const double> y, double nv,
                 NegVarPolicy p, EqualizerDiagnostics* d)
        : model(m), obs(y), noise_var(nv), policy(p), diag(d), h0(m.C * m.B) {}

    void count_clamp(const char* where) const {
        if (policy == NegVarPolicy::allow)
            throw NumericalFailure(std::string("combined precision <= 0 in ") + where);
        if (diag) ++diag->clamp_count;
    }
};

void symmetrize(MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

// One forward filtering step for section k: absorb the input message and the
// observation y_k, producing the moment-form message on edge k+1. The update
// is exact completing-the-square algebra for any input weight, including
// corrective (negative-weight) inputs; intermediate "covariances" may be
// indefinite then. Global validity of the combination is policed by the
// backward sweep, whose pivots are the reverse-order elimination pivots of
// the joint precision. A zero-weight input is handled by its flat limit,
// which requires the symbol to be observable at this step (h0 != 0).
void forward_step(const SweepContext& ctx, std::size_t k, const GaussianMessage& input,
                  const VectorXd& mean_in, const MatrixXd& cov_in, VectorXd& mean_out,
                  MatrixXd& cov_out) {
    const MatrixXd& A = ctx.model.A;
    const VectorXd& B = ctx.model.B;
    const Eigen::RowVectorXd& C = ctx.model.C;
    const double y = ctx.obs[k];

    const VectorXd m1 = A * mean_in;
    MatrixXd v1 = A * cov_in * A.transpose();
    symmetrize(v1);
    const double s0 = C * v1 * C.transpose() + ctx.noise_var;

    double w = input.weight();
    double xi = input.wmean();
    if (w == 0.0 && ctx.h0 == 0.0) {
        ctx.count_clamp("forward sweep (flat input, h0 = 0)");
        w = kClampWeight;
    }

    if (w == 0.0) {
        // Flat-limit update: x_k = (y - C s' - w_k) / h0.
        const VectorXd u = v1 * C.transpose();
        const VectorXd g = B / ctx.h0;
        mean_out = m1 + g * (y - C * m1);
        cov_out = v1 - g * u.transpose() - u * g.transpose() +
                  (s0 / (ctx.h0 * ctx.h0)) * (B * B.transpose());
        symmetrize(cov_out);
        return;
    }

    const double v = 1.0 / w;
    const VectorXd m2 = m1 + (xi / w) * B;
    MatrixXd v2 = v1 + v * (B * B.transpose());
    const double innovation_var = s0 + v * ctx.h0 * ctx.h0;
    if (innovation_var == 0.0)
        throw NumericalFailure("forward sweep: vanishing innovation variance");
    const VectorXd gain = (v2 * C.transpose()) / innovation_var;
    mean_out = m2 + gain * (y - C * m2);
    cov_out = v2 - innovation_var * (gain * gain.transpose());
    symmetrize(cov_out);
}

// One backward step for section k: from the information-form message on edge
// k+1 to the one on edge k, absorbing y_k and marginalizing the input. The
// marginalization divides only by the scalar combined precision q.
void backward_step(const SweepContext& ctx, std::size_t k, const GaussianMessage& input,
                   const MatrixXd& info_in, const VectorXd& wmean_in, MatrixXd& info_out,
                   VectorXd& wmean_out) {
    const MatrixXd& A = ctx.model.A;
    const VectorXd& B = ctx.model.B;
    const Eigen::RowVectorXd& C = ctx.model.C;

    const MatrixXd info = info_in + (C.transpose() * C) / ctx.noise_var;
    const VectorXd wmean = wmean_in + C.transpose() * (ctx.obs[k] / ctx.noise_var);

    double w = input.weight();
    double xi = input.wmean();
    double q = B.dot(info * B) + w;
    if (q <= 0.0) {
        ctx.count_clamp("backward sweep");
        w = kClampWeight;
        xi = 0.0;
        q = B.dot(info * B) + w;
        if (q <= 0.0) {
            // Downstream corrections left the summary indefinite in the input
            // direction; marginalize this symbol as locally flat instead of
            // dividing by a non-positive pivot.
            info_out = A.transpose() * info * A;
            symmetrize(info_out);
            wmean_out = A.transpose() * wmean;
            return;
        }
    }

    const double c = xi + B.dot(wmean);
    const VectorXd d = A.transpose() * (info * B);
    info_out = A.transpose() * info * A - (d * d.transpose()) / q;
    symmetrize(info_out);
    wmean_out = A.transpose() * wmean - (c / q) * d;
}

// Extrinsic Gaussian message toward symbol k: combines the forward message on
// edge k, the backward message on edge k+1 and the local observation, and
// never touches the input message on symbol k itself:
//   W  = B^T (I + L Vt)^{-1} L B,   xi = B^T (I + L Vt)^{-1} (eta - L mt)
// with (mt, Vt) the prediction through A and (L, eta) the backward
// information plus the y_k observation.
GaussianMessage extrinsic_message(const SweepContext& ctx, std::size_t k,
                                  const VectorXd& fwd_mean, const MatrixXd& fwd_cov,
                                  const MatrixXd& bwd_info, const VectorXd& bwd_wmean) {
    const MatrixXd& A = ctx.model.A;
    const VectorXd& B = ctx.model.B;
    const Eigen::RowVectorXd& C = ctx.model.C;
    const Eigen::Index dim = ctx.model.dim();

    const VectorXd mt = A * fwd_mean;
    MatrixXd vt = A * fwd_cov * A.transpose();
    symmetrize(vt);
    const MatrixXd info = bwd_info + (C.transpose() * C) / ctx.noise_var;
    const VectorXd wmean = bwd_wmean + C.transpose() * (ctx.obs[k] / ctx.noise_var);

    Eigen::PartialPivLU<MatrixXd> lu(MatrixXd::Identity(dim, dim) + info * vt);
    const VectorXd solved_w = lu.solve(info * B);
    const VectorXd solved_xi = lu.solve(wmean - info * mt);
    const double weight = B.dot(solved_w);
    const double xi = B.dot(solved_xi);
    if (!std::isfinite(weight) || !std::isfinite(xi))
        throw NumericalFailure("extrinsic extraction: singular combination");
    // Round tiny weight/wmean pairs to the canonical non-informative message.
    if (weight == 0.0 && xi != 0.0) return GaussianMessage(0.0, 0.0);
    return GaussianMessage(weight, xi);
}

std::vector<GaussianMessage> standard_inputs(std::span<const SoftBit> priors) {
    std::vector<GaussianMessage> inputs;
    inputs.reserve(priors.size());
    for (const SoftBit& p : priors) inputs.push_back(standard_gaussian(p));
    return inputs;
}

// Damped Minka input message for one symbol, falling back to the standard
// message when the output message is not a proper Gaussian.
GaussianMessage make_input(const SoftBit& prior, const GaussianMessage& output,
                           AlphaValue alpha, double llr_max, EqualizerDiagnostics& diag,
                           std::optional<GaussianMessage>* minka_out = nullptr) {
    const GaussianMessage standard = standard_gaussian(prior);
    if (alpha.value() == 0.0) {
        if (minka_out) minka_out->reset();
        return standard;  // pure standard messages; skip the Minka conversion
    }
    const std::optional<GaussianMessage> minka = minka_gaussian(prior, output, llr_max);
    if (minka_out) *minka_out = minka;
    if (!minka) return standard;
    if (minka->weight() <= 0.0) ++diag.negvar_count;
    return damped_msg(*minka, standard, alpha);
}

double decision_ber(std::span<const SoftBit> outputs, std::span<const SoftBit> priors,
                    const std::vector<int>& truth) {
    long long errors = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double post = outputs[k].llr() + priors[k].llr();
        const int decision = post >= 0.0 ? 1 : -1;
        if (decision != truth[k]) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(truth.size());
}

}  // namespace

std::vector<GaussianMessage> kalman_extrinsic(const StateSpaceModel& model,
                                              std::span<const double> observations,
                                              double noise_var,
                                              std::span<const GaussianMessage> input_msgs,
                                              NegVarPolicy policy,
                                              EqualizerDiagnostics* diag) {
    if (observations.size() != input_msgs.size())
        throw std::invalid_argument("kalman_extrinsic: observations/messages length mismatch");
    if (!(noise_var > 0.0)) throw std::invalid_argument("kalman_extrinsic: noise_var <= 0");

    const std::size_t n = observations.size();
    SweepContext ctx(model, observations, noise_var, policy, diag);
    ChainMessages chain;
    chain.reset(n, model.dim());

    for (std::size_t k = 0; k < n; ++k)
        forward_step(ctx, k, input_msgs[k], chain.fwd_mean[k], chain.fwd_cov[k],
                     chain.fwd_mean[k + 1], chain.fwd_cov[k + 1]);
    for (std::size_t k = n; k-- > 0;)
        backward_step(ctx, k, input_msgs[k], chain.bwd_info[k + 1], chain.bwd_wmean[k + 1],
                      chain.bwd_info[k], chain.bwd_wmean[k]);

    std::vector<GaussianMessage> extrinsic;
    extrinsic.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        extrinsic.push_back(extrinsic_message(ctx, k, chain.fwd_mean[k], chain.fwd_cov[k],
                                              chain.bwd_info[k + 1], chain.bwd_wmean[k + 1]));
    return extrinsic;
}

std::pair<std::vector<SoftBit>, EqualizerDiagnostics> ep_equalize(
    const StateSpaceModel& model, const TransmissionRecord& record,
    std::span<const SoftBit> priors, const EqualizerConfig& config) {
    config.validate();
    const std::size_t n = record.observations.size();
    if (priors.size() != n) throw std::invalid_argument("ep_equalize: priors length mismatch");

    EqualizerDiagnostics diag;
    SweepContext ctx(model, record.observations, record.noise_var, config.negvar_policy, &diag);
    ChainMessages chain;
    chain.reset(n, model.dim());

    std::vector<GaussianMessage> outputs(n);  // non-informative start
    std::vector<GaussianMessage> inputs(n);
    std::vector<std::optional<GaussianMessage>> last_minka(n);
    std::vector<double> llrs(n, 0.0);

    const bool track_ber = config.track_iteration_ber && record.symbols.size() == n;

    for (int iter = 0; iter < config.max_iters; ++iter) {
        const AlphaValue alpha = alpha_at(config.alpha, iter);

        if (config.schedule == Schedule::A) {
            for (std::size_t k = 0; k < n; ++k)
                inputs[k] = make_input(priors[k], outputs[k], alpha, config.llr_max, diag,
                                       &last_minka[k]);
            for (std::size_t k = 0; k < n; ++k)
                forward_step(ctx, k, inputs[k], chain.fwd_mean[k], chain.fwd_cov[k],
                             chain.fwd_mean[k + 1], chain.fwd_cov[k + 1]);
            for (std::size_t k = n; k-- > 0;)
                backward_step(ctx, k, inputs[k], chain.bwd_info[k + 1], chain.bwd_wmean[k + 1],
                              chain.bwd_info[k], chain.bwd_wmean[k]);
            for (std::size_t k = 0; k < n; ++k)
                outputs[k] = extrinsic_message(ctx, k, chain.fwd_mean[k], chain.fwd_cov[k],
                                               chain.bwd_info[k + 1], chain.bwd_wmean[k + 1]);
        } else {
            // Schedule B: refresh each output from the current-direction state
            // message and the stored opposite-direction one, and use it for the
            // input message at that position right away. The stored backward
            // messages are flat at iteration 0.
            for (std::size_t k = 0; k < n; ++k) {
                outputs[k] = extrinsic_message(ctx, k, chain.fwd_mean[k], chain.fwd_cov[k],
                                               chain.bwd_info[k + 1], chain.bwd_wmean[k + 1]);
                inputs[k] = make_input(priors[k], outputs[k], alpha, config.llr_max, diag,
                                       &last_minka[k]);
                forward_step(ctx, k, inputs[k], chain.fwd_mean[k], chain.fwd_cov[k],
                             chain.fwd_mean[k + 1], chain.fwd_cov[k + 1]);
            }
            for (std::size_t k = n; k-- > 0;) {
                outputs[k] = extrinsic_message(ctx, k, chain.fwd_mean[k], chain.fwd_cov[k],
                                               chain.bwd_info[k + 1], chain.bwd_wmean[k + 1]);
                // last_minka keeps the forward-pass message so the recorded
                // moment residuals compare across passes, not tautologically.
                inputs[k] = make_input(priors[k], outputs[k], alpha, config.llr_max, diag);
                backward_step(ctx, k, inputs[k], chain.bwd_info[k + 1], chain.bwd_wmean[k + 1],
                              chain.bwd_info[k], chain.bwd_wmean[k]);
            }
        }

        diag.iterations_run = iter + 1;
        double delta = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double llr = gaussian_to_softbit(outputs[k], config.llr_max).llr();
            delta = std::max(delta, std::abs(llr - llrs[k]));
            llrs[k] = llr;
        }
        if (track_ber) {
            std::vector<SoftBit> out_bits;
            out_bits.reserve(n);
            for (double l : llrs) out_bits.emplace_back(l, config.llr_max);
            diag.per_iteration_ber.push_back(decision_ber(out_bits, priors, record.symbols));
        }
        if (delta < config.convergence_tol) {
            diag.converged = true;
            break;
        }
    }

    if (config.record_residuals) {
        diag.moment_residuals.assign(n, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t k = 0; k < n; ++k) {
            if (!last_minka[k]) continue;
            const GaussianMessage combined = multiply(*last_minka[k], outputs[k]);
            if (combined.weight() <= 0.0) continue;
            const SoftBit backward = gaussian_to_softbit(outputs[k], config.llr_max);
            const TrueMoments t = true_moments(priors[k], backward);
            diag.moment_residuals[k] = std::abs(combined.mean_var().first - t.mean);
        }
    }

    std::vector<SoftBit> result;
    result.reserve(n);
    for (double l : llrs) result.emplace_back(l, config.llr_max);
    return {std::move(result), std::move(diag)};
}

std::vector<SoftBit> lmmse_equalize(const StateSpaceModel& model,
                                    const TransmissionRecord& record,
                                    std::span<const SoftBit> priors) {
    std::vector<GaussianMessage> inputs = standard_inputs(priors);
    EqualizerDiagnostics diag;
    const std::vector<GaussianMessage> extrinsic = kalman_extrinsic(
        model, record.observations, record.noise_var, inputs, NegVarPolicy::clamp, &diag);
    std::vector<SoftBit> out;
    out.reserve(extrinsic.size());
    for (const GaussianMessage& g : extrinsic) out.push_back(gaussian_to_softbit(g));
    return out;
}

std::vector<SoftBit> bcjr_equalize(const ChannelSpec& spec, const TransmissionRecord& record,
                                   std::span<const SoftBit> priors, double noise_var) {
    if (!spec.is_fir()) throw UnsupportedChannel("bcjr_equalize: IIR channels unsupported");
    spec.validate();
    const int memory = spec.memory();
    if (memory > 12) throw std::invalid_argument("bcjr_equalize: channel memory > 12");
    if (!(noise_var > 0.0)) throw std::invalid_argument("bcjr_equalize: noise_var <= 0");
    const std::size_t n = record.observations.size();
    if (priors.size() != n) throw std::invalid_argument("bcjr_equalize: priors length mismatch");

    using detail::kLogZero;
    using detail::log_add;

    const std::size_t n_states = std::size_t{1} << memory;
    const std::vector<double>& h = spec.b;

    // State encodes the previous `memory` symbols, bit l-1 <-> x_{k-l},
    // bit value 0 <-> symbol +1. Symbols before the block are zero, so the
    // branch mean is computed with explicit zero padding for the first steps.
    const auto branch_mean = [&](std::size_t state, int sym, std::size_t k) {
        double mean = h[0] * sym;
        for (int l = 1; l <= memory; ++l) {
            if (k < static_cast<std::size_t>(l)) break;  // pre-block symbols are 0
            const int past = (state >> (l - 1)) & 1u ? -1 : 1;
            mean += h[l] * past;
        }
        return mean;
    };

    // Steady-state means, valid once k >= memory.
    std::vector<double> mean_table(n_states * 2);
    for (std::size_t s = 0; s < n_states; ++s)
        for (int b = 0; b < 2; ++b)
            mean_table[2 * s + b] = branch_mean(s, b ? -1 : 1, n_states /*>= memory*/ + memory);

    const double inv2v = 1.0 / (2.0 * noise_var);
    const auto gamma = [&](std::size_t state, int b, std::size_t k) {
        const int sym = b ? -1 : 1;
        const double mean = k < static_cast<std::size_t>(memory) ? branch_mean(state, sym, k)
                                                                 : mean_table[2 * state + b];
        const double d = record.observations[k] - mean;
        return -d * d * inv2v + 0.5 * priors[k].llr() * sym;
    };
    const std::size_t state_mask = n_states - 1;
    const auto next_state = [&](std::size_t state, int b) {
        return memory == 0 ? std::size_t{0}
                           : (((state << 1) | static_cast<std::size_t>(b)) & state_mask);
    };

    std::vector<std::vector<double>> alpha(n + 1, std::vector<double>(n_states, kLogZero));
    alpha[0][0] = 0.0;  // zero history
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t s = 0; s < n_states; ++s) {
            if (alpha[k][s] == kLogZero) continue;
            for (int b = 0; b < 2; ++b) {
                const std::size_t t = next_state(s, b);
                alpha[k + 1][t] = log_add(alpha[k + 1][t], alpha[k][s] + gamma(s, b, k));
            }
        }

    std::vector<double> beta(n_states, 0.0);  // terminal state free
    std::vector<SoftBit> out(n);
    for (std::size_t k = n; k-- > 0;) {
        std::vector<double> beta_prev(n_states, kLogZero);
        double num = kLogZero, den = kLogZero;
        for (std::size_t s = 0; s < n_states; ++s) {
            if (alpha[k][s] == kLogZero) continue;
            for (int b = 0; b < 2; ++b) {
                const std::size_t t = next_state(s, b);
                const double g = gamma(s, b, k);
                const double mass = alpha[k][s] + g + beta[t];
                (b == 0 ? num : den) = log_add(b == 0 ? num : den, mass);
                beta_prev[s] = log_add(beta_prev[s], g + beta[t]);
            }
        }
        out[k] = SoftBit(num - den - priors[k].llr());  // extrinsic
        beta = std::move(beta_prev);
    }
    return out;
}

std::vector<int> hard_decide(std::span<const SoftBit> llrs, std::span<const SoftBit> priors) {
    if (llrs.size() != priors.size())
        throw std::invalid_argument("hard_decide: length mismatch");
    std::vector<int> decisions(llrs.size());
    for (std::size_t k = 0; k < llrs.size(); ++k)
        decisions[k] = (llrs[k].llr() + priors[k].llr()) >= 0.0 ? 1 : -1;
    return decisions;
}

}  // namespace eqsim
