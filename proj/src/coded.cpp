#include "eqsim/coded.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

#include "eqsim/detail/logdomain.hpp"
#include "eqsim/rng.hpp"

namespace eqsim {

using detail::kLogZero;
using detail::log_add;

ConvCode ConvCode::k7() { return ConvCode{}; }

std::size_t ConvCode::coded_length(std::size_t info_bits) const {
    const std::size_t tail = termination == Termination::terminated ? memory() : 0;
    return 2 * (info_bits + tail);
}

void ConvCode::validate() const {
    if (constraint_length < 2 || constraint_length > 16)
        throw std::invalid_argument("ConvCode: constraint length out of range");
    for (unsigned g : generators) {
        if (g == 0) throw std::invalid_argument("ConvCode: zero generator");
        if (g >= (1u << constraint_length))
            throw std::invalid_argument("ConvCode: generator degree >= constraint length");
    }
}

namespace {

// Register layout: bit (K-1) is the current input bit, bits (K-2..0) the state
// (most recent past bit highest).
inline int parity(unsigned v) { return std::popcount(v) & 1; }

inline unsigned code_next_state(unsigned state, int bit, int memory) {
    return (static_cast<unsigned>(bit) << (memory - 1)) | (state >> 1);
}

inline std::array<int, 2> code_output(unsigned state, int bit, const ConvCode& code) {
    const unsigned reg = (static_cast<unsigned>(bit) << code.memory()) | state;
    return {parity(reg & code.generators[0]), parity(reg & code.generators[1])};
}

}  // namespace

std::vector<int> conv_encode(std::span<const int> info_bits, const ConvCode& code) {
    code.validate();
    for (int b : info_bits)
        if (b != 0 && b != 1) throw std::invalid_argument("conv_encode: bits must be 0/1");

    const int tail = code.termination == ConvCode::Termination::terminated ? code.memory() : 0;
    std::vector<int> symbols;
    symbols.reserve(2 * (info_bits.size() + tail));

    unsigned state = 0;
    const auto push = [&](int bit) {
        const auto out = code_output(state, bit, code);
        symbols.push_back(out[0] ? -1 : 1);
        symbols.push_back(out[1] ? -1 : 1);
        state = code_next_state(state, bit, code.memory());
    };
    for (int b : info_bits) push(b);
    for (int t = 0; t < tail; ++t) push(0);
    return symbols;
}

SisoResult bcjr_decode(std::span<const SoftBit> coded_llrs, const ConvCode& code) {
    code.validate();
    if (coded_llrs.size() % 2 != 0)
        throw std::invalid_argument("bcjr_decode: odd number of coded LLRs");
    const std::size_t steps = coded_llrs.size() / 2;
    const bool terminated = code.termination == ConvCode::Termination::terminated;
    const std::size_t tail = terminated ? code.memory() : 0;
    if (steps < tail) throw std::invalid_argument("bcjr_decode: block shorter than the tail");
    const std::size_t info_len = steps - tail;
    const std::size_t n_states = static_cast<std::size_t>(code.states());

    // Branch metric: 0.5 * sum llr_j * x_j over the two emitted symbols.
    const auto gamma = [&](unsigned state, int bit, std::size_t t) {
        const auto out = code_output(state, bit, code);
        const double x0 = out[0] ? -1.0 : 1.0;
        const double x1 = out[1] ? -1.0 : 1.0;
        return 0.5 * (coded_llrs[2 * t].llr() * x0 + coded_llrs[2 * t + 1].llr() * x1);
    };

    std::vector<std::vector<double>> alpha(steps + 1, std::vector<double>(n_states, kLogZero));
    alpha[0][0] = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const int max_bit = t < info_len ? 1 : 0;  // tail steps force zero bits
        for (unsigned s = 0; s < n_states; ++s) {
            if (alpha[t][s] == kLogZero) continue;
            for (int b = 0; b <= max_bit; ++b) {
                const unsigned ns = code_next_state(s, b, code.memory());
                alpha[t + 1][ns] = log_add(alpha[t + 1][ns], alpha[t][s] + gamma(s, b, t));
            }
        }
    }

    std::vector<double> beta(n_states, terminated ? kLogZero : 0.0);
    if (terminated) beta[0] = 0.0;

    SisoResult result;
    result.extrinsic_coded.resize(coded_llrs.size());
    result.info_posterior.resize(info_len);

    for (std::size_t t = steps; t-- > 0;) {
        const int max_bit = t < info_len ? 1 : 0;
        std::vector<double> beta_prev(n_states, kLogZero);
        double info_num = kLogZero, info_den = kLogZero;
        std::array<std::array<double, 2>, 2> coded_mass{};  // [position][symbol +1/-1]
        coded_mass[0] = {kLogZero, kLogZero};
        coded_mass[1] = {kLogZero, kLogZero};

        for (unsigned s = 0; s < n_states; ++s) {
            for (int b = 0; b <= max_bit; ++b) {
                const unsigned ns = code_next_state(s, b, code.memory());
                const double g = gamma(s, b, t);
                if (beta[ns] != kLogZero)
                    beta_prev[s] = log_add(beta_prev[s], g + beta[ns]);
                if (alpha[t][s] == kLogZero || beta[ns] == kLogZero) continue;
                const double mass = alpha[t][s] + g + beta[ns];
                (b == 0 ? info_num : info_den) = log_add(b == 0 ? info_num : info_den, mass);
                const auto out = code_output(s, b, code);
                for (int j = 0; j < 2; ++j)
                    coded_mass[j][out[j]] = log_add(coded_mass[j][out[j]], mass);
            }
        }

        for (int j = 0; j < 2; ++j) {
            const double posterior = coded_mass[j][0] - coded_mass[j][1];
            result.extrinsic_coded[2 * t + j] = SoftBit(posterior - coded_llrs[2 * t + j].llr());
        }
        if (t < info_len) result.info_posterior[t] = SoftBit(info_num - info_den);
        beta = std::move(beta_prev);
    }
    return result;
}

Interleaver::Interleaver(std::vector<std::size_t> forward) : forward_(std::move(forward)) {
    std::vector<std::size_t> sorted(forward_);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != i) throw std::invalid_argument("Interleaver: not a bijection");
}

Interleaver Interleaver::random(std::size_t length, std::uint64_t seed) {
    std::vector<std::size_t> perm(length);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng::Sampler sampler(seed);
    for (std::size_t i = length; i > 1; --i)
        std::swap(perm[i - 1], perm[sampler.engine()() % i]);
    return Interleaver(std::move(perm));
}

Interleaver Interleaver::identity(std::size_t length) {
    std::vector<std::size_t> perm(length);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    return Interleaver(std::move(perm));
}

void Interleaver::check(std::size_t n) const {
    if (n != forward_.size()) throw std::invalid_argument("Interleaver: length mismatch");
}

TurboResult turbo_equalize(const TransmissionRecord& record, const StateSpaceModel& model,
                           const ConvCode& code, const Interleaver& interleaver,
                           const EqualizerConfig& config, int outer_iters) {
    code.validate();
    if (outer_iters < 1) throw std::invalid_argument("turbo_equalize: outer_iters < 1");
    const std::size_t n = record.observations.size();
    if (interleaver.size() != n)
        throw std::invalid_argument("turbo_equalize: interleaver/block length mismatch");
    if (n % 2 != 0) throw std::invalid_argument("turbo_equalize: odd coded length");

    TurboResult result;
    std::vector<SoftBit> equalizer_priors(n);  // interleaved domain, neutral start
    SisoResult siso;

    for (int outer = 0; outer < outer_iters; ++outer) {
        auto [eq_llrs, diag] = ep_equalize(model, record, equalizer_priors, config);
        result.diagnostics.negvar_count += diag.negvar_count;
        result.diagnostics.clamp_count += diag.clamp_count;
        result.diagnostics.iterations_run += diag.iterations_run;
        result.diagnostics.converged = diag.converged;

        const std::vector<SoftBit> coded_llrs =
            interleaver.deinterleave(std::span<const SoftBit>(eq_llrs));
        siso = bcjr_decode(coded_llrs, code);
        equalizer_priors =
            interleaver.interleave(std::span<const SoftBit>(siso.extrinsic_coded));
    }

    result.info_bits.resize(siso.info_posterior.size());
    for (std::size_t i = 0; i < siso.info_posterior.size(); ++i)
        result.info_bits[i] = siso.info_posterior[i].llr() >= 0.0 ? 0 : 1;
    return result;
}

}  // namespace eqsim
