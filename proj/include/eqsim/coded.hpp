// Convolutional coding, interleaving, SISO decoding and the turbo loop.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "eqsim/equalizer.hpp"

namespace eqsim {

/// Feed-forward rate-1/2 convolutional code. Generators are tap masks with
/// bit (constraint_length-1) acting on the current input bit.
struct ConvCode {
    enum class Termination { terminated, truncated };

    int constraint_length = 7;
    std::array<unsigned, 2> generators = {0133, 0171};
    Termination termination = Termination::terminated;

    /// The constraint-length-7 code with octal generators (133, 171).
    static ConvCode k7();

    int memory() const { return constraint_length - 1; }
    int states() const { return 1 << memory(); }
    /// Coded symbols produced for L info bits (tail included when terminated).
    std::size_t coded_length(std::size_t info_bits) const;

    void validate() const;
};

/// Coded symbols (+1/-1, bit 0 -> +1) for info bits in {0,1}; terminated
/// codes append memory() zero tail bits.
std::vector<int> conv_encode(std::span<const int> info_bits, const ConvCode& code);

struct SisoResult {
    std::vector<SoftBit> extrinsic_coded;  // input LLR subtracted
    std::vector<SoftBit> info_posterior;   // info positions only, tail excluded
};

/// Exact log-domain forward-backward pass over the code trellis.
SisoResult bcjr_decode(std::span<const SoftBit> coded_llrs, const ConvCode& code);

/// Fixed permutation with its inverse; seeded construction is reproducible.
class Interleaver {
public:
    static Interleaver random(std::size_t length, std::uint64_t seed);
    static Interleaver identity(std::size_t length);

    std::size_t size() const { return forward_.size(); }
    const std::vector<std::size_t>& permutation() const { return forward_; }

    template <typename T>
    std::vector<T> interleave(std::span<const T> in) const {
        check(in.size());
        std::vector<T> out(in.size());
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[forward_[i]];
        return out;
    }

    template <typename T>
    std::vector<T> deinterleave(std::span<const T> in) const {
        check(in.size());
        std::vector<T> out(in.size());
        for (std::size_t i = 0; i < in.size(); ++i) out[forward_[i]] = in[i];
        return out;
    }

private:
    explicit Interleaver(std::vector<std::size_t> forward);
    void check(std::size_t n) const;

    std::vector<std::size_t> forward_;
};

struct TurboResult {
    std::vector<int> info_bits;  // decisions in {0,1}
    EqualizerDiagnostics diagnostics;
};

/// Outer loop between the equalizer and the code: extrinsic coded LLRs from
/// the equalizer feed the decoder (through the deinterleaver) and the decoder
/// extrinsics come back as equalizer priors. The inner equalizer uses
/// standard or Minka input messages per `config`.
TurboResult turbo_equalize(const TransmissionRecord& record, const StateSpaceModel& model,
                           const ConvCode& code, const Interleaver& interleaver,
                           const EqualizerConfig& config, int outer_iters);

}  // namespace eqsim
