// Monte-Carlo BER experiments, result serialization and self-verification.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqsim/alpha.hpp"
#include "eqsim/coded.hpp"
#include "eqsim/equalizer.hpp"

namespace eqsim {

enum class Scheme { lmmse, minka_A, minka_B, bcjr, coded_std, coded_minka };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);
bool is_coded(Scheme scheme);

/// One Monte-Carlo measurement row.
struct BerRecord {
    double snr_db = 0.0;
    Scheme scheme = Scheme::lmmse;
    int iters = 0;
    long long bits = 0;
    long long errors = 0;
    double ber = 0.0;
    long long negvar_count = 0;
    long long clamp_count = 0;
    double wall_time_ms = 0.0;
    std::uint64_t seed = 0;
};

struct SkippedPoint {
    double snr_db;
    Scheme scheme;
    std::string reason;
};

struct ExperimentConfig {
    ChannelSpec channel = ChannelSpec::preset("proakis5");
    std::vector<double> snr_db;
    std::vector<Scheme> schemes;

    std::size_t block_length = 512;   // uncoded symbols per block
    std::size_t info_length = 1024;   // info bits per coded block
    long long min_bits = 200000;
    long long min_errors = 100;
    long long max_bits = 10000000;

    EqualizerConfig equalizer;
    int outer_iters = 4;
    ConvCode code = ConvCode::k7();
    std::uint64_t interleaver_seed = 1;

    std::uint64_t base_seed = 42;
    /// Record wall-clock times. Off by default so that repeated runs with the
    /// same seed produce byte-identical result files.
    bool measure_time = false;

    void validate() const;
};

struct ExperimentResult {
    std::vector<BerRecord> records;
    std::vector<SkippedPoint> skipped;
};

/// Runs every (snr, scheme) point until min_bits and min_errors are both
/// reached (or max_bits), in seeded blocks. Pure function of the config.
/// Scheme/channel mismatches are reported in `skipped`, not fatal.
ExperimentResult run_ber_experiment(const ExperimentConfig& config);

/// CSV (default) or line-delimited JSON when the path ends in ".jsonl".
/// Header: snr_db,scheme,iters,bits,errors,ber,negvar_count,clamp_count,
/// wall_time_ms,seed. Floats use 6 significant digits.
void write_results(std::span<const BerRecord> records, const std::filesystem::path& path);
void write_results(std::span<const BerRecord> records, std::ostream& out, bool jsonl);

/// Parse-back helper for files produced by write_results.
std::vector<BerRecord> read_results(const std::filesystem::path& path);

struct VerifyOptions {
    int trials = 100;
    std::uint64_t seed = 7;
};

struct VerifyCheck {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool ok = false;
};

/// Oracle-equivalence suites at small sizes: Kalman sweeps vs dense joint
/// Gaussian, trellis equalizer vs exhaustive enumeration, code SISO vs
/// codeword enumeration, Minka moment matching and the KL projection check.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace eqsim
