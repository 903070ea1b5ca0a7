// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit status 0 iff all pass.
//
//   eqsim_acceptance [--eqsim <path-to-cli>] [--only 1,2,...]
//
// The CLI path is needed only for the determinism criterion (11).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eqsim/detail/logdomain.hpp"
#include "eqsim/harness.hpp"
#include "eqsim/oracles.hpp"
#include "eqsim/rng.hpp"

using namespace eqsim;
namespace chrono = std::chrono;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

double seconds_since(chrono::steady_clock::time_point start) {
    return chrono::duration<double>(chrono::steady_clock::now() - start).count();
}

// 95% Wilson score interval for a binomial proportion.
struct Interval {
    double lo, hi;
};
Interval wilson95(long long errors, long long bits) {
    const double z = 1.959963984540054;
    const double n = static_cast<double>(bits);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {center - half, center + half};
}

bool separated(const BerRecord& better, const BerRecord& worse) {
    return wilson95(better.errors, better.bits).hi < wilson95(worse.errors, worse.bits).lo;
}

const BerRecord& find_record(const std::vector<BerRecord>& records, double snr, Scheme s) {
    for (const BerRecord& r : records)
        if (r.snr_db == snr && r.scheme == s) return r;
    throw std::runtime_error("missing record for " + to_string(s));
}

// --- 1. Sum-product exactness -------------------------------------------
Outcome criterion_sum_product() {
    const auto start = chrono::steady_clock::now();
    rng::Sampler rng(101);
    double max_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const ChannelSpec spec =
            ChannelSpec::preset(trial % 2 == 0 ? "proakis5" : "iir09");
        const StateSpaceModel model = realize_state_space(spec);
        const std::size_t n = 8;
        std::vector<int> symbols(n);
        for (int& s : symbols) s = rng.pm1();
        const double noise_var = 0.05 + 0.95 * rng.uniform();
        const TransmissionRecord record = simulate(model, symbols, noise_var, rng.engine()());
        std::vector<GaussianMessage> inputs;
        for (std::size_t k = 0; k < n; ++k) {
            const double w = 0.2 + 4.8 * rng.uniform();
            inputs.emplace_back(w, w * (-2.0 + 4.0 * rng.uniform()));
        }
        const auto fast = kalman_extrinsic(model, record.observations, noise_var, inputs,
                                           NegVarPolicy::allow);
        const auto exact =
            joint_gaussian_extrinsic(spec, record.observations, noise_var, inputs);
        for (std::size_t k = 0; k < n; ++k) {
            const auto [m1, v1] = fast[k].mean_var();
            const auto [m2, v2] = exact[k].mean_var();
            max_err = std::max({max_err, std::abs(m1 - m2), std::abs(v1 - v2)});
        }
    }
    const double elapsed = seconds_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf, "max |dmean|,|dvar| = %.3e (tol 1e-8), %.2fs (limit 5s)",
                  max_err, elapsed);
    return {max_err <= 1e-8 && elapsed < 5.0, buf};
}

// --- 2. Trellis exactness -------------------------------------------------
Outcome criterion_trellis() {
    const auto start = chrono::steady_clock::now();
    rng::Sampler rng(102);
    double max_eq = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const ChannelSpec spec = ChannelSpec::fir(
            {1.0, -1.0 + 2.0 * rng.uniform(), -1.0 + 2.0 * rng.uniform()});
        const StateSpaceModel model = realize_state_space(spec);
        const std::size_t n = 10;
        std::vector<int> symbols(n);
        for (int& s : symbols) s = rng.pm1();
        const double noise_var = 0.1 + 0.9 * rng.uniform();
        const TransmissionRecord record = simulate(model, symbols, noise_var, rng.engine()());
        std::vector<SoftBit> priors;
        for (std::size_t k = 0; k < n; ++k) priors.emplace_back(-2.0 + 4.0 * rng.uniform());
        const auto fast = bcjr_equalize(spec, record, priors, noise_var);
        const auto exact = exhaustive_map_llrs(spec, record.observations, priors, noise_var);
        for (std::size_t k = 0; k < n; ++k)
            max_eq = std::max(max_eq, std::abs(fast[k].llr() - exact[k].llr()));
    }

    // Same-style check for the code SISO at L = 6.
    using detail::kLogZero;
    using detail::log_add;
    const ConvCode code = ConvCode::k7();
    double max_siso = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t L = 6;
        std::vector<SoftBit> coded_llrs;
        for (std::size_t j = 0; j < code.coded_length(L); ++j)
            coded_llrs.emplace_back(-3.0 + 6.0 * rng.uniform());
        std::vector<double> num(L, kLogZero), den(L, kLogZero);
        for (std::size_t word = 0; word < (1u << L); ++word) {
            std::vector<int> info(L);
            for (std::size_t i = 0; i < L; ++i) info[i] = (word >> i) & 1u;
            const std::vector<int> cw = conv_encode(info, code);
            double logp = 0.0;
            for (std::size_t j = 0; j < cw.size(); ++j)
                logp += 0.5 * coded_llrs[j].llr() * cw[j];
            for (std::size_t i = 0; i < L; ++i)
                (info[i] ? den[i] : num[i]) = log_add(info[i] ? den[i] : num[i], logp);
        }
        const SisoResult siso = bcjr_decode(coded_llrs, code);
        for (std::size_t i = 0; i < L; ++i)
            max_siso =
                std::max(max_siso, std::abs(siso.info_posterior[i].llr() - (num[i] - den[i])));
    }
    const double elapsed = seconds_since(start);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "equalizer max |dllr| = %.3e (tol 1e-9), siso max = %.3e (tol 1e-8), "
                  "%.2fs (limit 10s)",
                  max_eq, max_siso, elapsed);
    return {max_eq <= 1e-9 && max_siso <= 1e-8 && elapsed < 10.0, buf};
}

// --- 3. Minka conversion correctness --------------------------------------
Outcome criterion_minka_conversion() {
    const auto start = chrono::steady_clock::now();
    rng::Sampler rng(103);
    double max_match = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const SoftBit forward(-8.0 + 16.0 * rng.uniform());
        const GaussianMessage incoming(0.05 + 9.95 * rng.uniform(),
                                       -10.0 + 20.0 * rng.uniform());
        const auto minka = minka_gaussian(forward, incoming);
        if (!minka) continue;
        const GaussianMessage combined = multiply(*minka, incoming);
        if (combined.weight() <= 0.0) continue;
        const auto [mc, vc] = combined.mean_var();
        const double p_plus = 1.0 / (1.0 + std::exp(-forward.llr()));
        const auto [mt, vt] = two_point_moments(p_plus, incoming);
        max_match = std::max({max_match, std::abs(mc - mt), std::abs(vc - vt)});
    }

    double max_limit = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const SoftBit forward(-20.0 + 40.0 * rng.uniform());
        const GaussianMessage incoming(1e-9 * rng.uniform(), 0.0);
        const auto [ms, vs] = standard_gaussian(forward).mean_var();
        if (incoming.weight() > 0.0) {
            const auto minka = minka_gaussian(forward, incoming);
            const auto [mm, vm] = minka->mean_var();
            max_limit = std::max({max_limit, std::abs(mm - ms), std::abs(vm - vs)});
        }
    }
    const double elapsed = seconds_since(start);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "moment match max = %.3e (tol 1e-10), flat limit max = %.3e (tol 1e-6), "
                  "%.2fs (limit 2s)",
                  max_match, max_limit, elapsed);
    return {max_match <= 1e-10 && max_limit <= 1e-6 && elapsed < 2.0, buf};
}

// --- 4. KL projection ------------------------------------------------------
Outcome criterion_kl_projection() {
    const auto start = chrono::steady_clock::now();
    const auto kl = [](double f_plus, double mean, double var) {
        const auto log_gauss = [&](double x) {
            return -0.5 * std::log(2.0 * M_PI * var) - (x - mean) * (x - mean) / (2.0 * var);
        };
        return f_plus * (std::log(f_plus) - log_gauss(1.0)) +
               (1.0 - f_plus) * (std::log(1.0 - f_plus) - log_gauss(-1.0));
    };
    rng::Sampler rng(104);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const SoftBit forward(-6.0 + 12.0 * rng.uniform());
        const double w = 0.1 + 4.9 * rng.uniform();
        const GaussianMessage incoming(w, w * (-2.0 + 4.0 * rng.uniform()));
        const TrueMoments t = true_moments(forward, gaussian_to_softbit(incoming));
        const double f_plus = 0.5 * (1.0 + t.mean);
        const double base = kl(f_plus, t.mean, t.variance);
        for (double eps : {0.01, -0.01}) {
            if (kl(f_plus, t.mean + eps, t.variance) <= base) ++violations;
            if (kl(f_plus, t.mean, t.variance * (1.0 + eps)) <= base) ++violations;
        }
    }
    const double elapsed = seconds_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d violations in 1000 cases (require 0), %.2fs (limit 2s)",
                  violations, elapsed);
    return {violations == 0 && elapsed < 2.0, buf};
}

// --- 5. Negative-variance occurrence ---------------------------------------
Outcome criterion_negvar_occurrence() {
    ExperimentConfig config;
    config.channel = ChannelSpec::preset("proakis5");
    config.snr_db = {10.0};
    config.schemes = {Scheme::minka_B};
    config.block_length = 512;
    config.min_bits = 100 * 512;  // at least 100 blocks
    config.min_errors = 1;
    const ExperimentResult result = run_ber_experiment(config);
    const BerRecord& r = result.records.at(0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "negvar_count = %lld over %lld bits (require > 0)",
                  r.negvar_count, r.bits);
    return {r.bits >= 100 * 512 && r.negvar_count > 0, buf};
}

// --- 6. Uncoded FIR ordering ------------------------------------------------
Outcome criterion_fir_ordering() {
    ExperimentConfig config;
    config.channel = ChannelSpec::preset("proakis5");
    config.snr_db = {10.0, 12.0, 14.0};
    config.schemes = {Scheme::lmmse, Scheme::minka_B, Scheme::bcjr};
    const ExperimentResult result = run_ber_experiment(config);

    bool ordering = true;
    int ci_separated = 0;
    int gap_points = 0;
    std::ostringstream detail;
    for (double snr : config.snr_db) {
        const BerRecord& lmmse = find_record(result.records, snr, Scheme::lmmse);
        const BerRecord& minka = find_record(result.records, snr, Scheme::minka_B);
        const BerRecord& bcjr = find_record(result.records, snr, Scheme::bcjr);
        ordering = ordering && bcjr.ber <= minka.ber && minka.ber <= lmmse.ber;
        if (separated(minka, lmmse)) ++ci_separated;
        if (minka.ber - bcjr.ber < lmmse.ber - minka.ber) ++gap_points;
        detail << " " << snr << "dB[" << bcjr.ber << "/" << minka.ber << "/" << lmmse.ber
               << "]";
    }
    std::ostringstream out;
    out << "bcjr/minka/lmmse:" << detail.str() << "; ordering " << (ordering ? "ok" : "BROKEN")
        << ", CI-separated " << ci_separated << "/3 (need >= 2), gap " << gap_points
        << "/3 (need >= 1)";
    return {ordering && ci_separated >= 2 && gap_points >= 1, out.str()};
}

// --- 7. Uncoded IIR improvement ----------------------------------------------
Outcome criterion_iir_improvement() {
    ExperimentConfig config;
    config.channel = ChannelSpec::preset("iir09");
    config.snr_db = {8.0, 10.0, 12.0};
    config.schemes = {Scheme::lmmse, Scheme::minka_B};
    const ExperimentResult result = run_ber_experiment(config);

    int ci_separated = 0;
    std::ostringstream detail;
    for (double snr : config.snr_db) {
        const BerRecord& lmmse = find_record(result.records, snr, Scheme::lmmse);
        const BerRecord& minka = find_record(result.records, snr, Scheme::minka_B);
        const bool sep = minka.ber < lmmse.ber && separated(minka, lmmse);
        ci_separated += sep;
        detail << " " << snr << "dB[" << minka.ber << " vs " << lmmse.ber
               << (sep ? " sep" : "") << "]";
    }
    std::ostringstream out;
    out << "minka vs lmmse:" << detail.str() << "; CI-separated wins " << ci_separated
        << "/3 (need >= 2)";
    return {ci_separated >= 2, out.str()};
}

// --- 8. Schedule comparison ---------------------------------------------------
Outcome criterion_schedules() {
    ExperimentConfig config;
    config.channel = ChannelSpec::preset("proakis5");
    config.snr_db = {10.0, 12.0, 14.0};
    config.schemes = {Scheme::minka_A, Scheme::minka_B};
    const ExperimentResult result = run_ber_experiment(config);

    bool b_never_worse = true;
    int strict_wins = 0;
    std::ostringstream detail;
    for (double snr : config.snr_db) {
        const BerRecord& a = find_record(result.records, snr, Scheme::minka_A);
        const BerRecord& b = find_record(result.records, snr, Scheme::minka_B);
        b_never_worse = b_never_worse && b.ber <= a.ber;
        if (separated(b, a)) ++strict_wins;
        detail << " " << snr << "dB[B " << b.ber << " vs A " << a.ber << "]";
    }
    std::ostringstream out;
    out << detail.str() << "; B<=A " << (b_never_worse ? "everywhere" : "VIOLATED")
        << ", CI wins " << strict_wins << " (need >= 1)";
    return {b_never_worse && strict_wins >= 1, out.str()};
}

// --- 9. Fixed-point property ----------------------------------------------------
Outcome criterion_fixed_point() {
    const ChannelSpec spec = ChannelSpec::preset("proakis5");
    const StateSpaceModel model = realize_state_space(spec);
    const double noise_var = snr_to_noise_var(12.0, spec, 1.0);

    EqualizerConfig config;
    config.schedule = Schedule::B;
    config.max_iters = 120;  // extended run so the ramp reaches alpha = 1
    config.alpha = AlphaSchedule::two_phase(0.05, 1.1, 10);
    config.convergence_tol = 1e-4;
    config.record_residuals = true;

    int converged = 0;
    int checked_symbols = 0;
    double max_residual = 0.0;
    for (int block = 0; block < 50; ++block) {
        rng::Sampler rng(rng::derive(900, block));
        std::vector<int> symbols(512);
        for (int& s : symbols) s = rng.pm1();
        const TransmissionRecord record =
            simulate(model, symbols, noise_var, rng::derive(901, block));
        const std::vector<SoftBit> priors(512);
        const auto [llrs, diag] = ep_equalize(model, record, priors, config);
        if (!diag.converged) continue;
        if (alpha_at(config.alpha, diag.iterations_run - 1).value() < 1.0) continue;
        ++converged;
        for (double r : diag.moment_residuals) {
            if (!std::isfinite(r)) continue;
            ++checked_symbols;
            max_residual = std::max(max_residual, r);
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "converged %d/50 blocks at alpha=1, max residual %.3e over %d symbols "
                  "(tol 1e-2)",
                  converged, max_residual, checked_symbols);
    return {converged > 0 && max_residual <= 1e-2, buf};
}

// --- 10. Coded ordering -----------------------------------------------------------
Outcome criterion_coded() {
    ExperimentConfig config;
    config.channel = ChannelSpec::preset("proakis5");
    config.snr_db = {8.5};
    config.schemes = {Scheme::coded_std, Scheme::coded_minka};
    config.info_length = 1024;
    config.min_bits = 1000000;
    config.min_errors = 100;
    config.max_bits = 2000000;
    config.outer_iters = 4;
    config.equalizer.max_iters = 4;
    config.equalizer.alpha = AlphaSchedule::constant(0.05);
    const ExperimentResult result = run_ber_experiment(config);

    const BerRecord& std_rec = find_record(result.records, 8.5, Scheme::coded_std);
    const BerRecord& minka_rec = find_record(result.records, 8.5, Scheme::coded_minka);
    const bool in_window = std_rec.ber >= 1e-3 && std_rec.ber <= 1e-2;
    const bool improved = minka_rec.ber <= std_rec.ber;
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "coded_std ber %.3e (window [1e-3,1e-2] %s), coded_minka ber %.3e "
                  "(%lld vs %lld errors over %lld bits)",
                  std_rec.ber, in_window ? "ok" : "MISSED", minka_rec.ber, minka_rec.errors,
                  std_rec.errors, std_rec.bits);
    return {in_window && improved, buf};
}

// --- 11. Determinism ------------------------------------------------------------
Outcome criterion_determinism(const std::string& eqsim_path) {
    if (eqsim_path.empty()) return {false, "no --eqsim path provided"};
    const auto tmp = std::filesystem::temp_directory_path();
    const std::string out1 = (tmp / "eqsim_det_1.csv").string();
    const std::string out2 = (tmp / "eqsim_det_2.csv").string();
    const std::string args =
        " run --channel proakis5 --snr 8:10:2 --schemes lmmse,minka_B --block 256"
        " --min-bits 4096 --min-errors 1 --iters 5 --seed 42 --out ";
    if (std::system((eqsim_path + args + out1).c_str()) != 0)
        return {false, "first CLI run failed"};
    if (std::system((eqsim_path + args + out2).c_str()) != 0)
        return {false, "second CLI run failed"};

    std::ifstream f1(out1, std::ios::binary), f2(out2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    const bool identical = !s1.str().empty() && s1.str() == s2.str();
    std::filesystem::remove(out1);
    std::filesystem::remove(out2);
    char buf[120];
    std::snprintf(buf, sizeof buf, "CSV bytes %zu, identical: %s", s1.str().size(),
                  identical ? "yes" : "NO");
    return {identical, buf};
}

}  // namespace

int main(int argc, char** argv) {
    std::string eqsim_path;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--eqsim" && i + 1 < argc) {
            eqsim_path = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ',')) only.insert(std::stoi(item));
        } else {
            std::fprintf(stderr, "usage: %s [--eqsim <cli>] [--only 1,2,...]\n", argv[0]);
            return 2;
        }
    }

    using Criterion = std::pair<const char*, std::function<Outcome()>>;
    const std::vector<Criterion> criteria = {
        {"sum-product exactness", criterion_sum_product},
        {"trellis exactness", criterion_trellis},
        {"minka conversion correctness", criterion_minka_conversion},
        {"KL projection property", criterion_kl_projection},
        {"negative-variance occurrence", criterion_negvar_occurrence},
        {"uncoded FIR ordering", criterion_fir_ordering},
        {"uncoded IIR improvement", criterion_iir_improvement},
        {"schedule comparison", criterion_schedules},
        {"fixed-point property", criterion_fixed_point},
        {"coded ordering", criterion_coded},
        {"determinism", [&] { return criterion_determinism(eqsim_path); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(number)) continue;
        const auto start = chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failures += !outcome.passed;
        std::printf("[%2d] %-32s %s  (%s; %.1fs)\n", number, criteria[i].first,
                    outcome.passed ? "PASS" : "FAIL", outcome.detail.c_str(),
                    seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED");
    return failures == 0 ? 0 : 1;
}
