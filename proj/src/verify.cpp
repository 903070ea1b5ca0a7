// Self-verification: production message passing against brute-force oracles.
#include <cmath>

#include "eqsim/detail/logdomain.hpp"
#include "eqsim/harness.hpp"
#include "eqsim/oracles.hpp"
#include "eqsim/rng.hpp"

namespace eqsim {
namespace {

GaussianMessage random_proper_prior(rng::Sampler& rng) {
    const double weight = 0.2 + 4.8 * rng.uniform();
    const double mean = -2.0 + 4.0 * rng.uniform();
    return GaussianMessage(weight, weight * mean);
}

VerifyCheck check_kalman_vs_joint(int trials, std::uint64_t seed) {
    VerifyCheck check{"kalman_extrinsic vs joint_gaussian_extrinsic", 0.0, 1e-8, false};
    const std::size_t n = 8;
    rng::Sampler rng(seed);
    const ChannelSpec presets[2] = {ChannelSpec::preset("proakis5"),
                                    ChannelSpec::preset("iir09")};
    for (int trial = 0; trial < trials; ++trial) {
        const ChannelSpec& spec = presets[trial % 2];
        const StateSpaceModel model = realize_state_space(spec);
        std::vector<int> symbols(n);
        for (int& s : symbols) s = rng.pm1();
        const double noise_var = 0.05 + 0.95 * rng.uniform();
        const TransmissionRecord record = simulate(model, symbols, noise_var, rng.engine()());

        std::vector<GaussianMessage> inputs;
        for (std::size_t k = 0; k < n; ++k) inputs.push_back(random_proper_prior(rng));

        const auto fast = kalman_extrinsic(model, record.observations, noise_var, inputs,
                                           NegVarPolicy::allow);
        const auto exact =
            joint_gaussian_extrinsic(spec, record.observations, noise_var, inputs);
        for (std::size_t k = 0; k < n; ++k) {
            const auto [m1, v1] = fast[k].mean_var();
            const auto [m2, v2] = exact[k].mean_var();
            check.max_error = std::max({check.max_error, std::abs(m1 - m2), std::abs(v1 - v2)});
        }
    }
    check.passed = check.max_error <= check.tolerance;
    return check;
}

VerifyCheck check_bcjr_vs_exhaustive(int trials, std::uint64_t seed) {
    VerifyCheck check{"bcjr_equalize vs exhaustive_map_llrs", 0.0, 1e-9, false};
    const std::size_t n = 10;
    rng::Sampler rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        const ChannelSpec spec = ChannelSpec::fir(
            {1.0, -1.0 + 2.0 * rng.uniform(), -1.0 + 2.0 * rng.uniform()});
        std::vector<int> symbols(n);
        for (int& s : symbols) s = rng.pm1();
        const double noise_var = 0.1 + 0.9 * rng.uniform();
        const TransmissionRecord record = simulate(realize_state_space(spec), symbols,
                                                   noise_var, rng.engine()());
        std::vector<SoftBit> priors;
        for (std::size_t k = 0; k < n; ++k) priors.emplace_back(-2.0 + 4.0 * rng.uniform());

        const auto fast = bcjr_equalize(spec, record, priors, noise_var);
        const auto exact = exhaustive_map_llrs(spec, record.observations, priors, noise_var);
        for (std::size_t k = 0; k < n; ++k)
            check.max_error = std::max(check.max_error, std::abs(fast[k].llr() - exact[k].llr()));
    }
    check.passed = check.max_error <= check.tolerance;
    return check;
}

// Info-bit posteriors of the terminated code by enumerating all info words.
std::vector<double> enumerate_info_posteriors(std::span<const SoftBit> coded_llrs,
                                              const ConvCode& code, std::size_t info_len) {
    using detail::kLogZero;
    using detail::log_add;
    std::vector<double> num(info_len, kLogZero), den(info_len, kLogZero);
    for (std::size_t word = 0; word < (std::size_t{1} << info_len); ++word) {
        std::vector<int> info(info_len);
        for (std::size_t i = 0; i < info_len; ++i) info[i] = (word >> i) & 1u;
        const std::vector<int> symbols = conv_encode(info, code);
        double logp = 0.0;
        for (std::size_t j = 0; j < symbols.size(); ++j)
            logp += 0.5 * coded_llrs[j].llr() * symbols[j];
        for (std::size_t i = 0; i < info_len; ++i)
            (info[i] ? den[i] : num[i]) = log_add(info[i] ? den[i] : num[i], logp);
    }
    std::vector<double> llrs(info_len);
    for (std::size_t i = 0; i < info_len; ++i) llrs[i] = num[i] - den[i];
    return llrs;
}

VerifyCheck check_siso_vs_enumeration(int trials, std::uint64_t seed) {
    VerifyCheck check{"bcjr_decode vs codeword enumeration", 0.0, 1e-8, false};
    const std::size_t info_len = 6;
    const ConvCode code = ConvCode::k7();
    rng::Sampler rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<SoftBit> coded_llrs;
        for (std::size_t j = 0; j < code.coded_length(info_len); ++j)
            coded_llrs.emplace_back(-3.0 + 6.0 * rng.uniform());
        const SisoResult siso = bcjr_decode(coded_llrs, code);
        const std::vector<double> exact = enumerate_info_posteriors(coded_llrs, code, info_len);
        for (std::size_t i = 0; i < info_len; ++i)
            check.max_error =
                std::max(check.max_error, std::abs(siso.info_posterior[i].llr() - exact[i]));
    }
    check.passed = check.max_error <= check.tolerance;
    return check;
}

VerifyCheck check_minka_moment_match(int trials, std::uint64_t seed) {
    VerifyCheck check{"minka moment match vs two_point_moments", 0.0, 1e-10, false};
    rng::Sampler rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        const SoftBit forward(-8.0 + 16.0 * rng.uniform());
        const double weight = 0.05 + 9.95 * rng.uniform();
        // Keep the implied backward LLR below the clamp; the conversion is
        // exact only where nothing saturates.
        const double wmean = -10.0 + 20.0 * rng.uniform();
        const GaussianMessage incoming(weight, wmean);

        const auto minka = minka_gaussian(forward, incoming);
        if (!minka) continue;
        const GaussianMessage combined = multiply(*minka, incoming);
        if (combined.weight() <= 0.0) continue;
        const auto [mc, vc] = combined.mean_var();

        const double p_plus = 1.0 / (1.0 + std::exp(-forward.llr()));
        const auto [mt, vt] = two_point_moments(p_plus, incoming);
        check.max_error = std::max({check.max_error, std::abs(mc - mt), std::abs(vc - vt)});
    }
    check.passed = check.max_error <= check.tolerance;
    return check;
}

double two_point_kl(double f_plus, double mean, double variance) {
    const double f_minus = 1.0 - f_plus;
    const auto log_gauss = [&](double x) {
        return -0.5 * std::log(2.0 * M_PI * variance) -
               (x - mean) * (x - mean) / (2.0 * variance);
    };
    return f_plus * (std::log(f_plus) - log_gauss(1.0)) +
           f_minus * (std::log(f_minus) - log_gauss(-1.0));
}

VerifyCheck check_kl_projection(int trials, std::uint64_t seed) {
    // "error" is the worst KL advantage of any perturbed Gaussian (should be < 0).
    VerifyCheck check{"KL optimality of the moment-matched Gaussian", 0.0, 0.0, false};
    rng::Sampler rng(seed);
    double worst = -1e300;
    for (int trial = 0; trial < trials; ++trial) {
        const SoftBit forward(-6.0 + 12.0 * rng.uniform());
        const double weight = 0.1 + 4.9 * rng.uniform();
        const double mean = -2.0 + 4.0 * rng.uniform();
        const GaussianMessage incoming(weight, weight * mean);

        const SoftBit backward = gaussian_to_softbit(incoming);
        const TrueMoments t = true_moments(forward, backward);
        const double f_plus = 0.5 * (1.0 + t.mean);
        const double base = two_point_kl(f_plus, t.mean, t.variance);
        for (double eps : {0.01, -0.01}) {
            worst = std::max(worst, base - two_point_kl(f_plus, t.mean + eps, t.variance));
            worst = std::max(worst,
                             base - two_point_kl(f_plus, t.mean, t.variance * (1.0 + eps)));
        }
    }
    check.max_error = worst;  // negative margin means the matched Gaussian won everywhere
    check.passed = worst < 0.0;
    return check;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& options) {
    if (options.trials < 1) throw std::invalid_argument("verify: trials < 1");
    VerifyReport report;
    report.checks.push_back(check_kalman_vs_joint(options.trials, rng::derive(options.seed, 1)));
    report.checks.push_back(
        check_bcjr_vs_exhaustive(std::max(1, options.trials / 2), rng::derive(options.seed, 2)));
    report.checks.push_back(
        check_siso_vs_enumeration(std::max(1, options.trials / 10), rng::derive(options.seed, 3)));
    report.checks.push_back(
        check_minka_moment_match(options.trials * 100, rng::derive(options.seed, 4)));
    report.checks.push_back(
        check_kl_projection(options.trials * 10, rng::derive(options.seed, 5)));
    report.ok = true;
    for (const VerifyCheck& c : report.checks) report.ok = report.ok && c.passed;
    return report;
}

}  // namespace eqsim
