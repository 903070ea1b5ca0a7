// eqsim: Monte-Carlo BER experiments for iterative Gaussian equalization.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqsim/harness.hpp"

namespace {

std::vector<double> parse_snr(const std::string& text) {
    std::vector<double> out;
    const auto colon1 = text.find(':');
    if (colon1 == std::string::npos) {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
        if (out.empty()) throw CLI::ValidationError("--snr", "empty SNR list");
        return out;
    }
    const auto colon2 = text.find(':', colon1 + 1);
    if (colon2 == std::string::npos)
        throw CLI::ValidationError("--snr", "expected start:stop:step");
    const double start = std::stod(text.substr(0, colon1));
    const double stop = std::stod(text.substr(colon1 + 1, colon2 - colon1 - 1));
    const double step = std::stod(text.substr(colon2 + 1));
    if (!(step > 0.0)) throw CLI::ValidationError("--snr", "step must be positive");
    for (double snr = start; snr <= stop + 1e-9; snr += step) out.push_back(snr);
    return out;
}

unsigned parse_octal(const std::string& text) {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(text, &pos, 8);
    if (pos != text.size()) throw CLI::ValidationError("--code", "bad octal generator");
    return static_cast<unsigned>(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative Gaussian (Kalman) equalization BER simulator"};
    app.require_subcommand(1);

    // --- run ---
    auto* run = app.add_subcommand("run", "Run a seeded Monte-Carlo BER sweep");
    std::string channel_text = "proakis5";
    std::string snr_text;
    std::string schemes_text = "lmmse,minka_B";
    std::string alpha_text = "geo:0.05,1.2";
    std::string schedule_text = "B";
    std::string negvar_text = "clamp";
    std::string code_text = "133,171";
    std::string out_path = "results.csv";
    eqsim::ExperimentConfig config;
    bool coded_flag = false;

    run->add_option("--channel", channel_text,
                    "proakis5 | iir09 | fir:<taps csv> | iir:<b csv>/<a csv>");
    run->add_option("--snr", snr_text, "SNR points in dB, start:stop:step or comma list")
        ->required();
    run->add_option("--schemes", schemes_text,
                    "comma list of lmmse,minka_A,minka_B,bcjr,coded_std,coded_minka");
    run->add_option("--block", config.block_length, "uncoded block length in symbols");
    run->add_option("--info-bits", config.info_length, "info bits per coded block");
    run->add_option("--min-bits", config.min_bits, "minimum bits per point");
    run->add_option("--min-errors", config.min_errors, "minimum errors per point");
    run->add_option("--max-bits", config.max_bits, "bit cap per point");
    run->add_option("--iters", config.equalizer.max_iters, "equalizer iterations");
    run->add_option("--schedule", schedule_text, "message update schedule, A or B");
    run->add_option("--alpha", alpha_text, "const:a0 | geo:a0,r | twophase:a0,r,N");
    run->add_option("--negvar", negvar_text, "negative-variance policy, clamp or allow");
    run->add_option("--llr-max", config.equalizer.llr_max, "LLR clamp magnitude");
    run->add_option("--tol", config.equalizer.convergence_tol, "LLR convergence tolerance");
    run->add_flag("--coded", coded_flag, "add coded_std,coded_minka to the scheme list");
    run->add_option("--code", code_text, "octal generator pair for the rate-1/2 code");
    run->add_option("--interleaver-seed", config.interleaver_seed, "interleaver seed");
    run->add_option("--outer-iters", config.outer_iters, "turbo outer iterations");
    run->add_option("--seed", config.base_seed, "base seed");
    run->add_option("--out", out_path, "output file (.csv or .jsonl)");
    run->add_flag("--timing", config.measure_time,
                  "record wall-clock times (breaks byte-identical reruns)");

    // --- verify ---
    auto* verify = app.add_subcommand("verify", "Check the fast paths against brute-force oracles");
    eqsim::VerifyOptions vopts;
    verify->add_option("--trials", vopts.trials, "trial count per check");
    verify->add_option("--seed", vopts.seed, "oracle-check seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            config.channel = eqsim::ChannelSpec::parse(channel_text);
            config.snr_db = parse_snr(snr_text);
            config.equalizer.alpha = eqsim::AlphaSchedule::parse(alpha_text);

            if (schedule_text == "A")
                config.equalizer.schedule = eqsim::Schedule::A;
            else if (schedule_text == "B")
                config.equalizer.schedule = eqsim::Schedule::B;
            else
                throw std::invalid_argument("--schedule must be A or B");

            if (negvar_text == "clamp")
                config.equalizer.negvar_policy = eqsim::NegVarPolicy::clamp;
            else if (negvar_text == "allow")
                config.equalizer.negvar_policy = eqsim::NegVarPolicy::allow;
            else
                throw std::invalid_argument("--negvar must be clamp or allow");

            {
                std::stringstream ss(code_text);
                std::string g1, g2;
                if (!std::getline(ss, g1, ',') || !std::getline(ss, g2))
                    throw std::invalid_argument("--code expects two octal generators");
                config.code.generators = {parse_octal(g1), parse_octal(g2)};
            }

            std::stringstream ss(schemes_text);
            std::string name;
            while (std::getline(ss, name, ','))
                config.schemes.push_back(eqsim::scheme_from_string(name));
            if (coded_flag) {
                for (eqsim::Scheme s : {eqsim::Scheme::coded_std, eqsim::Scheme::coded_minka})
                    if (std::find(config.schemes.begin(), config.schemes.end(), s) ==
                        config.schemes.end())
                        config.schemes.push_back(s);
            }
            config.validate();

            const eqsim::ExperimentResult result = eqsim::run_ber_experiment(config);
            eqsim::write_results(result.records, out_path);
            for (const eqsim::SkippedPoint& skip : result.skipped)
                std::cerr << "skipped " << eqsim::to_string(skip.scheme) << " at "
                          << skip.snr_db << " dB: " << skip.reason << '\n';
            std::cerr << "wrote " << result.records.size() << " records to " << out_path
                      << '\n';
            return 0;
        }

        const eqsim::VerifyReport report = eqsim::run_verification(vopts);
        for (const eqsim::VerifyCheck& c : report.checks)
            std::printf("%-48s max error %.3e (tol %.1e) %s\n", c.name.c_str(), c.max_error,
                        c.tolerance, c.passed ? "ok" : "FAIL");
        return report.ok ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
