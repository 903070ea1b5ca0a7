#include "eqsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eqsim/rng.hpp"

#include <json.hpp>

namespace eqsim {

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::lmmse: return "lmmse";
        case Scheme::minka_A: return "minka_A";
        case Scheme::minka_B: return "minka_B";
        case Scheme::bcjr: return "bcjr";
        case Scheme::coded_std: return "coded_std";
        case Scheme::coded_minka: return "coded_minka";
    }
    throw std::logic_error("to_string: bad scheme");
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "lmmse") return Scheme::lmmse;
    if (name == "minka_A") return Scheme::minka_A;
    if (name == "minka_B") return Scheme::minka_B;
    if (name == "bcjr") return Scheme::bcjr;
    if (name == "coded_std") return Scheme::coded_std;
    if (name == "coded_minka") return Scheme::coded_minka;
    throw std::invalid_argument("unknown scheme: " + std::string(name));
}

bool is_coded(Scheme scheme) {
    return scheme == Scheme::coded_std || scheme == Scheme::coded_minka;
}

void ExperimentConfig::validate() const {
    channel.validate();
    if (snr_db.empty()) throw std::invalid_argument("experiment: empty SNR list");
    if (schemes.empty()) throw std::invalid_argument("experiment: empty scheme list");
    if (block_length == 0 || info_length == 0)
        throw std::invalid_argument("experiment: zero block length");
    if (min_bits <= 0 || min_errors <= 0 || max_bits < min_bits)
        throw std::invalid_argument("experiment: bad stopping rule");
    if (outer_iters < 1) throw std::invalid_argument("experiment: outer_iters < 1");
    equalizer.validate();
    code.validate();
}

namespace {

// Equalizer configuration actually used by a scheme. Standard-message schemes
// are the alpha = 0 special case and need a single sweep only.
EqualizerConfig scheme_config(const ExperimentConfig& config, Scheme scheme) {
    EqualizerConfig eq = config.equalizer;
    switch (scheme) {
        case Scheme::minka_A:
            eq.schedule = Schedule::A;
            break;
        case Scheme::minka_B:
        case Scheme::coded_minka:
            eq.schedule = Schedule::B;
            break;
        case Scheme::coded_std:
            eq.alpha = AlphaSchedule::constant(0.0);
            eq.max_iters = 1;
            break;
        default:
            break;
    }
    return eq;
}

struct PointAccumulator {
    long long bits = 0;
    long long errors = 0;
    long long negvar = 0;
    long long clamps = 0;
};

void run_uncoded_block(const ExperimentConfig& config, Scheme scheme,
                       const StateSpaceModel& model, double noise_var,
                       std::uint64_t block_seed, PointAccumulator& acc) {
    rng::Sampler symbol_rng(rng::derive(block_seed, 1));
    std::vector<int> symbols(config.block_length);
    for (int& s : symbols) s = symbol_rng.pm1();

    const TransmissionRecord record =
        simulate(model, symbols, noise_var, rng::derive(block_seed, 2));
    const std::vector<SoftBit> priors(config.block_length);  // neutral

    std::vector<SoftBit> llrs;
    if (scheme == Scheme::lmmse) {
        llrs = lmmse_equalize(model, record, priors);
    } else if (scheme == Scheme::bcjr) {
        llrs = bcjr_equalize(config.channel, record, priors, noise_var);
    } else {
        auto [out, diag] = ep_equalize(model, record, priors, scheme_config(config, scheme));
        llrs = std::move(out);
        acc.negvar += diag.negvar_count;
        acc.clamps += diag.clamp_count;
    }

    const std::vector<int> decisions = hard_decide(llrs, priors);
    for (std::size_t k = 0; k < symbols.size(); ++k)
        if (decisions[k] != symbols[k]) ++acc.errors;
    acc.bits += static_cast<long long>(symbols.size());
}

void run_coded_block(const ExperimentConfig& config, Scheme scheme,
                     const StateSpaceModel& model, const Interleaver& interleaver,
                     double noise_var, std::uint64_t block_seed, PointAccumulator& acc) {
    rng::Sampler bit_rng(rng::derive(block_seed, 1));
    std::vector<int> info(config.info_length);
    for (int& b : info) b = bit_rng.bit();

    const std::vector<int> coded = conv_encode(info, config.code);
    const std::vector<int> tx = interleaver.interleave(std::span<const int>(coded));
    const TransmissionRecord record =
        simulate(model, tx, noise_var, rng::derive(block_seed, 2));

    const TurboResult result = turbo_equalize(record, model, config.code, interleaver,
                                              scheme_config(config, scheme),
                                              config.outer_iters);
    acc.negvar += result.diagnostics.negvar_count;
    acc.clamps += result.diagnostics.clamp_count;
    for (std::size_t i = 0; i < info.size(); ++i)
        if (result.info_bits[i] != info[i]) ++acc.errors;
    acc.bits += static_cast<long long>(info.size());
}

int scheme_iters(const ExperimentConfig& config, Scheme scheme) {
    switch (scheme) {
        case Scheme::lmmse:
        case Scheme::bcjr: return 1;
        case Scheme::coded_std:
        case Scheme::coded_minka: return config.outer_iters;
        default: return config.equalizer.max_iters;
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

ExperimentResult run_ber_experiment(const ExperimentConfig& config) {
    config.validate();
    const StateSpaceModel model = realize_state_space(config.channel);

    ExperimentResult result;
    std::uint64_t point_index = 0;
    for (double snr : config.snr_db) {
        for (Scheme scheme : config.schemes) {
            ++point_index;
            if (scheme == Scheme::bcjr && !config.channel.is_fir()) {
                result.skipped.push_back({snr, scheme, "bcjr requires an FIR channel"});
                continue;
            }

            const bool coded = is_coded(scheme);
            const double rate =
                coded ? static_cast<double>(config.info_length) /
                            static_cast<double>(config.code.coded_length(config.info_length))
                      : 1.0;
            const double noise_var = snr_to_noise_var(snr, config.channel, rate);
            const std::uint64_t point_seed = rng::derive(config.base_seed, point_index);
            const Interleaver interleaver =
                coded ? Interleaver::random(config.code.coded_length(config.info_length),
                                            config.interleaver_seed)
                      : Interleaver::identity(0);

            const auto start = std::chrono::steady_clock::now();
            PointAccumulator acc;
            for (std::uint64_t block = 0;
                 (acc.bits < config.min_bits || acc.errors < config.min_errors) &&
                 acc.bits < config.max_bits;
                 ++block) {
                const std::uint64_t block_seed = rng::derive(point_seed, block);
                if (coded)
                    run_coded_block(config, scheme, model, interleaver, noise_var, block_seed,
                                    acc);
                else
                    run_uncoded_block(config, scheme, model, noise_var, block_seed, acc);
            }
            const auto stop = std::chrono::steady_clock::now();

            BerRecord record;
            record.snr_db = snr;
            record.scheme = scheme;
            record.iters = scheme_iters(config, scheme);
            record.bits = acc.bits;
            record.errors = acc.errors;
            record.ber = static_cast<double>(acc.errors) / static_cast<double>(acc.bits);
            record.negvar_count = acc.negvar;
            record.clamp_count = acc.clamps;
            record.wall_time_ms =
                config.measure_time
                    ? std::chrono::duration<double, std::milli>(stop - start).count()
                    : 0.0;
            record.seed = point_seed;
            result.records.push_back(record);
        }
    }
    return result;
}

void write_results(std::span<const BerRecord> records, std::ostream& out, bool jsonl) {
    if (jsonl) {
        for (const BerRecord& r : records) {
            nlohmann::ordered_json j;
            j["snr_db"] = r.snr_db;
            j["scheme"] = to_string(r.scheme);
            j["iters"] = r.iters;
            j["bits"] = r.bits;
            j["errors"] = r.errors;
            j["ber"] = r.ber;
            j["negvar_count"] = r.negvar_count;
            j["clamp_count"] = r.clamp_count;
            j["wall_time_ms"] = r.wall_time_ms;
            j["seed"] = r.seed;
            out << j.dump() << '\n';
        }
        return;
    }
    out << "snr_db,scheme,iters,bits,errors,ber,negvar_count,clamp_count,wall_time_ms,seed\n";
    for (const BerRecord& r : records) {
        out << format_double(r.snr_db) << ',' << to_string(r.scheme) << ',' << r.iters << ','
            << r.bits << ',' << r.errors << ',' << format_double(r.ber) << ','
            << r.negvar_count << ',' << r.clamp_count << ',' << format_double(r.wall_time_ms)
            << ',' << r.seed << '\n';
    }
}

void write_results(std::span<const BerRecord> records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_results: cannot open " + path.string());
    write_results(records, out, path.extension() == ".jsonl");
    out.flush();
    if (!out) throw std::runtime_error("write_results: write failed for " + path.string());
}

std::vector<BerRecord> read_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_results: cannot open " + path.string());

    std::vector<BerRecord> records;
    std::string line;
    const bool jsonl = path.extension() == ".jsonl";
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        BerRecord r;
        if (jsonl) {
            const auto j = nlohmann::json::parse(line);
            r.snr_db = j.at("snr_db");
            r.scheme = scheme_from_string(j.at("scheme").get<std::string>());
            r.iters = j.at("iters");
            r.bits = j.at("bits");
            r.errors = j.at("errors");
            r.ber = j.at("ber");
            r.negvar_count = j.at("negvar_count");
            r.clamp_count = j.at("clamp_count");
            r.wall_time_ms = j.at("wall_time_ms");
            r.seed = j.at("seed");
        } else {
            if (!header_seen) {
                header_seen = true;
                continue;
            }
            std::stringstream ss(line);
            std::string field;
            std::vector<std::string> fields;
            while (std::getline(ss, field, ',')) fields.push_back(field);
            if (fields.size() != 10)
                throw std::runtime_error("read_results: malformed row in " + path.string());
            r.snr_db = std::stod(fields[0]);
            r.scheme = scheme_from_string(fields[1]);
            r.iters = std::stoi(fields[2]);
            r.bits = std::stoll(fields[3]);
            r.errors = std::stoll(fields[4]);
            r.ber = std::stod(fields[5]);
            r.negvar_count = std::stoll(fields[6]);
            r.clamp_count = std::stoll(fields[7]);
            r.wall_time_ms = std::stod(fields[8]);
            r.seed = std::stoull(fields[9]);
        }
        records.push_back(r);
    }
    return records;
}

}  // namespace eqsim
