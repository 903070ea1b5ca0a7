#include "eqsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eqsim/rng.hpp"

namespace eqsim {
namespace {

std::vector<double> parse_csv(std::string_view text) {
    std::vector<double> values;
    std::string buf(text);
    std::stringstream ss(buf);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw std::invalid_argument("empty coefficient in list");
        std::size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw std::invalid_argument("bad coefficient: " + item);
        values.push_back(v);
    }
    if (values.empty()) throw std::invalid_argument("empty coefficient list");
    return values;
}

}  // namespace

ChannelSpec ChannelSpec::fir(std::vector<double> taps) {
    ChannelSpec spec;
    spec.b = std::move(taps);
    spec.validate();
    return spec;
}

ChannelSpec ChannelSpec::iir(std::vector<double> numerator, std::vector<double> denominator) {
    ChannelSpec spec;
    spec.b = std::move(numerator);
    spec.a = std::move(denominator);
    spec.validate();
    return spec;
}

ChannelSpec ChannelSpec::preset(std::string_view name) {
    if (name == "proakis5") return fir({0.227, 0.46, 0.688, 0.46, 0.227});
    if (name == "iir09") return iir({1.0}, {1.0, -0.9});
    throw std::invalid_argument("unknown channel preset: " + std::string(name));
}

ChannelSpec ChannelSpec::parse(std::string_view text) {
    if (text.rfind("fir:", 0) == 0) return fir(parse_csv(text.substr(4)));
    if (text.rfind("iir:", 0) == 0) {
        const std::string_view body = text.substr(4);
        const std::size_t slash = body.find('/');
        if (slash == std::string_view::npos)
            throw std::invalid_argument("iir channel needs 'b.../a...' coefficients");
        return iir(parse_csv(body.substr(0, slash)), parse_csv(body.substr(slash + 1)));
    }
    return preset(text);
}

void ChannelSpec::validate() const {
    if (b.empty() || a.empty()) throw std::invalid_argument("channel: empty coefficients");
    if (a.front() != 1.0) throw std::invalid_argument("channel: a0 must equal 1");
    for (double c : b)
        if (!std::isfinite(c)) throw std::invalid_argument("channel: non-finite numerator");
    for (double c : a)
        if (!std::isfinite(c)) throw std::invalid_argument("channel: non-finite denominator");
    if (b.size() == 1 && b.front() == 0.0)
        throw std::invalid_argument("channel: all-zero response");

    const std::size_t order = a.size() - 1;
    if (order == 0) return;
    // Poles are the eigenvalues of the companion matrix of z^p + a1 z^(p-1) + ... + ap.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(order, order);
    for (std::size_t j = 0; j < order; ++j) companion(0, j) = -a[j + 1];
    for (std::size_t i = 1; i < order; ++i) companion(i, i - 1) = 1.0;
    const Eigen::VectorXcd poles = companion.eigenvalues();
    for (Eigen::Index i = 0; i < poles.size(); ++i) {
        if (std::abs(poles[i]) >= 1.0)
            throw std::invalid_argument("channel: denominator has a pole on or outside the unit circle");
    }
}

std::vector<double> impulse_response(const ChannelSpec& spec, std::size_t count) {
    std::vector<double> h(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        double v = k < spec.b.size() ? spec.b[k] : 0.0;
        const std::size_t lag_max = std::min(k, spec.a.size() - 1);
        for (std::size_t j = 1; j <= lag_max; ++j) v -= spec.a[j] * h[k - j];
        h[k] = v;
    }
    return h;
}

double channel_energy(const ChannelSpec& spec) {
    double energy = 0.0;
    for (double h : impulse_response(spec, 200)) energy += h * h;
    return energy;
}

StateSpaceModel realize_state_space(const ChannelSpec& spec) {
    spec.validate();
    const std::size_t order = spec.a.size() - 1;
    const std::size_t dim = std::max(order, spec.b.size());

    StateSpaceModel model;
    model.A = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t j = 0; j < order; ++j) model.A(0, j) = -spec.a[j + 1];
    for (std::size_t i = 1; i < dim; ++i) model.A(i, i - 1) = 1.0;
    model.B = Eigen::VectorXd::Zero(dim);
    model.B(0) = 1.0;
    model.C = Eigen::RowVectorXd::Zero(dim);
    for (std::size_t i = 0; i < spec.b.size(); ++i) model.C(i) = spec.b[i];
    return model;
}

TransmissionRecord simulate(const StateSpaceModel& model, std::span<const int> symbols,
                            double noise_var, std::uint64_t seed) {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var))
        throw std::invalid_argument("simulate: noise variance must be positive");
    for (int x : symbols)
        if (x != 1 && x != -1) throw std::invalid_argument("simulate: symbols must be +-1");

    TransmissionRecord record;
    record.symbols.assign(symbols.begin(), symbols.end());
    record.noise_var = noise_var;
    record.seed = seed;
    record.observations.resize(symbols.size());

    rng::Sampler noise(seed);
    const double sigma = std::sqrt(noise_var);
    Eigen::VectorXd state = Eigen::VectorXd::Zero(model.dim());
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        state = model.A * state + model.B * static_cast<double>(symbols[k]);
        record.observations[k] = model.C * state + sigma * noise.gaussian();
    }
    return record;
}

double snr_to_noise_var(double snr_db, const ChannelSpec& spec, double code_rate) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_to_noise_var: non-finite SNR");
    if (!(code_rate > 0.0 && code_rate <= 1.0))
        throw std::invalid_argument("snr_to_noise_var: code rate outside (0, 1]");
    return channel_energy(spec) / (2.0 * code_rate * std::pow(10.0, snr_db / 10.0));
}

}  // namespace eqsim
