#include "eqsim/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqsim {
namespace {

std::vector<double> parse_params(std::string_view text) {
    std::vector<double> out;
    std::string buf(text);
    std::stringstream ss(buf);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

}  // namespace

AlphaSchedule AlphaSchedule::constant(double a0) {
    AlphaSchedule s{Kind::constant, a0, 1.0, 0};
    s.validate();
    return s;
}

AlphaSchedule AlphaSchedule::geometric(double a0, double growth) {
    AlphaSchedule s{Kind::geometric_ramp, a0, growth, 0};
    s.validate();
    return s;
}

AlphaSchedule AlphaSchedule::two_phase(double a0, double growth, int hold) {
    AlphaSchedule s{Kind::two_phase, a0, growth, hold};
    s.validate();
    return s;
}

AlphaSchedule AlphaSchedule::parse(std::string_view text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos)
        throw std::invalid_argument("alpha schedule needs 'kind:params'");
    const std::string_view kind = text.substr(0, colon);
    const std::vector<double> p = parse_params(text.substr(colon + 1));
    if (kind == "const" && p.size() == 1) return constant(p[0]);
    if (kind == "geo" && p.size() == 2) return geometric(p[0], p[1]);
    if (kind == "twophase" && p.size() == 3)
        return two_phase(p[0], p[1], static_cast<int>(p[2]));
    throw std::invalid_argument("bad alpha schedule: " + std::string(text));
}

void AlphaSchedule::validate() const {
    if (!(a0 >= 0.0 && a0 <= 1.0))
        throw std::invalid_argument("alpha schedule: a0 outside [0, 1]");
    if (!(growth >= 1.0)) throw std::invalid_argument("alpha schedule: growth factor < 1");
    if (hold < 0) throw std::invalid_argument("alpha schedule: negative hold count");
}

AlphaValue alpha_at(const AlphaSchedule& schedule, int iteration) {
    if (iteration < 0) throw std::invalid_argument("alpha_at: negative iteration");
    switch (schedule.kind) {
        case AlphaSchedule::Kind::constant:
            return AlphaValue(schedule.a0);
        case AlphaSchedule::Kind::geometric_ramp:
            return AlphaValue(
                std::min(1.0, schedule.a0 * std::pow(schedule.growth, iteration)));
        case AlphaSchedule::Kind::two_phase:
            if (iteration < schedule.hold) return AlphaValue(schedule.a0);
            return AlphaValue(std::min(
                1.0, schedule.a0 * std::pow(schedule.growth, iteration - schedule.hold)));
    }
    throw std::logic_error("alpha_at: unreachable");
}

}  // namespace eqsim
