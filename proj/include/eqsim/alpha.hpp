// Damping-factor schedules: alpha as a function of the iteration number.
#pragma once

#include <string_view>

#include "eqsim/softbit.hpp"

namespace eqsim {

/// How the mixing exponent alpha evolves over iterations. Ramps start small
/// and grow geometrically; two_phase holds the initial value for a fixed
/// number of iterations first. Values are capped at 1.
struct AlphaSchedule {
    enum class Kind { constant, geometric_ramp, two_phase };

    Kind kind = Kind::geometric_ramp;
    double a0 = 0.05;
    double growth = 1.2;
    int hold = 0;

    static AlphaSchedule constant(double a0);
    static AlphaSchedule geometric(double a0, double growth);
    static AlphaSchedule two_phase(double a0, double growth, int hold);

    /// CLI forms: "const:a0", "geo:a0,r", "twophase:a0,r,N".
    static AlphaSchedule parse(std::string_view text);

    void validate() const;
};

AlphaValue alpha_at(const AlphaSchedule& schedule, int iteration);

}  // namespace eqsim
