#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mesoacc/model.hpp"

namespace mesoacc::props {

struct PropertyResult {
    std::string name;
    bool pass = false;
    long checked = 0;
    std::string detail;  // first failure, or a summary note
};

// Uniform draw from the admissible state box (gap in [min_gap, interaction
// range], bounded speeds, valid follower speed).
RelativeState sample_state(std::mt19937_64& rng, const VehicleParams& p);

// As sample_state, but at least `margin` away from every threshold in gap.
RelativeState sample_interior_state(std::mt19937_64& rng, const VehicleParams& p,
                                    double alpha_t, double margin);

// Admissible initial condition: additionally outside the unsafe domain.
RelativeState sample_init_state(std::mt19937_64& rng, const VehicleParams& p, double alpha_t);

// Exactly one raw domain predicate holds on interior states, and the
// precedence classifier agrees with it.
PropertyResult partition_property(long samples, std::uint64_t seed, const VehicleParams& p);

// emergency <= risky <= safe; for opening gaps the interaction and
// approach distances equal the safe distance.
PropertyResult ordering_property(long samples, std::uint64_t seed, const VehicleParams& p);

// At alpha_t = 0 the risky and safe distances collapse onto the emergency
// distance within tol.
PropertyResult collapse_property(long samples, std::uint64_t seed, const VehicleParams& p,
                                 double tol);

// Branch expressions agree where the relative speed is zero (the
// interaction distance may jump there; it is reported, not asserted).
PropertyResult continuity_property(long samples, std::uint64_t seed, const VehicleParams& p);

// Thresholds are pointwise nondecreasing in alpha_t.
PropertyResult monotonicity_property(long samples, std::uint64_t seed, const VehicleParams& p,
                                     double alpha_t_max);

// Commands stay within the acceleration bound, danger always brakes at
// -a_max, the closing-in law is exactly zero at zero relative speed, and
// equal inputs give bit-identical outputs.
PropertyResult control_property(long samples, std::uint64_t seed, const VehicleParams& p);

// The headway factor stays inside its bounds for arbitrary sample streams
// and decays monotonically toward 1 without variation.
PropertyResult alpha_bounds_property(long samples, std::uint64_t seed);

// The risky distance never drops below the emergency distance for any
// headway factor in range.
PropertyResult threshold_safety_property(long samples, std::uint64_t seed,
                                         const VehicleParams& p, double alpha_t_max);

// Random admissible two-vehicle starts with a bounded leader never enter
// the unsafe mode and never collide.
PropertyResult safety_property(long runs, std::uint64_t seed, const VehicleParams& p);

std::vector<PropertyResult> run_all_properties(long samples, std::uint64_t seed,
                                               const VehicleParams& p);

}  // namespace mesoacc::props
