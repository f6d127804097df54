#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "advsamp/rng.hpp"

namespace advsamp {

// A point in input space: flat coordinate vector, optionally tagged with
// species for molecular systems.
struct Configuration {
    Eigen::VectorXd coords;
    std::vector<int> species;  // empty unless the system is atomic

    int dim() const { return static_cast<int>(coords.size()); }
};

struct LabeledSample {
    Configuration configuration;
    double energy = 0.0;
    Eigen::VectorXd forces;
};

enum class PotentialKind { double_well, polynomial, torsion_chain };

// A polynomial term: per-coordinate exponents and a coefficient.
struct MonomialTerm {
    std::vector<int> exponents;
    double coefficient = 0.0;
};

struct PotentialSpec {
    PotentialKind kind = PotentialKind::double_well;
    std::vector<MonomialTerm> terms;          // polynomial kind
    std::vector<double> torsion_amplitudes;   // torsion_chain kind, >= 0
    std::vector<double> torsion_phases;       // torsion_chain kind (radians)

    // Expected configuration dimension; 2 for double_well, exponent arity for
    // polynomial, 3n for torsion_chain (n = 2 * amplitude count + 2, one
    // rotatable dihedral per alternating bond).
    int expected_dim() const;

    static PotentialSpec double_well();
    static PotentialSpec polynomial(std::vector<MonomialTerm> terms);
    static PotentialSpec torsion_chain(std::vector<double> amplitudes, std::vector<double> phases);
};

double evaluate_energy(const PotentialSpec& spec, const Configuration& x);
Eigen::VectorXd evaluate_forces(const PotentialSpec& spec, const Configuration& x);

LabeledSample label_configuration(const PotentialSpec& spec, const Configuration& x);

// Uniform candidates in `bounds`, kept when energy < energy_cutoff. If fewer
// than 10 survive, redraws with a fresh sub-seed up to 10 times.
std::vector<LabeledSample> sample_initial_dataset(
    const PotentialSpec& spec, int n_candidates,
    const std::vector<std::pair<double, double>>& bounds,
    double energy_cutoff, Rng& rng);

}  // namespace advsamp
