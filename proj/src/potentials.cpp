#include "advsamp/potentials.hpp"

#include <cmath>

#include "advsamp/dual.hpp"
#include "advsamp/errors.hpp"
#include "advsamp/geometry.hpp"

namespace advsamp {

namespace {

void check_input(const PotentialSpec& spec, const Configuration& x) {
    if (x.dim() != spec.expected_dim()) {
        throw Error::input_error("potential: configuration dimension " +
                                 std::to_string(x.dim()) + " does not match expected " +
                                 std::to_string(spec.expected_dim()));
    }
    for (int i = 0; i < x.dim(); ++i) {
        if (!std::isfinite(x.coords[i])) {
            throw Error::input_error("potential: non-finite coordinate at index " + std::to_string(i));
        }
    }
}

template <typename S>
S torsion_energy_t(const PotentialSpec& spec, const std::vector<S>& coords) {
    // Rotatable dihedrals sit on alternating bonds: quadruple k covers atoms
    // 2k .. 2k+3, so K dihedrals need 2K + 2 chain atoms.
    const int n_dihedrals = static_cast<int>(spec.torsion_amplitudes.size());
    S total{};
    for (int k = 0; k < n_dihedrals; ++k) {
        Vec3<S> p[4];
        for (int a = 0; a < 4; ++a) {
            const int atom = 2 * k + a;
            p[a] = {coords[3 * atom], coords[3 * atom + 1], coords[3 * atom + 2]};
        }
        const S theta = dihedral(p[0], p[1], p[2], p[3]);
        total += spec.torsion_amplitudes[k] * (1.0 - cos(theta - spec.torsion_phases[k]));
    }
    return total;
}

double polynomial_energy(const std::vector<MonomialTerm>& terms, const Eigen::VectorXd& c) {
    double e = 0.0;
    for (const auto& term : terms) {
        double v = term.coefficient;
        for (size_t j = 0; j < term.exponents.size(); ++j) {
            for (int p = 0; p < term.exponents[j]; ++p) v *= c[static_cast<int>(j)];
        }
        e += v;
    }
    return e;
}

// Closed-form term-wise partial derivative of a monomial sum.
Eigen::VectorXd polynomial_gradient(const std::vector<MonomialTerm>& terms, const Eigen::VectorXd& c) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(c.size());
    for (const auto& term : terms) {
        for (size_t i = 0; i < term.exponents.size(); ++i) {
            const int ei = term.exponents[i];
            if (ei == 0) continue;
            double v = term.coefficient * ei;
            for (size_t j = 0; j < term.exponents.size(); ++j) {
                int e = term.exponents[j] - (j == i ? 1 : 0);
                for (int p = 0; p < e; ++p) v *= c[static_cast<int>(j)];
            }
            g[static_cast<int>(i)] += v;
        }
    }
    return g;
}

const std::vector<MonomialTerm>& double_well_terms() {
    // E(x, y) = 10 x^4 - 10 x^2 + 2 x + 4 y^2
    static const std::vector<MonomialTerm> terms = {
        {{4, 0}, 10.0}, {{2, 0}, -10.0}, {{1, 0}, 2.0}, {{0, 2}, 4.0}};
    return terms;
}

}  // namespace

int PotentialSpec::expected_dim() const {
    switch (kind) {
        case PotentialKind::double_well:
            return 2;
        case PotentialKind::polynomial:
            return terms.empty() ? 0 : static_cast<int>(terms.front().exponents.size());
        case PotentialKind::torsion_chain:
            return 3 * (2 * static_cast<int>(torsion_amplitudes.size()) + 2);
    }
    return 0;
}

PotentialSpec PotentialSpec::double_well() {
    PotentialSpec s;
    s.kind = PotentialKind::double_well;
    return s;
}

PotentialSpec PotentialSpec::polynomial(std::vector<MonomialTerm> terms) {
    if (terms.empty()) throw Error::input_error("polynomial potential needs at least one term");
    const size_t arity = terms.front().exponents.size();
    for (const auto& t : terms) {
        if (t.exponents.size() != arity) {
            throw Error::input_error("polynomial potential: inconsistent exponent arity");
        }
        if (!std::isfinite(t.coefficient)) {
            throw Error::input_error("polynomial potential: non-finite coefficient");
        }
    }
    PotentialSpec s;
    s.kind = PotentialKind::polynomial;
    s.terms = std::move(terms);
    return s;
}

PotentialSpec PotentialSpec::torsion_chain(std::vector<double> amplitudes, std::vector<double> phases) {
    if (amplitudes.empty() || amplitudes.size() != phases.size()) {
        throw Error::input_error("torsion_chain potential: amplitudes and phases must be nonempty and matched");
    }
    for (double a : amplitudes) {
        if (!(a >= 0.0)) throw Error::input_error("torsion_chain potential: amplitudes must be >= 0");
    }
    PotentialSpec s;
    s.kind = PotentialKind::torsion_chain;
    s.torsion_amplitudes = std::move(amplitudes);
    s.torsion_phases = std::move(phases);
    return s;
}

double evaluate_energy(const PotentialSpec& spec, const Configuration& x) {
    check_input(spec, x);
    switch (spec.kind) {
        case PotentialKind::double_well:
            return polynomial_energy(double_well_terms(), x.coords);
        case PotentialKind::polynomial:
            return polynomial_energy(spec.terms, x.coords);
        case PotentialKind::torsion_chain: {
            std::vector<double> c(x.coords.data(), x.coords.data() + x.dim());
            return torsion_energy_t(spec, c);
        }
    }
    throw Error::input_error("potential: unknown kind");
}

Eigen::VectorXd evaluate_forces(const PotentialSpec& spec, const Configuration& x) {
    check_input(spec, x);
    switch (spec.kind) {
        case PotentialKind::double_well:
            return -polynomial_gradient(double_well_terms(), x.coords);
        case PotentialKind::polynomial:
            return -polynomial_gradient(spec.terms, x.coords);
        case PotentialKind::torsion_chain: {
            // Exact gradient by forward-mode differentiation, one coordinate
            // at a time; only the 12 coordinates of each dihedral matter but
            // the chain is small enough to keep this simple.
            const int d = x.dim();
            Eigen::VectorXd forces(d);
            std::vector<Dual<double>> c(d);
            for (int i = 0; i < d; ++i) c[i] = Dual<double>(x.coords[i]);
            for (int i = 0; i < d; ++i) {
                c[i].d = 1.0;
                forces[i] = -torsion_energy_t(spec, c).d;
                c[i].d = 0.0;
            }
            return forces;
        }
    }
    throw Error::input_error("potential: unknown kind");
}

LabeledSample label_configuration(const PotentialSpec& spec, const Configuration& x) {
    LabeledSample s;
    s.configuration = x;
    s.energy = evaluate_energy(spec, x);
    s.forces = evaluate_forces(spec, x);
    return s;
}

std::vector<LabeledSample> sample_initial_dataset(
    const PotentialSpec& spec, int n_candidates,
    const std::vector<std::pair<double, double>>& bounds,
    double energy_cutoff, Rng& rng) {
    if (n_candidates <= 0) throw Error::input_error("sample_initial_dataset: n_candidates must be > 0");
    const int d = spec.expected_dim();
    if (static_cast<int>(bounds.size()) != d) {
        throw Error::input_error("sample_initial_dataset: bounds size must match dimension");
    }
    for (const auto& [lo, hi] : bounds) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
            throw Error::input_error("sample_initial_dataset: invalid bounds");
        }
    }

    std::vector<LabeledSample> result;
    for (int attempt = 0; attempt <= 10; ++attempt) {
        Rng draw = (attempt == 0) ? rng.spawn(0) : rng.spawn(static_cast<std::uint64_t>(attempt));
        result.clear();
        for (int i = 0; i < n_candidates; ++i) {
            Configuration x;
            x.coords.resize(d);
            for (int j = 0; j < d; ++j) x.coords[j] = draw.uniform(bounds[j].first, bounds[j].second);
            const double e = evaluate_energy(spec, x);
            if (e < energy_cutoff) result.push_back(label_configuration(spec, x));
        }
        if (result.size() >= 10) return result;
    }
    // Degenerate filter: return whatever the last attempt produced.
    return result;
}

}  // namespace advsamp
