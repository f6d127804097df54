#pragma once

#include <array>
#include <string>
#include <vector>

#include "advsamp/adversary.hpp"
#include "advsamp/potentials.hpp"

namespace advsamp {

// Linear chain with fixed bonds/angles and a set of rotatable dihedrals.
// Each dihedral stores its defining quadruple and the atoms rigidly rotated
// with it (everything after the third quadruple atom).
struct ChainTopology {
    int n_atoms = 6;
    double bond_length = 1.5;
    double bond_angle = 1.9111355;  // radians, ~109.5 degrees
    std::vector<std::array<int, 4>> dihedrals;
    std::vector<std::vector<int>> downstream;

    int n_dihedrals() const { return static_cast<int>(dihedrals.size()); }
    void validate() const;
};

// Rotatable dihedrals on alternating bonds: quadruples starting at atoms
// 0, 2, 4, ... (the torsion_chain oracle uses the same convention).
ChainTopology make_chain_topology(int n_atoms, double bond_length, double bond_angle);

// Planar zigzag reference chain with all rotatable dihedrals at pi (trans).
Configuration make_chain_configuration(const ChainTopology& topo);

struct CvVector {
    Eigen::VectorXd angles;  // radians, one per rotatable dihedral
};

double dihedral_angle(const Configuration& coords, const std::array<int, 4>& quadruple);

Configuration rotate_dihedral(const Configuration& coords, const ChainTopology& topo,
                              int dihedral_index, double delta);

// Applies rotate_dihedral for each dihedral in ascending index order.
Configuration cv_backmap(const Configuration& seed, const ChainTopology& topo,
                         const Eigen::VectorXd& delta);

CvVector measure_cvs(const Configuration& coords, const ChainTopology& topo);

// d(coords)/d(delta) of cv_backmap, evaluated at the backmapped geometry.
Eigen::MatrixXd cv_backmap_jacobian(const Configuration& seed, const ChainTopology& topo,
                                    const Eigen::VectorXd& delta);

// Space adapter letting `adversary` optimize delta in CV space.
class CvAdapter final : public SpaceAdapter {
public:
    explicit CvAdapter(ChainTopology topo) : topo_(std::move(topo)) { topo_.validate(); }

    int delta_dim(const Configuration&) const override { return topo_.n_dihedrals(); }
    Configuration map(const Configuration& seed, const Eigen::VectorXd& delta) const override {
        return cv_backmap(seed, topo_, delta);
    }
    Eigen::MatrixXd jacobian(const Configuration& seed, const Eigen::VectorXd& delta) const override {
        return cv_backmap_jacobian(seed, topo_, delta);
    }
    const ChainTopology& topology() const { return topo_; }

private:
    ChainTopology topo_;
};

void save_topology(const ChainTopology& topo, const std::string& path);
ChainTopology load_topology(const std::string& path);

}  // namespace advsamp
