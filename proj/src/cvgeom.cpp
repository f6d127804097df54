#include "advsamp/cvgeom.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <fstream>
#include <sstream>

#include "advsamp/errors.hpp"
#include "advsamp/geometry.hpp"

namespace advsamp {

void ChainTopology::validate() const {
    if (n_atoms < 4) throw Error::geometry_error("topology: need at least 4 atoms");
    if (!(bond_length > 0.0)) throw Error::geometry_error("topology: bond_length must be > 0");
    if (!(bond_angle > 0.0 && bond_angle < M_PI)) {
        throw Error::geometry_error("topology: bond_angle must be in (0, pi)");
    }
    if (dihedrals.size() != downstream.size()) {
        throw Error::geometry_error("topology: dihedral/downstream size mismatch");
    }
    for (size_t k = 0; k < dihedrals.size(); ++k) {
        const auto& q = dihedrals[k];
        for (int a = 0; a < 4; ++a) {
            if (q[a] < 0 || q[a] >= n_atoms) throw Error::geometry_error("topology: atom index out of range");
            if (a > 0 && q[a] != q[a - 1] + 1) {
                throw Error::geometry_error("topology: dihedral quadruples must be consecutive chain atoms");
            }
        }
        for (int atom : downstream[k]) {
            if (atom <= q[2]) {
                throw Error::geometry_error("topology: downstream atoms must come after the rotation bond");
            }
        }
    }
}

ChainTopology make_chain_topology(int n_atoms, double bond_length, double bond_angle) {
    ChainTopology topo;
    topo.n_atoms = n_atoms;
    topo.bond_length = bond_length;
    topo.bond_angle = bond_angle;
    for (int start = 0; start + 3 < n_atoms; start += 2) {
        topo.dihedrals.push_back({start, start + 1, start + 2, start + 3});
        std::vector<int> moved;
        for (int a = start + 3; a < n_atoms; ++a) moved.push_back(a);
        topo.downstream.push_back(std::move(moved));
    }
    topo.validate();
    return topo;
}

Configuration make_chain_configuration(const ChainTopology& topo) {
    // Planar zigzag: consecutive bond directions alternate +/- phi off the
    // x axis, which realizes the bond angle and trans dihedrals.
    const double phi = (M_PI - topo.bond_angle) / 2.0;
    Configuration x;
    x.coords.setZero(3 * topo.n_atoms);
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    for (int i = 1; i < topo.n_atoms; ++i) {
        const double sign = (i % 2 == 1) ? 1.0 : -1.0;
        pos += topo.bond_length * Eigen::Vector3d(std::cos(phi), sign * std::sin(phi), 0.0);
        x.coords.segment<3>(3 * i) = pos;
    }
    return x;
}

double dihedral_angle(const Configuration& coords, const std::array<int, 4>& quadruple) {
    Vec3<double> p[4];
    for (int a = 0; a < 4; ++a) {
        const int atom = quadruple[a];
        if (3 * atom + 2 >= coords.dim()) throw Error::geometry_error("dihedral_angle: atom index out of range");
        p[a] = {coords.coords[3 * atom], coords.coords[3 * atom + 1], coords.coords[3 * atom + 2]};
    }
    return dihedral(p[0], p[1], p[2], p[3]);
}

Configuration rotate_dihedral(const Configuration& coords, const ChainTopology& topo,
                              int dihedral_index, double delta) {
    if (dihedral_index < 0 || dihedral_index >= topo.n_dihedrals()) {
        throw Error::geometry_error("rotate_dihedral: dihedral index out of range");
    }
    if (delta == 0.0) return coords;
    const auto& q = topo.dihedrals[dihedral_index];
    const Eigen::Vector3d b = coords.coords.segment<3>(3 * q[1]);
    const Eigen::Vector3d c = coords.coords.segment<3>(3 * q[2]);
    // Axis b - c: a right-handed rotation by +delta about it adds +delta to
    // the signed dihedral.
    const Eigen::Vector3d axis_raw = b - c;
    const double axis_len = axis_raw.norm();
    if (axis_len < 1e-10) throw Error::geometry_error("rotate_dihedral: zero-length rotation bond");
    const Eigen::Vector3d u = axis_raw / axis_len;
    const double ca = std::cos(delta);
    const double sa = std::sin(delta);

    Configuration out = coords;
    for (int atom : topo.downstream[dihedral_index]) {
        const Eigen::Vector3d v = coords.coords.segment<3>(3 * atom) - c;
        const Eigen::Vector3d rotated =
            v * ca + u.cross(v) * sa + u * (u.dot(v)) * (1.0 - ca);
        out.coords.segment<3>(3 * atom) = rotated + c;
    }
    return out;
}

Configuration cv_backmap(const Configuration& seed, const ChainTopology& topo,
                         const Eigen::VectorXd& delta) {
    if (delta.size() != topo.n_dihedrals()) {
        throw Error::geometry_error("cv_backmap: delta size does not match dihedral count");
    }
    Configuration out = seed;
    for (int k = 0; k < topo.n_dihedrals(); ++k) out = rotate_dihedral(out, topo, k, delta[k]);
    return out;
}

CvVector measure_cvs(const Configuration& coords, const ChainTopology& topo) {
    CvVector cv;
    cv.angles.resize(topo.n_dihedrals());
    for (int k = 0; k < topo.n_dihedrals(); ++k) cv.angles[k] = dihedral_angle(coords, topo.dihedrals[k]);
    return cv;
}

Eigen::MatrixXd cv_backmap_jacobian(const Configuration& seed, const ChainTopology& topo,
                                    const Eigen::VectorXd& delta) {
    // The final geometry depends only on the final dihedral values, so the
    // derivative along delta_k is an infinitesimal rotation of dihedral k
    // applied to the already-backmapped configuration.
    const Configuration mapped = cv_backmap(seed, topo, delta);
    const int d = mapped.dim();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d, topo.n_dihedrals());
    for (int k = 0; k < topo.n_dihedrals(); ++k) {
        const auto& q = topo.dihedrals[k];
        const Eigen::Vector3d b = mapped.coords.segment<3>(3 * q[1]);
        const Eigen::Vector3d c = mapped.coords.segment<3>(3 * q[2]);
        const Eigen::Vector3d axis_raw = b - c;
        const double axis_len = axis_raw.norm();
        if (axis_len < 1e-10) throw Error::geometry_error("cv_backmap_jacobian: zero-length rotation bond");
        const Eigen::Vector3d u = axis_raw / axis_len;
        for (int atom : topo.downstream[k]) {
            const Eigen::Vector3d v = mapped.coords.segment<3>(3 * atom) - c;
            jac.block<3, 1>(3 * atom, k) = u.cross(v);
        }
    }
    return jac;
}

void save_topology(const ChainTopology& topo, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error::input_error("cannot write topology file: " + path);
    out << "atoms = " << topo.n_atoms << '\n';
    out << "bond_length = " << topo.bond_length << '\n';
    out << "bond_angle = " << topo.bond_angle << '\n';
    for (const auto& q : topo.dihedrals) {
        out << "dihedral = " << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
    }
}

ChainTopology load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error::input_error("cannot open topology file: " + path);
    ChainTopology topo;
    topo.dihedrals.clear();
    topo.downstream.clear();
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream is(line);
        std::string key, eq;
        if (!(is >> key >> eq) || eq != "=") continue;
        if (key == "atoms") {
            is >> topo.n_atoms;
        } else if (key == "bond_length") {
            is >> topo.bond_length;
        } else if (key == "bond_angle") {
            is >> topo.bond_angle;
        } else if (key == "dihedral") {
            std::array<int, 4> q{};
            is >> q[0] >> q[1] >> q[2] >> q[3];
            topo.dihedrals.push_back(q);
            std::vector<int> moved;
            for (int a = q[3]; a < topo.n_atoms; ++a) moved.push_back(a);
            topo.downstream.push_back(std::move(moved));
        } else {
            throw Error::input_error("topology file: unknown key " + key);
        }
    }
    topo.validate();
    return topo;
}

}  // namespace advsamp
