#include "advsamp/features.hpp"

#include <vector>

#include "advsamp/dual.hpp"
#include "advsamp/errors.hpp"
#include "advsamp/geometry.hpp"

namespace advsamp {

namespace {

int atom_count(int input_dim) {
    if (input_dim % 3 != 0 || input_dim < 12) {
        throw Error::input_error("feature map: chain features need input_dim = 3n with n >= 4");
    }
    return input_dim / 3;
}

template <typename S>
std::vector<S> chain_sincos_t(const std::vector<S>& coords, int n) {
    std::vector<S> out;
    out.reserve(2 * (n - 3));
    for (int k = 0; k + 3 < n; ++k) {
        Vec3<S> p[4];
        for (int a = 0; a < 4; ++a) {
            const int atom = k + a;
            p[a] = {coords[3 * atom], coords[3 * atom + 1], coords[3 * atom + 2]};
        }
        const S theta = dihedral(p[0], p[1], p[2], p[3]);
        out.push_back(sin(theta));
        out.push_back(cos(theta));
    }
    return out;
}

}  // namespace

int feature_dim(FeatureMap map, int input_dim) {
    switch (map) {
        case FeatureMap::identity:
            return input_dim;
        case FeatureMap::pairwise_distances: {
            const int n = atom_count(input_dim);
            return n * (n - 1) / 2;
        }
        case FeatureMap::sin_cos_angles: {
            const int n = atom_count(input_dim);
            return 2 * (n - 3);
        }
    }
    return input_dim;
}

Eigen::VectorXd compute_features(FeatureMap map, const Eigen::VectorXd& x) {
    switch (map) {
        case FeatureMap::identity:
            return x;
        case FeatureMap::pairwise_distances: {
            const int n = atom_count(static_cast<int>(x.size()));
            Eigen::VectorXd phi(n * (n - 1) / 2);
            int k = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    phi[k++] = (x.segment<3>(3 * i) - x.segment<3>(3 * j)).norm();
                }
            }
            return phi;
        }
        case FeatureMap::sin_cos_angles: {
            const int n = atom_count(static_cast<int>(x.size()));
            std::vector<double> coords(x.data(), x.data() + x.size());
            const auto vals = chain_sincos_t(coords, n);
            return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<int>(vals.size()));
        }
    }
    throw Error::input_error("feature map: unknown kind");
}

void compute_features_jacobian(FeatureMap map, const Eigen::VectorXd& x,
                               Eigen::VectorXd* phi, Eigen::MatrixXd* jac) {
    const int d = static_cast<int>(x.size());
    switch (map) {
        case FeatureMap::identity:
            if (phi) *phi = x;
            if (jac) *jac = Eigen::MatrixXd::Identity(d, d);
            return;
        case FeatureMap::pairwise_distances: {
            const int n = atom_count(d);
            const int f = n * (n - 1) / 2;
            if (phi) phi->resize(f);
            if (jac) jac->setZero(f, d);
            int k = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j, ++k) {
                    const Eigen::Vector3d u = x.segment<3>(3 * i) - x.segment<3>(3 * j);
                    const double r = u.norm();
                    if (r < 1e-12) throw Error::geometry_error("pairwise_distances: coincident atoms");
                    if (phi) (*phi)[k] = r;
                    if (jac) {
                        const Eigen::Vector3d uhat = u / r;
                        jac->block<1, 3>(k, 3 * i) = uhat.transpose();
                        jac->block<1, 3>(k, 3 * j) = -uhat.transpose();
                    }
                }
            }
            return;
        }
        case FeatureMap::sin_cos_angles: {
            const int n = atom_count(d);
            const int f = 2 * (n - 3);
            if (phi) phi->resize(f);
            if (jac) jac->setZero(f, d);
            std::vector<Dual<double>> coords(d);
            for (int i = 0; i < d; ++i) coords[i] = Dual<double>(x[i]);
            if (phi) {
                const auto vals = chain_sincos_t(coords, n);
                for (int k = 0; k < f; ++k) (*phi)[k] = vals[k].v;
            }
            if (jac) {
                for (int i = 0; i < d; ++i) {
                    coords[i].d = 1.0;
                    const auto vals = chain_sincos_t(coords, n);
                    for (int k = 0; k < f; ++k) (*jac)(k, i) = vals[k].d;
                    coords[i].d = 0.0;
                }
            }
            return;
        }
    }
    throw Error::input_error("feature map: unknown kind");
}

Eigen::VectorXd feature_hessian_contraction(FeatureMap map, const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& w, const Eigen::VectorXd& c) {
    const int d = static_cast<int>(x.size());
    switch (map) {
        case FeatureMap::identity:
            return Eigen::VectorXd::Zero(d);
        case FeatureMap::pairwise_distances: {
            // H_k for a distance r = |r_i - r_j| acts as (I - uu^T)/r on the
            // relative displacement.
            const int n = atom_count(d);
            Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
            int k = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j, ++k) {
                    if (w[k] == 0.0) continue;
                    const Eigen::Vector3d u = x.segment<3>(3 * i) - x.segment<3>(3 * j);
                    const double r = u.norm();
                    if (r < 1e-12) throw Error::geometry_error("pairwise_distances: coincident atoms");
                    const Eigen::Vector3d uhat = u / r;
                    const Eigen::Vector3d rel = c.segment<3>(3 * i) - c.segment<3>(3 * j);
                    const Eigen::Vector3d hc = w[k] * (rel - uhat * uhat.dot(rel)) / r;
                    out.segment<3>(3 * i) += hc;
                    out.segment<3>(3 * j) -= hc;
                }
            }
            return out;
        }
        case FeatureMap::sin_cos_angles: {
            // psi(x) = w . phi(x); second derivative along c via nested duals.
            const int n = atom_count(d);
            const int f = 2 * (n - 3);
            Eigen::VectorXd out(d);
            std::vector<Dual<Dual<double>>> coords(d);
            for (int i = 0; i < d; ++i) {
                coords[i].v = Dual<double>(x[i]);
                coords[i].d = Dual<double>(c[i]);
            }
            for (int i = 0; i < d; ++i) {
                coords[i].v.d = 1.0;
                const auto vals = chain_sincos_t(coords, n);
                Dual<Dual<double>> psi{};
                for (int k = 0; k < f; ++k) psi += w[k] * vals[k];
                out[i] = psi.d.d;
                coords[i].v.d = 0.0;
            }
            return out;
        }
    }
    throw Error::input_error("feature map: unknown kind");
}

}  // namespace advsamp
