#pragma once

#include <Eigen/Core>

namespace advsamp {

enum class FeatureMap { identity, pairwise_distances, sin_cos_angles };

// Feature dimension produced from a flat input of length input_dim. Chain
// maps treat the input as n = input_dim/3 atoms in chain order.
int feature_dim(FeatureMap map, int input_dim);

Eigen::VectorXd compute_features(FeatureMap map, const Eigen::VectorXd& x);

// phi and the f-by-d Jacobian d(phi)/dx.
void compute_features_jacobian(FeatureMap map, const Eigen::VectorXd& x,
                               Eigen::VectorXd* phi, Eigen::MatrixXd* jac);

// sum_k w_k * (d^2 phi_k / dx^2) * c  -- the curvature term of the feature
// map needed for Hessian-vector products through it.
Eigen::VectorXd feature_hessian_contraction(FeatureMap map, const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& w, const Eigen::VectorXd& c);

}  // namespace advsamp
