#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "advsamp/features.hpp"
#include "advsamp/rng.hpp"

namespace advsamp {

enum class Activation { softplus };

struct MlpArchitecture {
    int input_dim = 2;
    int hidden_layers = 4;
    int hidden_units = 1024;
    Activation activation = Activation::softplus;
    FeatureMap feature_map = FeatureMap::identity;

    int feature_dim() const { return advsamp::feature_dim(feature_map, input_dim); }
    void validate() const;
    bool operator==(const MlpArchitecture&) const = default;
};

// Per-layer weights/biases; layers[hidden_layers] is the 1-row output layer.
struct ModelParameters {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    void check_shapes(const MlpArchitecture& arch) const;
    bool same_shape(const ModelParameters& other) const;
};

// Uniform [-a, a] with a = sqrt(6 / (fan_in + fan_out)); zero biases.
ModelParameters initialize_parameters(const MlpArchitecture& arch, Rng& rng);

// Gradient accumulator shaped like ModelParameters.
struct ParameterGradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static ParameterGradients zeros_like(const ModelParameters& p);
    void set_zero();
    bool all_finite() const;
};

// Cached intermediates of one batched forward pass. Columns are samples;
// rows of the input are *feature-space* coordinates.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations;   // A_0 = features, ..., A_L
    std::vector<Eigen::MatrixXd> sigmoid;       // softplus' at each hidden layer
    Eigen::RowVectorXd energies;                // output row, one per column
};

// Tangent intermediates for the same batch (forward-over-reverse support).
struct TangentCache {
    std::vector<Eigen::MatrixXd> activations;   // Adot_0 = feature tangents, ...
    std::vector<Eigen::MatrixXd> preact;        // Zdot at each hidden layer
    Eigen::RowVectorXd energies;                // Edot per column
};

// Forward pass on feature inputs (feature_dim x N).
void mlp_forward(const ModelParameters& params, const MlpArchitecture& arch,
                 const Eigen::MatrixXd& features, ForwardCache* cache);

// Forward tangent pass reusing a value cache; `tangents` is feature_dim x N.
void mlp_forward_tangent(const ModelParameters& params, const ForwardCache& cache,
                         const Eigen::MatrixXd& tangents, TangentCache* tcache);

// Reverse pass for the scalar sum_i [ coeff_E[i] * E_i + coeff_Edot[i] * Edot_i ].
// Any of the outputs may be null. When coeff_Edot is used, `tcache` must hold
// the matching tangent pass; the returned lambda_features is then the
// Hessian-vector product H_phi * tangent (plus first-order terms from
// coeff_E), and lambda_tangents equals the feature-space gradient scaled by
// coeff_Edot.
void mlp_reverse(const ModelParameters& params, const ForwardCache& cache,
                 const TangentCache* tcache,
                 const Eigen::RowVectorXd& coeff_E, const Eigen::RowVectorXd* coeff_Edot,
                 ParameterGradients* param_grads,
                 Eigen::MatrixXd* lambda_features, Eigen::MatrixXd* lambda_tangents);

// Convenience single-configuration entry points (through the feature map).
double mlp_energy(const ModelParameters& params, const MlpArchitecture& arch,
                  const Eigen::VectorXd& x);
Eigen::VectorXd mlp_input_gradient(const ModelParameters& params, const MlpArchitecture& arch,
                                   const Eigen::VectorXd& x);

}  // namespace advsamp
