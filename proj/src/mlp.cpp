#include "advsamp/mlp.hpp"

#include <cmath>

#include "advsamp/errors.hpp"

namespace advsamp {

namespace {

// softplus(z) = log(1 + exp(z)), evaluated stably.
inline double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double logistic(double z) {
    return z > 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

void MlpArchitecture::validate() const {
    if (input_dim < 1) throw Error::config_error("architecture: input_dim must be >= 1");
    if (hidden_layers < 1) throw Error::config_error("architecture: hidden_layers must be >= 1");
    if (hidden_units < 1) throw Error::config_error("architecture: hidden_units must be >= 1");
    feature_dim();  // throws if the feature map rejects input_dim
}

void ModelParameters::check_shapes(const MlpArchitecture& arch) const {
    const int L = arch.hidden_layers;
    if (static_cast<int>(weights.size()) != L + 1 || static_cast<int>(biases.size()) != L + 1) {
        throw Error::config_error("parameters: layer count does not match architecture");
    }
    int in = arch.feature_dim();
    for (int l = 0; l < L; ++l) {
        if (weights[l].rows() != arch.hidden_units || weights[l].cols() != in ||
            biases[l].size() != arch.hidden_units) {
            throw Error::config_error("parameters: shape mismatch at layer " + std::to_string(l));
        }
        in = arch.hidden_units;
    }
    if (weights[L].rows() != 1 || weights[L].cols() != in || biases[L].size() != 1) {
        throw Error::config_error("parameters: output layer shape mismatch");
    }
    for (const auto& w : weights) {
        if (!w.allFinite()) throw Error::config_error("parameters: non-finite weight");
    }
    for (const auto& b : biases) {
        if (!b.allFinite()) throw Error::config_error("parameters: non-finite bias");
    }
}

bool ModelParameters::same_shape(const ModelParameters& other) const {
    if (weights.size() != other.weights.size()) return false;
    for (size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != other.weights[l].rows() ||
            weights[l].cols() != other.weights[l].cols()) return false;
    }
    return true;
}

ModelParameters initialize_parameters(const MlpArchitecture& arch, Rng& rng) {
    arch.validate();
    ModelParameters p;
    const int L = arch.hidden_layers;
    int in = arch.feature_dim();
    for (int l = 0; l <= L; ++l) {
        const int out = (l == L) ? 1 : arch.hidden_units;
        const double a = std::sqrt(6.0 / (in + out));
        Eigen::MatrixXd w(out, in);
        for (int i = 0; i < out; ++i) {
            for (int j = 0; j < in; ++j) w(i, j) = rng.uniform(-a, a);
        }
        p.weights.push_back(std::move(w));
        p.biases.push_back(Eigen::VectorXd::Zero(out));
        in = out;
    }
    return p;
}

ParameterGradients ParameterGradients::zeros_like(const ModelParameters& p) {
    ParameterGradients g;
    for (const auto& w : p.weights) g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    for (const auto& b : p.biases) g.biases.push_back(Eigen::VectorXd::Zero(b.size()));
    return g;
}

void ParameterGradients::set_zero() {
    for (auto& w : weights) w.setZero();
    for (auto& b : biases) b.setZero();
}

bool ParameterGradients::all_finite() const {
    for (const auto& w : weights) {
        if (!w.allFinite()) return false;
    }
    for (const auto& b : biases) {
        if (!b.allFinite()) return false;
    }
    return true;
}

void mlp_forward(const ModelParameters& params, const MlpArchitecture& arch,
                 const Eigen::MatrixXd& features, ForwardCache* cache) {
    if (features.rows() != arch.feature_dim()) {
        throw Error::config_error("mlp_forward: feature dimension mismatch");
    }
    const int L = arch.hidden_layers;
    cache->activations.assign(static_cast<size_t>(L) + 1, {});
    cache->sigmoid.assign(static_cast<size_t>(L), {});
    cache->activations[0] = features;
    for (int l = 0; l < L; ++l) {
        Eigen::MatrixXd z = params.weights[l] * cache->activations[l];
        z.colwise() += params.biases[l];
        cache->activations[l + 1] = z.unaryExpr([](double v) { return softplus(v); });
        cache->sigmoid[l] = z.unaryExpr([](double v) { return logistic(v); });
    }
    cache->energies = params.weights[L] * cache->activations[L];
    cache->energies.array() += params.biases[L][0];
}

void mlp_forward_tangent(const ModelParameters& params, const ForwardCache& cache,
                         const Eigen::MatrixXd& tangents, TangentCache* tcache) {
    const int L = static_cast<int>(cache.sigmoid.size());
    tcache->activations.assign(static_cast<size_t>(L) + 1, {});
    tcache->preact.assign(static_cast<size_t>(L), {});
    tcache->activations[0] = tangents;
    for (int l = 0; l < L; ++l) {
        tcache->preact[l] = params.weights[l] * tcache->activations[l];
        tcache->activations[l + 1] = cache.sigmoid[l].cwiseProduct(tcache->preact[l]);
    }
    tcache->energies = params.weights[L] * tcache->activations[L];
}

void mlp_reverse(const ModelParameters& params, const ForwardCache& cache,
                 const TangentCache* tcache,
                 const Eigen::RowVectorXd& coeff_E, const Eigen::RowVectorXd* coeff_Edot,
                 ParameterGradients* param_grads,
                 Eigen::MatrixXd* lambda_features, Eigen::MatrixXd* lambda_tangents) {
    const int L = static_cast<int>(cache.sigmoid.size());
    const bool dual = coeff_Edot != nullptr;
    if (dual && tcache == nullptr) {
        throw Error::config_error("mlp_reverse: tangent coefficients need a tangent cache");
    }

    // lam_a = dS/dA_l, lam_adot = dS/dAdot_l for the scalar S being reversed.
    Eigen::MatrixXd lam_a = params.weights[L].transpose() * coeff_E;
    Eigen::MatrixXd lam_adot;
    if (dual) lam_adot = params.weights[L].transpose() * (*coeff_Edot);

    if (param_grads) {
        param_grads->weights[L] += coeff_E * cache.activations[L].transpose();
        if (dual) param_grads->weights[L] += (*coeff_Edot) * tcache->activations[L].transpose();
        param_grads->biases[L][0] += coeff_E.sum();
    }

    for (int l = L - 1; l >= 0; --l) {
        const Eigen::MatrixXd& s = cache.sigmoid[l];  // softplus'
        // softplus'' = s (1 - s)
        Eigen::MatrixXd lam_z = lam_a.cwiseProduct(s);
        Eigen::MatrixXd lam_zdot;
        if (dual) {
            lam_z += lam_adot.cwiseProduct(s).cwiseProduct(
                (1.0 - s.array()).matrix().cwiseProduct(tcache->preact[l]));
            lam_zdot = lam_adot.cwiseProduct(s);
        }
        if (param_grads) {
            param_grads->weights[l] += lam_z * cache.activations[l].transpose();
            if (dual) param_grads->weights[l] += lam_zdot * tcache->activations[l].transpose();
            param_grads->biases[l] += lam_z.rowwise().sum();
        }
        lam_a = params.weights[l].transpose() * lam_z;
        if (dual) lam_adot = params.weights[l].transpose() * lam_zdot;
    }

    if (lambda_features) *lambda_features = std::move(lam_a);
    if (lambda_tangents) {
        if (!dual) throw Error::config_error("mlp_reverse: lambda_tangents requires tangent coefficients");
        *lambda_tangents = std::move(lam_adot);
    }
}

double mlp_energy(const ModelParameters& params, const MlpArchitecture& arch,
                  const Eigen::VectorXd& x) {
    ForwardCache cache;
    mlp_forward(params, arch, compute_features(arch.feature_map, x), &cache);
    return cache.energies[0];
}

Eigen::VectorXd mlp_input_gradient(const ModelParameters& params, const MlpArchitecture& arch,
                                   const Eigen::VectorXd& x) {
    Eigen::VectorXd phi;
    Eigen::MatrixXd jac;
    compute_features_jacobian(arch.feature_map, x, &phi, &jac);
    ForwardCache cache;
    mlp_forward(params, arch, phi, &cache);
    Eigen::MatrixXd lam;
    mlp_reverse(params, cache, nullptr, Eigen::RowVectorXd::Ones(1), nullptr, nullptr, &lam, nullptr);
    if (arch.feature_map == FeatureMap::identity) return lam.col(0);
    return jac.transpose() * lam.col(0);
}

}  // namespace advsamp
