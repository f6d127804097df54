#include "advsamp/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "advsamp/errors.hpp"

namespace advsamp {

Configuration CoordinateAdapter::map(const Configuration& seed, const Eigen::VectorXd& delta) const {
    if (delta.size() != seed.dim()) {
        throw Error::attack_error("coordinate adapter: delta dimension mismatch");
    }
    Configuration out = seed;
    out.coords += delta;
    return out;
}

Eigen::MatrixXd CoordinateAdapter::jacobian(const Configuration& seed, const Eigen::VectorXd&) const {
    return Eigen::MatrixXd::Identity(seed.dim(), seed.dim());
}

void AttackConfig::validate() const {
    if (steps < 1) throw Error::config_error("attack: steps must be >= 1");
    if (!(learning_rate > 0.0)) throw Error::config_error("attack: learning_rate must be > 0");
    if (delta_init_sigma < 0.0) throw Error::config_error("attack: delta_init_sigma must be >= 0");
    if (n_seeds < 1) throw Error::config_error("attack: n_seeds must be >= 1");
}

ThermoContext partition_function(const std::vector<LabeledSample>& data, double kT) {
    if (data.empty()) throw Error::input_error("partition_function: empty dataset");
    if (!(kT > 0.0)) throw Error::input_error("partition_function: kT must be > 0");
    std::vector<double> exponents;
    exponents.reserve(data.size());
    for (const auto& s : data) {
        const double e = -s.energy / kT;
        if (e > 700.0) {
            throw Error::numeric_error(
                "partition_function: exp overflow (energy " + std::to_string(s.energy) +
                ", kT " + std::to_string(kT) + "); re-reference the energies");
        }
        exponents.push_back(e);
    }
    // Sort before summing so Q is independent of dataset order, then
    // Kahan-compensate the accumulation.
    std::sort(exponents.begin(), exponents.end());
    double sum = 0.0, comp = 0.0;
    for (double e : exponents) {
        const double term = std::exp(e);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    ThermoContext ctx;
    ctx.Q = sum;
    ctx.kT = kT;
    return ctx;
}

double boltzmann_probability(double mean_energy, const ThermoContext& ctx) {
    if (!(ctx.Q > 0.0) || !(ctx.kT > 0.0)) {
        throw Error::input_error("boltzmann_probability: invalid thermo context");
    }
    const double e = -mean_energy / ctx.kT;
    if (e > 700.0) {
        throw Error::numeric_error("boltzmann_probability: exp overflow; re-reference the energies");
    }
    return std::exp(e) / ctx.Q;
}

AttackBatchEval adversarial_loss_batch(const Committee& c, const ThermoContext& ctx,
                                       const Eigen::MatrixXd& coords, VarianceSource loss_kind,
                                       bool want_gradient) {
    const int M = c.size();
    if (M < 2) throw Error::config_error("adversarial_loss: need at least 2 committee members");
    const int d = static_cast<int>(coords.rows());
    const int K = static_cast<int>(coords.cols());
    const MlpArchitecture& arch = c.architecture;
    if (d != arch.input_dim) throw Error::attack_error("adversarial_loss: coordinate dimension mismatch");
    const bool identity = arch.feature_map == FeatureMap::identity;
    const int f = arch.feature_dim();

    // Shared feature evaluation; jacobians only when needed.
    Eigen::MatrixXd features(f, K);
    std::vector<Eigen::MatrixXd> jac;
    const bool force_kind = loss_kind == VarianceSource::force_variance;
    const bool need_jac = !identity && (force_kind || want_gradient);
    if (need_jac) jac.resize(K);
    for (int k = 0; k < K; ++k) {
        if (identity) {
            features.col(k) = coords.col(k);
        } else {
            Eigen::VectorXd phi;
            compute_features_jacobian(arch.feature_map, coords.col(k), &phi,
                                      need_jac ? &jac[k] : nullptr);
            features.col(k) = phi;
        }
    }

    std::vector<ForwardCache> caches(M);
    std::vector<Eigen::MatrixXd> g_phi(M);       // feature-space gradients
    std::vector<Eigen::MatrixXd> grad_e(M);      // dE/dx per member (input space)
    Eigen::MatrixXd energies(M, K);
    const bool need_grad_e = force_kind || want_gradient;
    for (int m = 0; m < M; ++m) {
        mlp_forward(c.members[m], arch, features, &caches[m]);
        energies.row(m) = caches[m].energies;
        if (need_grad_e) {
            mlp_reverse(c.members[m], caches[m], nullptr, Eigen::RowVectorXd::Ones(K), nullptr,
                        nullptr, &g_phi[m], nullptr);
            if (identity) {
                grad_e[m] = g_phi[m];
            } else {
                grad_e[m].resize(d, K);
                for (int k = 0; k < K; ++k) grad_e[m].col(k) = jac[k].transpose() * g_phi[m].col(k);
            }
        }
    }

    AttackBatchEval out;
    out.mean_energy = energies.colwise().mean().transpose();
    out.variance.resize(K);
    out.probability.resize(K);
    out.loss.resize(K);

    Eigen::MatrixXd mean_grad;
    if (need_grad_e) {
        mean_grad = Eigen::MatrixXd::Zero(d, K);
        for (int m = 0; m < M; ++m) mean_grad += grad_e[m];
        mean_grad /= M;
    }

    for (int k = 0; k < K; ++k) {
        double var = 0.0;
        if (force_kind) {
            for (int m = 0; m < M; ++m) {
                var += (grad_e[m].col(k) - mean_grad.col(k)).squaredNorm() / d;
            }
        } else {
            for (int m = 0; m < M; ++m) {
                const double de = energies(m, k) - out.mean_energy[k];
                var += de * de;
            }
        }
        out.variance[k] = var / (M - 1);
        out.probability[k] = boltzmann_probability(out.mean_energy[k], ctx);
        out.loss[k] = out.probability[k] * out.variance[k];
    }

    if (!want_gradient) return out;

    Eigen::MatrixXd grad_var = Eigen::MatrixXd::Zero(d, K);
    if (force_kind) {
        // dVar/dx = -(2 / (d (M-1))) sum_m H^(m) (F^(m) - Fbar); the
        // Hessian-vector products run forward-over-reverse per member.
        TangentCache tcache;
        Eigen::MatrixXd tangents(f, K);
        const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(K);
        const Eigen::RowVectorXd zeros = Eigen::RowVectorXd::Zero(K);
        for (int m = 0; m < M; ++m) {
            // Direction in input space: c = grad_e - mean_grad = -(F - Fbar).
            const Eigen::MatrixXd dir = grad_e[m] - mean_grad;
            if (identity) {
                tangents = dir;
            } else {
                for (int k = 0; k < K; ++k) tangents.col(k) = jac[k] * dir.col(k);
            }
            mlp_forward_tangent(c.members[m], caches[m], tangents, &tcache);
            Eigen::MatrixXd hvp_phi;
            mlp_reverse(c.members[m], caches[m], &tcache, zeros, &ones, nullptr, &hvp_phi, nullptr);
            if (identity) {
                grad_var += hvp_phi;
            } else {
                for (int k = 0; k < K; ++k) {
                    grad_var.col(k) += jac[k].transpose() * hvp_phi.col(k) +
                                       feature_hessian_contraction(arch.feature_map, coords.col(k),
                                                                   g_phi[m].col(k), dir.col(k));
                }
            }
        }
        // H c with c = -(F - Fbar) equals -H (F - Fbar) already.
        grad_var *= 2.0 / (static_cast<double>(d) * (M - 1));
    } else {
        for (int m = 0; m < M; ++m) {
            for (int k = 0; k < K; ++k) {
                grad_var.col(k) += (energies(m, k) - out.mean_energy[k]) * grad_e[m].col(k);
            }
        }
        grad_var *= 2.0 / (M - 1);
    }

    out.grad_coords.resize(d, K);
    for (int k = 0; k < K; ++k) {
        out.grad_coords.col(k) =
            out.probability[k] *
            (grad_var.col(k) - (out.variance[k] / ctx.kT) * mean_grad.col(k));
    }
    return out;
}

double adversarial_loss(const Committee& c, const ThermoContext& ctx,
                        const Configuration& x_delta, VarianceSource loss_kind) {
    const auto eval = adversarial_loss_batch(c, ctx, x_delta.coords, loss_kind, false);
    return eval.loss[0];
}

Eigen::VectorXd attack_gradient(const Committee& c, const ThermoContext& ctx,
                                const Configuration& seed, const Eigen::VectorXd& delta,
                                VarianceSource loss_kind, const SpaceAdapter& adapter) {
    if (delta.size() != adapter.delta_dim(seed)) {
        throw Error::attack_error("attack_gradient: delta dimension mismatch");
    }
    const Configuration x = adapter.map(seed, delta);
    const auto eval = adversarial_loss_batch(c, ctx, x.coords, loss_kind, true);
    Eigen::VectorXd grad;
    if (adapter.is_identity()) {
        grad = eval.grad_coords.col(0);
    } else {
        grad = adapter.jacobian(seed, delta).transpose() * eval.grad_coords.col(0);
    }
    if (!grad.allFinite()) throw Error::attack_error("attack_gradient: non-finite gradient");
    return grad;
}

std::vector<AttackResult> run_attack_batch(const Committee& c, const ThermoContext& ctx,
                                           const std::vector<Configuration>& seeds,
                                           const AttackConfig& cfg, Rng& rng,
                                           const SpaceAdapter& adapter) {
    cfg.validate();
    const int K = static_cast<int>(seeds.size());
    if (K == 0) return {};
    const int d = seeds.front().dim();
    const int delta_d = adapter.delta_dim(seeds.front());

    Eigen::MatrixXd delta(delta_d, K);
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < delta_d; ++i) {
            delta(i, k) = cfg.delta_init_sigma > 0.0 ? rng.normal(0.0, cfg.delta_init_sigma) : 0.0;
        }
    }

    std::vector<AttackResult> results(K);
    for (int k = 0; k < K; ++k) {
        results[k].seed = seeds[k];
        results[k].loss_trajectory.reserve(cfg.steps + 1);
    }

    // Adam moments over the delta matrix.
    Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(delta_d, K);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(delta_d, K);

    Eigen::MatrixXd coords(d, K);
    auto assemble = [&]() {
        for (int k = 0; k < K; ++k) coords.col(k) = adapter.map(seeds[k], delta.col(k)).coords;
    };

    for (int step = 0; step <= cfg.steps; ++step) {
        assemble();
        const bool last = step == cfg.steps;
        const auto eval = adversarial_loss_batch(c, ctx, coords, cfg.loss_kind, !last);
        for (int k = 0; k < K; ++k) {
            results[k].loss_trajectory.push_back(eval.loss[k]);
            results[k].mean_energy_trajectory.push_back(eval.mean_energy[k]);
            results[k].variance_trajectory.push_back(eval.variance[k]);
            results[k].probability_trajectory.push_back(eval.probability[k]);
        }
        if (last) break;

        Eigen::MatrixXd grad(delta_d, K);
        if (adapter.is_identity()) {
            grad = eval.grad_coords;
        } else {
            for (int k = 0; k < K; ++k) {
                grad.col(k) = adapter.jacobian(seeds[k], delta.col(k)).transpose() *
                              eval.grad_coords.col(k);
            }
        }
        if (!grad.allFinite()) {
            throw Error::attack_error("run_attack: non-finite gradient at step " + std::to_string(step));
        }

        if (cfg.plain_ascent) {
            delta += cfg.learning_rate * grad;
        } else {
            const double t = step + 1;
            m1 = cfg.adam.beta1 * m1 + (1.0 - cfg.adam.beta1) * grad;
            m2 = cfg.adam.beta2 * m2 + (1.0 - cfg.adam.beta2) * grad.cwiseProduct(grad);
            const double bc1 = 1.0 - std::pow(cfg.adam.beta1, t);
            const double bc2 = 1.0 - std::pow(cfg.adam.beta2, t);
            // Ascent: move along +grad.
            delta.array() +=
                cfg.learning_rate * (m1.array() / bc1) / ((m2.array() / bc2).sqrt() + cfg.adam.epsilon);
        }
    }

    for (int k = 0; k < K; ++k) {
        auto& r = results[k];
        r.final_delta = delta.col(k);
        r.attacked = adapter.map(seeds[k], delta.col(k));
        r.final_loss = r.loss_trajectory.back();
        r.final_stats = committee_stats(c, r.attacked);
        r.probability = r.probability_trajectory.back();
        r.zero_signal = std::all_of(r.loss_trajectory.begin(), r.loss_trajectory.end(),
                                    [](double v) { return v == 0.0; });
    }
    return results;
}

AttackResult run_attack(const Committee& c, const ThermoContext& ctx, const Configuration& seed,
                        const AttackConfig& cfg, Rng& rng, const SpaceAdapter& adapter) {
    return run_attack_batch(c, ctx, {seed}, cfg, rng, adapter).front();
}

}  // namespace advsamp
