#pragma once

#include <string>
#include <vector>

#include "advsamp/mlp.hpp"
#include "advsamp/potentials.hpp"

namespace advsamp {

struct Committee {
    MlpArchitecture architecture;
    std::vector<ModelParameters> members;

    int size() const { return static_cast<int>(members.size()); }
};

struct CommitteeStats {
    double mean_energy = 0.0;
    double var_energy = 0.0;
    Eigen::VectorXd mean_forces;
    double var_forces = 0.0;
    std::vector<double> member_energies;
    std::vector<Eigen::VectorXd> member_forces;
};

enum class VarianceSource { force_variance, energy_variance };

struct UncertaintyThreshold {
    double t = 0.0;
    double percentile = 80.0;
    VarianceSource source = VarianceSource::force_variance;
};

double predict_energy(const ModelParameters& params, const MlpArchitecture& arch,
                      const Configuration& x);
Eigen::VectorXd predict_forces(const ModelParameters& params, const MlpArchitecture& arch,
                               const Configuration& x);

CommitteeStats committee_stats(const Committee& c, const Configuration& x);

// Nearest-rank percentile of the per-sample variance over the training set.
UncertaintyThreshold fit_threshold(const Committee& c, const std::vector<LabeledSample>& train,
                                   double percentile, VarianceSource source);

// Eq-(8)-style classifier: in-domain iff variance < t (strict).
bool classify_in_domain(double variance, const UncertaintyThreshold& thr);

// Batched mean energy over many configurations (columns of `coords`).
Eigen::VectorXd committee_mean_energies(const Committee& c, const Eigen::MatrixXd& coords);

// Text model format: header, architecture line, then W/b blocks.
void save_model(const ModelParameters& params, const MlpArchitecture& arch, const std::string& path);
ModelParameters load_model(const std::string& path, MlpArchitecture* arch);

// Committee manifest: shared architecture line plus member file names.
void save_committee(const Committee& c, const std::string& dir, const std::string& stem);
Committee load_committee(const std::string& manifest_path);

std::string architecture_line(const MlpArchitecture& arch);
MlpArchitecture parse_architecture_line(const std::string& line);

}  // namespace advsamp
