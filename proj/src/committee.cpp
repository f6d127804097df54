#include "advsamp/committee.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "advsamp/csvio.hpp"
#include "advsamp/errors.hpp"

namespace advsamp {

double predict_energy(const ModelParameters& params, const MlpArchitecture& arch,
                      const Configuration& x) {
    if (x.dim() != arch.input_dim) {
        throw Error::config_error("predict_energy: configuration dimension mismatch");
    }
    return mlp_energy(params, arch, x.coords);
}

Eigen::VectorXd predict_forces(const ModelParameters& params, const MlpArchitecture& arch,
                               const Configuration& x) {
    if (x.dim() != arch.input_dim) {
        throw Error::config_error("predict_forces: configuration dimension mismatch");
    }
    return -mlp_input_gradient(params, arch, x.coords);
}

CommitteeStats committee_stats(const Committee& c, const Configuration& x) {
    const int M = c.size();
    if (M < 2) throw Error::config_error("committee_stats: need at least 2 members");
    const int d = x.dim();

    CommitteeStats stats;
    stats.member_energies.reserve(M);
    stats.member_forces.reserve(M);
    stats.mean_forces = Eigen::VectorXd::Zero(d);
    for (const auto& member : c.members) {
        stats.member_energies.push_back(predict_energy(member, c.architecture, x));
        stats.member_forces.push_back(predict_forces(member, c.architecture, x));
        stats.mean_forces += stats.member_forces.back();
    }
    stats.mean_energy = 0.0;
    for (double e : stats.member_energies) stats.mean_energy += e;
    stats.mean_energy /= M;
    stats.mean_forces /= M;

    double var_e = 0.0;
    double var_f = 0.0;
    for (int m = 0; m < M; ++m) {
        const double de = stats.member_energies[m] - stats.mean_energy;
        var_e += de * de;
        var_f += (stats.member_forces[m] - stats.mean_forces).squaredNorm() / d;
    }
    stats.var_energy = var_e / (M - 1);
    stats.var_forces = var_f / (M - 1);
    return stats;
}

UncertaintyThreshold fit_threshold(const Committee& c, const std::vector<LabeledSample>& train,
                                   double percentile, VarianceSource source) {
    if (train.empty()) throw Error::input_error("fit_threshold: empty training set");
    if (!(percentile > 0.0 && percentile <= 100.0)) {
        throw Error::input_error("fit_threshold: percentile must be in (0, 100]");
    }
    std::vector<double> variances;
    variances.reserve(train.size());
    for (const auto& sample : train) {
        const CommitteeStats s = committee_stats(c, sample.configuration);
        variances.push_back(source == VarianceSource::force_variance ? s.var_forces : s.var_energy);
    }
    std::sort(variances.begin(), variances.end());
    const size_t n = variances.size();
    size_t rank = static_cast<size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    UncertaintyThreshold thr;
    thr.t = variances[rank - 1];
    thr.percentile = percentile;
    thr.source = source;
    return thr;
}

bool classify_in_domain(double variance, const UncertaintyThreshold& thr) {
    if (variance < 0.0) throw Error::input_error("classify_in_domain: negative variance");
    return variance < thr.t;
}

Eigen::VectorXd committee_mean_energies(const Committee& c, const Eigen::MatrixXd& coords) {
    const int N = static_cast<int>(coords.cols());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(N);
    Eigen::MatrixXd features;
    if (c.architecture.feature_map == FeatureMap::identity) {
        features = coords;
    } else {
        features.resize(c.architecture.feature_dim(), N);
        for (int i = 0; i < N; ++i) {
            features.col(i) = compute_features(c.architecture.feature_map, coords.col(i));
        }
    }
    ForwardCache cache;
    for (const auto& member : c.members) {
        mlp_forward(member, c.architecture, features, &cache);
        mean += cache.energies.transpose();
    }
    return mean / c.size();
}

namespace {

const char* feature_map_name(FeatureMap map) {
    switch (map) {
        case FeatureMap::identity: return "identity";
        case FeatureMap::pairwise_distances: return "pairwise_distances";
        case FeatureMap::sin_cos_angles: return "sin_cos_angles";
    }
    return "identity";
}

FeatureMap feature_map_from_name(const std::string& name) {
    if (name == "identity") return FeatureMap::identity;
    if (name == "pairwise_distances") return FeatureMap::pairwise_distances;
    if (name == "sin_cos_angles") return FeatureMap::sin_cos_angles;
    throw Error::config_error("unknown feature map: " + name);
}

}  // namespace

std::string architecture_line(const MlpArchitecture& arch) {
    std::ostringstream os;
    os << arch.input_dim << ' ' << arch.hidden_layers << ' ' << arch.hidden_units
       << " softplus " << feature_map_name(arch.feature_map);
    return os.str();
}

MlpArchitecture parse_architecture_line(const std::string& line) {
    std::istringstream is(line);
    MlpArchitecture arch;
    std::string activation, fmap;
    if (!(is >> arch.input_dim >> arch.hidden_layers >> arch.hidden_units >> activation >> fmap)) {
        throw Error::config_error("malformed architecture line: " + line);
    }
    if (activation != "softplus") throw Error::config_error("unknown activation: " + activation);
    arch.activation = Activation::softplus;
    arch.feature_map = feature_map_from_name(fmap);
    arch.validate();
    return arch;
}

void save_model(const ModelParameters& params, const MlpArchitecture& arch, const std::string& path) {
    params.check_shapes(arch);
    std::ofstream out(path);
    if (!out) throw Error::input_error("cannot open model file for writing: " + path);
    out << "advsamp-model v1\n" << architecture_line(arch) << '\n';
    for (size_t l = 0; l < params.weights.size(); ++l) {
        const auto& w = params.weights[l];
        out << "W " << w.rows() << ' ' << w.cols() << '\n';
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                if (j) out << ' ';
                out << format_double(w(i, j));
            }
            out << '\n';
        }
        const auto& b = params.biases[l];
        out << "b " << b.size() << '\n';
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            if (j) out << ' ';
            out << format_double(b[j]);
        }
        out << '\n';
    }
}

ModelParameters load_model(const std::string& path, MlpArchitecture* arch_out) {
    std::ifstream in(path);
    if (!in) throw Error::input_error("cannot open model file: " + path);
    std::string line;
    std::getline(in, line);
    if (line != "advsamp-model v1") throw Error::input_error("bad model header in " + path);
    std::getline(in, line);
    const MlpArchitecture arch = parse_architecture_line(line);

    ModelParameters params;
    std::string tag;
    while (in >> tag) {
        if (tag == "W") {
            Eigen::Index rows, cols;
            in >> rows >> cols;
            Eigen::MatrixXd w(rows, cols);
            for (Eigen::Index i = 0; i < rows; ++i) {
                for (Eigen::Index j = 0; j < cols; ++j) in >> w(i, j);
            }
            params.weights.push_back(std::move(w));
        } else if (tag == "b") {
            Eigen::Index cols;
            in >> cols;
            Eigen::VectorXd b(cols);
            for (Eigen::Index j = 0; j < cols; ++j) in >> b[j];
            params.biases.push_back(std::move(b));
        } else {
            throw Error::input_error("unexpected token in model file: " + tag);
        }
    }
    params.check_shapes(arch);
    if (arch_out) *arch_out = arch;
    return params;
}

void save_committee(const Committee& c, const std::string& dir, const std::string& stem) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream manifest(fs::path(dir) / (stem + ".committee"));
    if (!manifest) throw Error::input_error("cannot write committee manifest in " + dir);
    manifest << "advsamp-committee v1\n" << architecture_line(c.architecture) << '\n';
    for (int m = 0; m < c.size(); ++m) {
        const std::string name = stem + "_member" + std::to_string(m) + ".model";
        save_model(c.members[m], c.architecture, (fs::path(dir) / name).string());
        manifest << name << '\n';
    }
}

Committee load_committee(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    std::ifstream in(manifest_path);
    if (!in) throw Error::input_error("cannot open committee manifest: " + manifest_path);
    std::string line;
    std::getline(in, line);
    if (line != "advsamp-committee v1") throw Error::input_error("bad committee header");
    std::getline(in, line);
    Committee c;
    c.architecture = parse_architecture_line(line);
    const fs::path dir = fs::path(manifest_path).parent_path();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        MlpArchitecture member_arch;
        c.members.push_back(load_model((dir / line).string(), &member_arch));
        if (!(member_arch == c.architecture)) {
            throw Error::input_error("committee member architecture mismatch: " + line);
        }
    }
    if (c.size() < 2) throw Error::input_error("committee manifest lists fewer than 2 members");
    return c;
}

}  // namespace advsamp
