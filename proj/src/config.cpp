#include "advsamp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "advsamp/csvio.hpp"
#include "advsamp/errors.hpp"

namespace advsamp {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error::config_error("config: value for " + key + " is not a number: " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    if (v != std::floor(v)) throw Error::config_error("config: value for " + key + " must be an integer");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw Error::config_error("config: value for " + key + " must be true/false");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::istringstream is(value);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (out.empty()) throw Error::config_error("config: value for " + key + " must be a number list");
    return out;
}

struct TorsionDefaults {
    std::vector<double> amplitudes = {5.0, 3.0};
    std::vector<double> phases = {M_PI, M_PI};
};

void apply_key(LoopConfig& cfg, TorsionDefaults& torsion, const std::string& section,
               const std::string& key, const std::string& value) {
    const std::string full = section + "." + key;
    if (section == "potential") {
        if (key == "kind") {
            if (value == "double_well") {
                cfg.potential = PotentialSpec::double_well();
            } else if (value == "torsion_chain") {
                cfg.potential = PotentialSpec::torsion_chain(torsion.amplitudes, torsion.phases);
            } else {
                throw Error::config_error("config: unknown potential kind " + value);
            }
        } else if (key == "bounds_lo" || key == "bounds_hi") {
            const double v = parse_number(full, value);
            if (cfg.bounds.empty()) cfg.bounds.assign(2, {-1.5, 1.5});
            for (auto& b : cfg.bounds) (key == "bounds_lo" ? b.first : b.second) = v;
        } else if (key == "init_candidates") {
            cfg.init_candidates = parse_int(full, value);
        } else if (key == "energy_cutoff") {
            cfg.energy_cutoff = parse_number(full, value);
        } else if (key == "torsion_amplitudes") {
            torsion.amplitudes = parse_list(full, value);
        } else if (key == "torsion_phases") {
            torsion.phases = parse_list(full, value);
        } else {
            throw Error::config_error("config: unknown key " + full);
        }
    } else if (section == "committee") {
        if (key == "members") {
            cfg.members = parse_int(full, value);
        } else if (key == "hidden_layers") {
            cfg.architecture.hidden_layers = parse_int(full, value);
        } else if (key == "hidden_units") {
            cfg.architecture.hidden_units = parse_int(full, value);
        } else if (key == "feature_map") {
            if (value == "identity") cfg.architecture.feature_map = FeatureMap::identity;
            else if (value == "pairwise_distances") cfg.architecture.feature_map = FeatureMap::pairwise_distances;
            else if (value == "sin_cos_angles") cfg.architecture.feature_map = FeatureMap::sin_cos_angles;
            else throw Error::config_error("config: unknown feature map " + value);
        } else {
            throw Error::config_error("config: unknown key " + full);
        }
    } else if (section == "train") {
        if (key == "epochs") cfg.train.epochs = parse_int(full, value);
        else if (key == "batch_size") cfg.train.batch_size = parse_int(full, value);
        else if (key == "learning_rate") cfg.train.learning_rate = parse_number(full, value);
        else if (key == "split") {
            const auto list = parse_list(full, value);
            if (list.size() != 3) throw Error::config_error("config: train.split needs 3 ratios");
            cfg.train.split_ratios = {list[0], list[1], list[2]};
        } else if (key == "resample_splits_per_member") {
            cfg.train.resample_splits_per_member = parse_bool(full, value);
        } else if (key == "plateau_scheduler") {
            cfg.train.plateau_scheduler = parse_bool(full, value);
        } else if (key == "alpha_E") {
            cfg.loss.alpha_E = parse_number(full, value);
        } else if (key == "alpha_F") {
            cfg.loss.alpha_F = parse_number(full, value);
        } else {
            throw Error::config_error("config: unknown key " + full);
        }
    } else if (section == "attack") {
        if (key == "steps") cfg.attack.steps = parse_int(full, value);
        else if (key == "learning_rate") cfg.attack.learning_rate = parse_number(full, value);
        else if (key == "sigma_delta") cfg.attack.delta_init_sigma = parse_number(full, value);
        else if (key == "n_seeds") cfg.attack.n_seeds = parse_int(full, value);
        else if (key == "kT") cfg.kT = parse_number(full, value);
        else if (key == "plain_ascent") cfg.attack.plain_ascent = parse_bool(full, value);
        else if (key == "loss_kind") {
            if (value == "force_variance") cfg.attack.loss_kind = VarianceSource::force_variance;
            else if (value == "energy_variance") cfg.attack.loss_kind = VarianceSource::energy_variance;
            else throw Error::config_error("config: unknown loss kind " + value);
        } else if (key == "space") {
            if (value == "coordinate") cfg.attack.space = AttackSpace::coordinate;
            else if (value == "collective_variable") cfg.attack.space = AttackSpace::collective_variable;
            else throw Error::config_error("config: unknown attack space " + value);
        } else {
            throw Error::config_error("config: unknown key " + full);
        }
    } else if (section == "selection") {
        if (key == "distance_threshold") cfg.selection.distance_threshold = parse_number(full, value);
        else if (key == "percentile") cfg.selection.uncertainty_percentile = parse_number(full, value);
        else if (key == "max_new") cfg.selection.max_new = parse_int(full, value);
        else if (key == "distance_kind") {
            if (value == "euclidean") cfg.selection.distance_kind = DistanceKind::euclidean;
            else if (value == "rmsd") cfg.selection.distance_kind = DistanceKind::rmsd;
            else throw Error::config_error("config: unknown distance kind " + value);
        } else if (key == "threshold_source") {
            if (value == "force_variance") cfg.threshold_source = VarianceSource::force_variance;
            else if (value == "energy_variance") cfg.threshold_source = VarianceSource::energy_variance;
            else throw Error::config_error("config: unknown threshold source " + value);
        } else {
            throw Error::config_error("config: unknown key " + full);
        }
    } else if (section == "loop") {
        if (key == "generations") cfg.generations = parse_int(full, value);
        else if (key == "random_sigma") cfg.random_sigma = parse_number(full, value);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_number(full, value));
        else if (key == "strategy") {
            if (value == "adversarial") cfg.strategy = Strategy::adversarial;
            else if (value == "random") cfg.strategy = Strategy::random;
            else throw Error::config_error("config: unknown strategy " + value);
        } else {
            throw Error::config_error("config: unknown key " + full);
        }
    } else if (section == "eval") {
        if (key == "grid_resolution") cfg.grid_resolution = parse_int(full, value);
        else throw Error::config_error("config: unknown key " + full);
    } else if (section == "cv") {
        if (key == "energy_ceiling") cfg.energy_ceiling = parse_number(full, value);
        else if (key == "init_halfwidth") cfg.cv_init_halfwidth = parse_number(full, value);
        else if (key == "init_count") cfg.cv_init_count = parse_int(full, value);
        else throw Error::config_error("config: unknown key " + full);
    } else {
        throw Error::config_error("config: unknown section " + section);
    }
}

void finalize(LoopConfig& cfg, const TorsionDefaults& torsion) {
    if (cfg.potential.kind == PotentialKind::torsion_chain) {
        cfg.potential = PotentialSpec::torsion_chain(torsion.amplitudes, torsion.phases);
        if (cfg.architecture.feature_map == FeatureMap::identity) {
            cfg.architecture.feature_map = FeatureMap::pairwise_distances;
        }
        cfg.attack.space = AttackSpace::collective_variable;
        cfg.selection.distance_kind = DistanceKind::rmsd;
    }
    cfg.architecture.input_dim = cfg.potential.expected_dim();
    if (static_cast<int>(cfg.bounds.size()) != cfg.architecture.input_dim) {
        const auto pattern = cfg.bounds.empty() ? std::pair<double, double>{-1.5, 1.5} : cfg.bounds.front();
        cfg.bounds.assign(cfg.architecture.input_dim, pattern);
    }
    cfg.validate();
}

}  // namespace

LoopConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    LoopConfig cfg;
    TorsionDefaults torsion;

    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw Error::config_error("config: cannot open " + path);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string t = trim(line);
            if (t.empty()) continue;
            if (t.front() == '[' && t.back() == ']') {
                section = trim(t.substr(1, t.size() - 2));
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw Error::config_error("config: malformed line " + std::to_string(lineno) + " in " + path);
            }
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (section.empty()) throw Error::config_error("config: key " + key + " outside any section");
            apply_key(cfg, torsion, section, key, value);
        }
    }

    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        const auto dot = ov.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            throw Error::config_error("config: override must look like section.key=value: " + ov);
        }
        apply_key(cfg, torsion, trim(ov.substr(0, dot)), trim(ov.substr(dot + 1, eq - dot - 1)),
                  trim(ov.substr(eq + 1)));
    }

    finalize(cfg, torsion);
    return cfg;
}

std::string serialize_config(const LoopConfig& cfg) {
    std::ostringstream os;
    os << "[potential]\n";
    os << "kind = "
       << (cfg.potential.kind == PotentialKind::double_well
               ? "double_well"
               : cfg.potential.kind == PotentialKind::torsion_chain ? "torsion_chain" : "polynomial")
       << '\n';
    if (cfg.potential.kind == PotentialKind::torsion_chain) {
        os << "torsion_amplitudes =";
        for (double a : cfg.potential.torsion_amplitudes) os << ' ' << format_double(a);
        os << "\ntorsion_phases =";
        for (double p : cfg.potential.torsion_phases) os << ' ' << format_double(p);
        os << '\n';
    }
    os << "bounds_lo = " << format_double(cfg.bounds.empty() ? -1.5 : cfg.bounds.front().first) << '\n';
    os << "bounds_hi = " << format_double(cfg.bounds.empty() ? 1.5 : cfg.bounds.front().second) << '\n';
    os << "init_candidates = " << cfg.init_candidates << '\n';
    os << "energy_cutoff = " << format_double(cfg.energy_cutoff) << '\n';

    os << "\n[committee]\n";
    os << "members = " << cfg.members << '\n';
    os << "hidden_layers = " << cfg.architecture.hidden_layers << '\n';
    os << "hidden_units = " << cfg.architecture.hidden_units << '\n';
    os << "feature_map = "
       << (cfg.architecture.feature_map == FeatureMap::identity
               ? "identity"
               : cfg.architecture.feature_map == FeatureMap::pairwise_distances ? "pairwise_distances"
                                                                                : "sin_cos_angles")
       << '\n';

    os << "\n[train]\n";
    os << "epochs = " << cfg.train.epochs << '\n';
    os << "batch_size = " << cfg.train.batch_size << '\n';
    os << "learning_rate = " << format_double(cfg.train.learning_rate) << '\n';
    os << "split = " << format_double(cfg.train.split_ratios[0]) << ' '
       << format_double(cfg.train.split_ratios[1]) << ' ' << format_double(cfg.train.split_ratios[2])
       << '\n';
    os << "resample_splits_per_member = " << (cfg.train.resample_splits_per_member ? "true" : "false") << '\n';
    os << "plateau_scheduler = " << (cfg.train.plateau_scheduler ? "true" : "false") << '\n';
    os << "alpha_E = " << format_double(cfg.loss.alpha_E) << '\n';
    os << "alpha_F = " << format_double(cfg.loss.alpha_F) << '\n';

    os << "\n[attack]\n";
    os << "steps = " << cfg.attack.steps << '\n';
    os << "learning_rate = " << format_double(cfg.attack.learning_rate) << '\n';
    os << "sigma_delta = " << format_double(cfg.attack.delta_init_sigma) << '\n';
    os << "n_seeds = " << cfg.attack.n_seeds << '\n';
    os << "kT = " << format_double(cfg.kT) << '\n';
    os << "loss_kind = "
       << (cfg.attack.loss_kind == VarianceSource::force_variance ? "force_variance" : "energy_variance")
       << '\n';
    os << "space = "
       << (cfg.attack.space == AttackSpace::coordinate ? "coordinate" : "collective_variable") << '\n';
    os << "plain_ascent = " << (cfg.attack.plain_ascent ? "true" : "false") << '\n';

    os << "\n[selection]\n";
    os << "distance_threshold = " << format_double(cfg.selection.distance_threshold) << '\n';
    os << "percentile = " << format_double(cfg.selection.uncertainty_percentile) << '\n';
    os << "max_new = " << cfg.selection.max_new << '\n';
    os << "distance_kind = "
       << (cfg.selection.distance_kind == DistanceKind::euclidean ? "euclidean" : "rmsd") << '\n';
    os << "threshold_source = "
       << (cfg.threshold_source == VarianceSource::force_variance ? "force_variance" : "energy_variance")
       << '\n';

    os << "\n[loop]\n";
    os << "generations = " << cfg.generations << '\n';
    os << "strategy = " << (cfg.strategy == Strategy::adversarial ? "adversarial" : "random") << '\n';
    os << "random_sigma = " << format_double(cfg.random_sigma) << '\n';
    os << "seed = " << cfg.seed << '\n';

    os << "\n[eval]\n";
    os << "grid_resolution = " << cfg.grid_resolution << '\n';

    os << "\n[cv]\n";
    os << "energy_ceiling = " << format_double(cfg.energy_ceiling) << '\n';
    os << "init_halfwidth = " << format_double(cfg.cv_init_halfwidth) << '\n';
    os << "init_count = " << cfg.cv_init_count << '\n';
    return os.str();
}

}  // namespace advsamp
