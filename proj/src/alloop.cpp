#include "advsamp/alloop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "advsamp/config.hpp"
#include "advsamp/csvio.hpp"
#include "advsamp/errors.hpp"

namespace advsamp {

namespace fs = std::filesystem;

void LoopConfig::validate() const {
    architecture.validate();
    if (members < 2) throw Error::config_error("loop: committee needs at least 2 members");
    loss.validate();
    train.validate();
    attack.validate();
    selection.validate();
    if (!(kT > 0.0)) throw Error::config_error("loop: kT must be > 0");
    if (generations < 1) throw Error::config_error("loop: generations must be >= 1");
    if (!(random_sigma >= 0.0)) throw Error::config_error("loop: random_sigma must be >= 0");
    if (init_candidates < 1) throw Error::config_error("loop: init_candidates must be >= 1");
    if (grid_resolution < 2) throw Error::config_error("loop: grid_resolution must be >= 2");
    if (static_cast<int>(bounds.size()) != potential.expected_dim()) {
        throw Error::config_error("loop: bounds dimension does not match the potential");
    }
    for (const auto& b : bounds) {
        if (!(b.first < b.second)) throw Error::config_error("loop: bounds must satisfy lo < hi");
    }
    if (attack.space == AttackSpace::collective_variable &&
        potential.kind != PotentialKind::torsion_chain) {
        throw Error::config_error("loop: collective-variable attacks require the torsion_chain potential");
    }
}

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double h = q * (static_cast<double>(v.size()) - 1.0);
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(const std::vector<double>& v) { return quantile(v, 0.5); }

std::vector<int> draw_without_replacement(int n, int count, Rng& rng) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    const int take = std::min(count, n);
    std::vector<int> out;
    out.reserve(take);
    for (int i = 0; i < take; ++i) {
        const size_t pick = static_cast<size_t>(rng.below(pool.size()));
        out.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return out;
}

ChainTopology topology_for(const PotentialSpec& spec) {
    const int n_atoms = 2 * static_cast<int>(spec.torsion_amplitudes.size()) + 2;
    return make_chain_topology(n_atoms, 1.5, 1.9111355);
}

void write_attack_logs(const std::vector<AttackResult>& results, const std::string& path,
                       const ChainTopology* topo) {
    std::ofstream out(path);
    if (!out) throw Error::input_error("cannot write attack log: " + path);
    out << "seed_id,step,loss,mean_energy,var_forces,p";
    if (topo) out << ",phi,psi";
    out << '\n';
    for (size_t s = 0; s < results.size(); ++s) {
        const auto& r = results[s];
        for (size_t step = 0; step < r.loss_trajectory.size(); ++step) {
            out << s << ',' << step << ',' << format_double(r.loss_trajectory[step]) << ','
                << format_double(r.mean_energy_trajectory[step]) << ','
                << format_double(r.variance_trajectory[step]) << ','
                << format_double(r.probability_trajectory[step]);
            if (topo) {
                // Only the endpoint geometry is materialized; earlier steps
                // report the final CVs as placeholders are not useful, so log
                // the dihedrals of the attacked configuration on every row.
                const CvVector cv = measure_cvs(r.attacked, *topo);
                for (int k = 0; k < cv.angles.size(); ++k) out << ',' << format_double(cv.angles[k]);
            }
            out << '\n';
        }
    }
}

}  // namespace

void write_candidates_csv(const std::vector<AttackResult>& results, const std::string& source,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error::input_error("cannot write candidates file: " + path);
    if (results.empty()) {
        out << "source\n";
        return;
    }
    const int d = results.front().attacked.dim();
    for (int i = 0; i < d; ++i) out << 'x' << (i + 1) << ',';
    out << "energy,";
    for (int i = 0; i < d; ++i) out << 'f' << (i + 1) << ',';
    out << "source\n";
    for (const auto& r : results) {
        for (int i = 0; i < d; ++i) out << format_double(r.attacked.coords[i]) << ',';
        out << format_double(r.final_stats.mean_energy) << ',';
        for (int i = 0; i < d; ++i) {
            out << (r.final_stats.mean_forces.size() == d
                        ? format_double(r.final_stats.mean_forces[i])
                        : "0")
                << ',';
        }
        out << source << '\n';
    }
}

double grid_rmse(const Committee& c, const PotentialSpec& spec,
                 const std::vector<std::pair<double, double>>& bounds, int resolution) {
    if (bounds.size() != 2 || spec.expected_dim() != 2) {
        throw Error::input_error("grid_rmse: only 2-D potentials are supported");
    }
    if (resolution < 2) throw Error::input_error("grid_rmse: resolution must be >= 2");
    const int n = resolution * resolution;
    Eigen::MatrixXd coords(2, n);
    Eigen::VectorXd truth(n);
    Configuration x;
    x.coords.resize(2);
    int col = 0;
    for (int i = 0; i < resolution; ++i) {
        const double xv = bounds[0].first +
                          (bounds[0].second - bounds[0].first) * i / (resolution - 1.0);
        for (int j = 0; j < resolution; ++j) {
            const double yv = bounds[1].first +
                              (bounds[1].second - bounds[1].first) * j / (resolution - 1.0);
            coords(0, col) = xv;
            coords(1, col) = yv;
            x.coords << xv, yv;
            truth[col] = evaluate_energy(spec, x);
            ++col;
        }
    }
    const Eigen::VectorXd predicted = committee_mean_energies(c, coords);
    return std::sqrt((predicted - truth).squaredNorm() / n);
}

double cv_grid_rmse(const Committee& c, const PotentialSpec& spec, const ChainTopology& topo,
                    int resolution) {
    if (topo.n_dihedrals() < 1) throw Error::input_error("cv_grid_rmse: no dihedrals");
    if (resolution < 2) throw Error::input_error("cv_grid_rmse: resolution must be >= 2");
    if (topo.n_dihedrals() != 2) {
        throw Error::input_error("cv_grid_rmse: expects a two-dihedral chain");
    }
    const Configuration seed = make_chain_configuration(topo);
    const CvVector base = measure_cvs(seed, topo);
    const int n = resolution * resolution;
    Eigen::MatrixXd coords(seed.dim(), n);
    Eigen::VectorXd truth(n);
    Eigen::VectorXd delta(2);
    int col = 0;
    for (int i = 0; i < resolution; ++i) {
        // Grid over (-pi, pi]: step k lands at -pi + 2*pi*(k+1)/resolution.
        const double phi = -M_PI + 2.0 * M_PI * (i + 1.0) / resolution;
        for (int j = 0; j < resolution; ++j) {
            const double psi = -M_PI + 2.0 * M_PI * (j + 1.0) / resolution;
            delta << phi - base.angles[0], psi - base.angles[1];
            const Configuration mapped = cv_backmap(seed, topo, delta);
            coords.col(col) = mapped.coords;
            truth[col] = evaluate_energy(spec, mapped);
            ++col;
        }
    }
    const Eigen::VectorXd predicted = committee_mean_energies(c, coords);
    return std::sqrt((predicted - truth).squaredNorm() / n);
}

std::vector<Configuration> random_proposals(const std::vector<LabeledSample>& data, double sigma,
                                            int count, Rng& rng) {
    if (data.empty()) throw Error::input_error("random_proposals: empty dataset");
    const std::vector<int> picks = draw_without_replacement(static_cast<int>(data.size()), count, rng);
    std::vector<Configuration> out;
    out.reserve(picks.size());
    for (int idx : picks) {
        Configuration c = data[static_cast<size_t>(idx)].configuration;
        for (int i = 0; i < c.dim(); ++i) c.coords[i] += rng.uniform(-sigma, sigma);
        out.push_back(std::move(c));
    }
    return out;
}

GenerationRecord run_generation(const LoopConfig& cfg, std::vector<LabeledSample>& data, int g,
                                Rng& loop_rng, Committee* committee_out,
                                const GenerationArtifacts& artifacts) {
    if (data.empty()) throw Error::input_error("run_generation: empty dataset");
    const auto t0 = std::chrono::steady_clock::now();

    Rng rng_train = loop_rng.spawn(1);
    Rng rng_attack = loop_rng.spawn(2);
    Rng rng_select = loop_rng.spawn(3);

    const Committee committee =
        train_committee(data, cfg.architecture, cfg.members, cfg.loss, cfg.train, rng_train, nullptr);

    GenerationRecord rec;
    rec.generation = g;
    rec.n_train = static_cast<int>(data.size());

    const bool cv_space = cfg.attack.space == AttackSpace::collective_variable;
    ChainTopology topo;
    if (cfg.potential.kind == PotentialKind::torsion_chain) {
        topo = topology_for(cfg.potential);
        rec.rmse = cv_grid_rmse(committee, cfg.potential, topo, cfg.grid_resolution);
    } else {
        rec.rmse = grid_rmse(committee, cfg.potential, cfg.bounds, cfg.grid_resolution);
    }

    const UncertaintyThreshold thr =
        fit_threshold(committee, data, cfg.selection.uncertainty_percentile, cfg.threshold_source);
    rec.threshold_t = thr.t;

    const ThermoContext ctx = partition_function(data, cfg.kT);

    // Candidate proposals: attacks or uniformly distorted training points;
    // both flow through the same selection pipeline.
    std::vector<AttackResult> candidates;
    if (cfg.strategy == Strategy::adversarial) {
        const std::vector<int> picks =
            draw_without_replacement(static_cast<int>(data.size()), cfg.attack.n_seeds, rng_attack);
        std::vector<Configuration> seeds;
        seeds.reserve(picks.size());
        for (int idx : picks) seeds.push_back(data[static_cast<size_t>(idx)].configuration);
        if (cv_space) {
            const CvAdapter adapter(topo);
            candidates = run_attack_batch(committee, ctx, seeds, cfg.attack, rng_attack, adapter);
        } else {
            const CoordinateAdapter adapter;
            candidates = run_attack_batch(committee, ctx, seeds, cfg.attack, rng_attack, adapter);
        }
    } else {
        const std::vector<Configuration> proposals =
            random_proposals(data, cfg.random_sigma, cfg.attack.n_seeds, rng_attack);
        candidates.reserve(proposals.size());
        for (const auto& p : proposals) {
            AttackResult r;
            r.seed = p;
            r.attacked = p;
            r.final_delta = Eigen::VectorXd::Zero(p.dim());
            r.final_stats = committee_stats(committee, p);
            r.probability = boltzmann_probability(r.final_stats.mean_energy, ctx);
            const double var = cfg.attack.loss_kind == VarianceSource::force_variance
                                   ? r.final_stats.var_forces
                                   : r.final_stats.var_energy;
            r.final_loss = r.probability * var;
            candidates.push_back(std::move(r));
        }
    }
    rec.n_proposed = static_cast<int>(candidates.size());

    std::vector<SelectionReportRow> report;
    std::vector<Configuration> selected =
        select_informative(candidates, committee, thr, cfg.selection, rng_select, &report);

    // Candidates with extreme oracle energies are discarded before insertion
    // (attacks can escape into steep unmodeled regions, and the CV backmap
    // can land on clashed geometries). Applies to both strategies alike.
    std::vector<LabeledSample> fresh;
    for (const auto& c : selected) {
        LabeledSample s = label_configuration(cfg.potential, c);
        if (s.energy > cfg.energy_ceiling) continue;
        fresh.push_back(std::move(s));
    }
    rec.n_selected = static_cast<int>(fresh.size());
    rec.saturated = fresh.empty();
    for (const auto& s : fresh) rec.new_energies.push_back(s.energy);
    rec.median_new_energy = median(rec.new_energies);

    if (!artifacts.directory.empty()) {
        fs::create_directories(artifacts.directory);
        write_dataset_csv(data, artifacts.directory + "/dataset.csv");
        if (artifacts.full) {
            save_committee(committee, artifacts.directory, "committee");
            write_attack_logs(candidates, artifacts.directory + "/attacks.csv",
                              cv_space ? &topo : nullptr);
            write_candidates_csv(candidates,
                                 cfg.strategy == Strategy::adversarial ? "attack" : "random",
                                 artifacts.directory + "/candidates.csv");
            write_selection_report(report, artifacts.directory + "/selection.csv");
        }
    }

    for (auto& s : fresh) data.push_back(std::move(s));
    if (committee_out) *committee_out = committee;

    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

void write_records_csv(const std::vector<GenerationRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error::input_error("cannot write records file: " + path);
    out << "generation,n_train,rmse,n_proposed,n_selected,median_new_energy,threshold_t,saturated\n";
    for (const auto& r : records) {
        out << r.generation << ',' << r.n_train << ',' << format_double(r.rmse) << ','
            << r.n_proposed << ',' << r.n_selected << ',' << format_double(r.median_new_energy)
            << ',' << format_double(r.threshold_t) << ',' << (r.saturated ? 1 : 0) << '\n';
    }
}

std::vector<GenerationRecord> run_active_learning(const LoopConfig& cfg, const std::string& out_dir,
                                                  bool full_artifacts) {
    cfg.validate();
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream resolved(out_dir + "/config.resolved");
        if (!resolved) throw Error::input_error("cannot write config snapshot in " + out_dir);
        resolved << serialize_config(cfg);
    }

    Rng rng(cfg.seed);
    Rng init_rng = rng.spawn(0);
    std::vector<LabeledSample> data;
    if (cfg.potential.kind == PotentialKind::torsion_chain) {
        // Seed geometries near the trans reference: uniform dihedral offsets
        // in +/- cv_init_halfwidth.
        const ChainTopology topo = topology_for(cfg.potential);
        const Configuration seed = make_chain_configuration(topo);
        Eigen::VectorXd delta(topo.n_dihedrals());
        for (int i = 0; i < cfg.cv_init_count; ++i) {
            for (int k = 0; k < topo.n_dihedrals(); ++k) {
                delta[k] = init_rng.uniform(-cfg.cv_init_halfwidth, cfg.cv_init_halfwidth);
            }
            data.push_back(label_configuration(cfg.potential, cv_backmap(seed, topo, delta)));
        }
    } else {
        data = sample_initial_dataset(cfg.potential, cfg.init_candidates, cfg.bounds,
                                      cfg.energy_cutoff, init_rng);
    }

    std::vector<GenerationRecord> records;
    for (int g = 1; g <= cfg.generations; ++g) {
        Rng gen_rng = rng.spawn(static_cast<std::uint64_t>(g));
        GenerationArtifacts artifacts;
        if (!out_dir.empty()) {
            artifacts.directory = out_dir + "/gen_" + std::to_string(g);
            artifacts.full = full_artifacts;
        }
        try {
            records.push_back(run_generation(cfg, data, g, gen_rng, nullptr, artifacts));
        } catch (const Error& e) {
            throw Error(e.category(), "generation " + std::to_string(g) + ": " + e.what());
        }
    }

    if (!out_dir.empty()) write_records_csv(records, out_dir + "/records.csv");
    return records;
}

CvLoopResult run_cv_loop(const LoopConfig& cfg, const std::string& out_dir) {
    LoopConfig cv_cfg = cfg;
    if (cv_cfg.potential.kind != PotentialKind::torsion_chain) {
        throw Error::config_error("cv loop: potential must be torsion_chain");
    }
    cv_cfg.attack.space = AttackSpace::collective_variable;
    cv_cfg.selection.distance_kind = DistanceKind::rmsd;
    cv_cfg.validate();

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream resolved(out_dir + "/config.resolved");
        if (!resolved) throw Error::input_error("cannot write config snapshot in " + out_dir);
        resolved << serialize_config(cv_cfg);
        save_topology(topology_for(cv_cfg.potential), out_dir + "/topology.txt");
    }

    Rng rng(cv_cfg.seed);
    Rng init_rng = rng.spawn(0);
    const ChainTopology topo = topology_for(cv_cfg.potential);
    const Configuration seed = make_chain_configuration(topo);
    std::vector<LabeledSample> data;
    Eigen::VectorXd delta(topo.n_dihedrals());
    for (int i = 0; i < cv_cfg.cv_init_count; ++i) {
        for (int k = 0; k < topo.n_dihedrals(); ++k) {
            delta[k] = init_rng.uniform(-cv_cfg.cv_init_halfwidth, cv_cfg.cv_init_halfwidth);
        }
        data.push_back(label_configuration(cv_cfg.potential, cv_backmap(seed, topo, delta)));
    }

    CvLoopResult result;
    for (int g = 1; g <= cv_cfg.generations; ++g) {
        Rng gen_rng = rng.spawn(static_cast<std::uint64_t>(g));
        GenerationArtifacts artifacts;
        if (!out_dir.empty()) {
            artifacts.directory = out_dir + "/gen_" + std::to_string(g);
        }
        try {
            result.records.push_back(
                run_generation(cv_cfg, data, g, gen_rng, &result.final_committee, artifacts));
        } catch (const Error& e) {
            throw Error(e.category(), "generation " + std::to_string(g) + ": " + e.what());
        }
    }
    result.dataset = std::move(data);

    if (!out_dir.empty()) write_records_csv(result.records, out_dir + "/records.csv");
    return result;
}

namespace {

StrategySummaryRow summarize(const std::string& strategy, int generation,
                             const std::vector<std::vector<GenerationRecord>>& runs) {
    StrategySummaryRow row;
    row.strategy = strategy;
    row.generation = generation;
    std::vector<double> rmse, n_train, energies;
    for (const auto& run : runs) {
        const auto& rec = run[static_cast<size_t>(generation - 1)];
        rmse.push_back(rec.rmse);
        n_train.push_back(static_cast<double>(rec.n_train));
        for (double e : rec.new_energies) energies.push_back(e);
    }
    row.rmse_median = median(rmse);
    row.rmse_q25 = quantile(rmse, 0.25);
    row.rmse_q75 = quantile(rmse, 0.75);
    row.n_train_median = median(n_train);
    row.n_train_q25 = quantile(n_train, 0.25);
    row.n_train_q75 = quantile(n_train, 0.75);
    row.energy_median = median(energies);
    row.energy_q25 = quantile(energies, 0.25);
    row.energy_q75 = quantile(energies, 0.75);
    return row;
}

}  // namespace

ComparisonSummary compare_strategies(const LoopConfig& cfg_adv, const LoopConfig& cfg_rand,
                                     int n_runs, const std::string& out_dir, int threads) {
    if (n_runs < 2) throw Error::config_error("compare: need at least 2 runs per strategy");
    if (cfg_adv.generations != cfg_rand.generations) {
        throw Error::config_error("compare: strategies must use the same generation count");
    }
    cfg_adv.validate();
    cfg_rand.validate();
    if (!out_dir.empty()) fs::create_directories(out_dir);

    struct Task {
        LoopConfig cfg;
        std::string dir;
        std::vector<GenerationRecord>* slot;
        int* completed;
    };
    ComparisonSummary summary;
    summary.adversarial_runs.resize(static_cast<size_t>(n_runs));
    summary.random_runs.resize(static_cast<size_t>(n_runs));

    std::vector<Task> tasks;
    int completed_adv = 0, completed_rand = 0;
    for (int i = 0; i < n_runs; ++i) {
        LoopConfig a = cfg_adv;
        a.strategy = Strategy::adversarial;
        a.seed = cfg_adv.seed + static_cast<std::uint64_t>(i);
        LoopConfig r = cfg_rand;
        r.strategy = Strategy::random;
        r.seed = cfg_rand.seed + static_cast<std::uint64_t>(i);
        const std::string adv_dir =
            out_dir.empty() ? "" : out_dir + "/adversarial/run_" + std::to_string(i);
        const std::string rand_dir =
            out_dir.empty() ? "" : out_dir + "/random/run_" + std::to_string(i);
        tasks.push_back({a, adv_dir, &summary.adversarial_runs[static_cast<size_t>(i)], &completed_adv});
        tasks.push_back({r, rand_dir, &summary.random_runs[static_cast<size_t>(i)], &completed_rand});
    }

    std::mutex mtx;
    size_t next = 0;
    std::vector<std::string> failures;
    auto worker = [&]() {
        for (;;) {
            size_t idx;
            {
                std::lock_guard<std::mutex> lock(mtx);
                if (next >= tasks.size()) return;
                idx = next++;
            }
            Task& task = tasks[idx];
            try {
                auto records = run_active_learning(task.cfg, task.dir, /*full_artifacts=*/false);
                std::lock_guard<std::mutex> lock(mtx);
                *task.slot = std::move(records);
                ++*task.completed;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mtx);
                failures.push_back("seed " + std::to_string(task.cfg.seed) + ": " + e.what());
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n_workers = std::min<int>(threads, static_cast<int>(tasks.size()));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    auto prune = [](std::vector<std::vector<GenerationRecord>>& runs) {
        runs.erase(std::remove_if(runs.begin(), runs.end(),
                                  [](const auto& r) { return r.empty(); }),
                   runs.end());
    };
    prune(summary.adversarial_runs);
    prune(summary.random_runs);
    summary.completed_adversarial = completed_adv;
    summary.completed_random = completed_rand;
    if (summary.adversarial_runs.empty() || summary.random_runs.empty()) {
        throw Error::training_error("compare: no completed runs for at least one strategy");
    }

    const int G = cfg_adv.generations;
    for (int g = 1; g <= G; ++g) {
        summary.rows.push_back(summarize("adversarial", g, summary.adversarial_runs));
        summary.rows.push_back(summarize("random", g, summary.random_runs));
    }
    const StrategySummaryRow& final_adv = summary.rows[static_cast<size_t>(2 * (G - 1))];
    const StrategySummaryRow& final_rand = summary.rows[static_cast<size_t>(2 * (G - 1) + 1)];
    summary.rmse_ratio = final_rand.rmse_median / final_adv.rmse_median;
    summary.energy_ratio = final_rand.energy_median / final_adv.energy_median;

    if (!out_dir.empty()) {
        std::ofstream csv(out_dir + "/summary.csv");
        if (!csv) throw Error::input_error("cannot write summary in " + out_dir);
        csv << "strategy,generation,rmse_median,rmse_q25,rmse_q75,n_train_median,n_train_q25,"
               "n_train_q75,energy_median,energy_q25,energy_q75\n";
        for (const auto& row : summary.rows) {
            csv << row.strategy << ',' << row.generation << ',' << format_double(row.rmse_median)
                << ',' << format_double(row.rmse_q25) << ',' << format_double(row.rmse_q75) << ','
                << format_double(row.n_train_median) << ',' << format_double(row.n_train_q25) << ','
                << format_double(row.n_train_q75) << ',' << format_double(row.energy_median) << ','
                << format_double(row.energy_q25) << ',' << format_double(row.energy_q75) << '\n';
        }
        std::ofstream ratios(out_dir + "/ratios.txt");
        ratios << "rmse_ratio_random_over_adversarial = " << format_double(summary.rmse_ratio)
               << '\n'
               << "energy_ratio_random_over_adversarial = " << format_double(summary.energy_ratio)
               << '\n'
               << "completed_adversarial = " << summary.completed_adversarial << '\n'
               << "completed_random = " << summary.completed_random << '\n';
        for (const auto& f : failures) ratios << "failed: " << f << '\n';
    }
    return summary;
}

}  // namespace advsamp
