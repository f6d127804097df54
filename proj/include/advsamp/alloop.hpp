#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "advsamp/adversary.hpp"
#include "advsamp/committee.hpp"
#include "advsamp/cvgeom.hpp"
#include "advsamp/potentials.hpp"
#include "advsamp/selection.hpp"
#include "advsamp/trainer.hpp"

namespace advsamp {

enum class Strategy { adversarial, random };

struct LoopConfig {
    // potential
    PotentialSpec potential = PotentialSpec::double_well();
    std::vector<std::pair<double, double>> bounds = {{-1.5, 1.5}, {-1.5, 1.5}};
    int init_candidates = 800;
    double energy_cutoff = -2.0;

    // committee + training
    MlpArchitecture architecture;
    int members = 5;
    LossConfig loss;
    TrainConfig train;

    // attack + thermodynamics
    AttackConfig attack;
    double kT = 5.0;

    // selection
    SelectionConfig selection;
    VarianceSource threshold_source = VarianceSource::force_variance;

    // loop
    int generations = 6;
    Strategy strategy = Strategy::adversarial;
    double random_sigma = 1.0;
    std::uint64_t seed = 0;

    // evaluation
    int grid_resolution = 100;

    // CV-space runs (torsion chain); ignored in coordinate space
    double energy_ceiling = 200.0;
    double cv_init_halfwidth = 0.5;
    int cv_init_count = 40;

    void validate() const;
};

struct GenerationRecord {
    int generation = 0;
    int n_train = 0;           // dataset size the committee was trained on
    double rmse = 0.0;
    int n_proposed = 0;
    int n_selected = 0;
    double median_new_energy = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> new_energies;
    double threshold_t = 0.0;
    bool saturated = false;
    double wall_time_seconds = 0.0;
};

// RMSE between the committee mean energy and the oracle on a square grid
// spanning `bounds` inclusively; 2-D specs only.
double grid_rmse(const Committee& c, const PotentialSpec& spec,
                 const std::vector<std::pair<double, double>>& bounds, int resolution);

// Endpoint geometries of a batch of attacks in the dataset CSV layout plus a
// trailing `source` column (attack|random). Committee-mean energies and forces
// stand in for oracle labels.
void write_candidates_csv(const std::vector<AttackResult>& results, const std::string& source,
                          const std::string& path);

std::vector<Configuration> random_proposals(const std::vector<LabeledSample>& data, double sigma,
                                            int count, Rng& rng);

struct GenerationArtifacts {
    std::string directory;      // empty: write nothing
    bool full = true;           // committees, attack logs, selection reports
};

GenerationRecord run_generation(const LoopConfig& cfg, std::vector<LabeledSample>& data, int g,
                                Rng& loop_rng, Committee* committee_out,
                                const GenerationArtifacts& artifacts);

std::vector<GenerationRecord> run_active_learning(const LoopConfig& cfg, const std::string& out_dir,
                                                  bool full_artifacts = true);

void write_records_csv(const std::vector<GenerationRecord>& records, const std::string& path);

struct StrategySummaryRow {
    std::string strategy;
    int generation = 0;
    double rmse_median = 0.0, rmse_q25 = 0.0, rmse_q75 = 0.0;
    double n_train_median = 0.0, n_train_q25 = 0.0, n_train_q75 = 0.0;
    double energy_median = 0.0, energy_q25 = 0.0, energy_q75 = 0.0;  // pooled new-sample energies
};

struct ComparisonSummary {
    std::vector<StrategySummaryRow> rows;
    double rmse_ratio = 0.0;    // random / adversarial, final-generation medians
    double energy_ratio = 0.0;  // random / adversarial, final-generation pooled medians
    int completed_adversarial = 0;
    int completed_random = 0;
    std::vector<std::vector<GenerationRecord>> adversarial_runs;
    std::vector<std::vector<GenerationRecord>> random_runs;
};

// Paired seeding: run i of both strategies uses master seed cfg.seed + i.
ComparisonSummary compare_strategies(const LoopConfig& cfg_adv, const LoopConfig& cfg_rand,
                                     int n_runs, const std::string& out_dir, int threads = 1);

// Active-learning loop attacking in CV space on the torsion-chain oracle.
struct CvLoopResult {
    std::vector<GenerationRecord> records;
    Committee final_committee;
    std::vector<LabeledSample> dataset;
};

CvLoopResult run_cv_loop(const LoopConfig& cfg, const std::string& out_dir);

// RMSE of the committee over a CV grid of backmapped chain geometries.
double cv_grid_rmse(const Committee& c, const PotentialSpec& spec, const ChainTopology& topo,
                    int resolution);

}  // namespace advsamp
