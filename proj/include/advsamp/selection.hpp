#pragma once

#include <vector>

#include "advsamp/adversary.hpp"
#include "advsamp/committee.hpp"
#include "advsamp/potentials.hpp"
#include "advsamp/rng.hpp"

namespace advsamp {

enum class DistanceKind { euclidean, rmsd };

struct SelectionConfig {
    double distance_threshold = 0.02;
    double uncertainty_percentile = 80.0;
    int max_new = 20;
    DistanceKind distance_kind = DistanceKind::euclidean;

    void validate() const;
};

Eigen::MatrixXd distance_matrix(const std::vector<Configuration>& points, DistanceKind kind);

// Single-linkage clusters cut at `threshold`; returns one representative per
// cluster (highest score, ties to the lowest index), sorted ascending.
std::vector<int> cluster_representatives(const Eigen::MatrixXd& dist, double threshold,
                                         const std::vector<double>& scores);

// Per-candidate bookkeeping for the selection report.
struct SelectionReportRow {
    int candidate_id = 0;
    int cluster_id = 0;
    bool representative = false;
    double variance = 0.0;
    bool passed_filter = false;
    bool selected = false;
};

std::vector<Configuration> select_informative(const std::vector<AttackResult>& candidates,
                                              const Committee& committee,
                                              const UncertaintyThreshold& thr,
                                              const SelectionConfig& cfg, Rng& rng,
                                              std::vector<SelectionReportRow>* report = nullptr);

void write_selection_report(const std::vector<SelectionReportRow>& rows, const std::string& path);

}  // namespace advsamp
