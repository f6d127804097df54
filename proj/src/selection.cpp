#include "advsamp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

#include "advsamp/errors.hpp"

namespace advsamp {

void SelectionConfig::validate() const {
    if (!(distance_threshold > 0.0)) throw Error::config_error("selection: distance_threshold must be > 0");
    if (!(uncertainty_percentile > 0.0 && uncertainty_percentile <= 100.0)) {
        throw Error::config_error("selection: uncertainty_percentile must be in (0, 100]");
    }
    if (max_new < 1) throw Error::config_error("selection: max_new must be >= 1");
}

Eigen::MatrixXd distance_matrix(const std::vector<Configuration>& points, DistanceKind kind) {
    const int n = static_cast<int>(points.size());
    if (n < 1) throw Error::input_error("distance_matrix: need at least one point");
    const int d = points.front().dim();
    for (const auto& p : points) {
        if (p.dim() != d) throw Error::input_error("distance_matrix: dimension mismatch");
    }
    const double scale = kind == DistanceKind::rmsd ? std::sqrt(static_cast<double>(d) / 3.0) : 1.0;
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // rmsd = sqrt(mean over atoms of |dr|^2) = euclidean / sqrt(n_atoms)
            const double v = (points[i].coords - points[j].coords).norm() / scale;
            dist(i, j) = v;
            dist(j, i) = v;
        }
    }
    return dist;
}

std::vector<int> cluster_representatives(const Eigen::MatrixXd& dist, double threshold,
                                         const std::vector<double>& scores) {
    const int n = static_cast<int>(dist.rows());
    if (dist.cols() != n || static_cast<int>(scores.size()) != n) {
        throw Error::input_error("cluster_representatives: shape mismatch");
    }
    // Single-linkage clusters cut at `threshold` are the connected components
    // of the graph with edges dist < threshold.
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (dist(i, j) < threshold) {
                const int ra = find(i), rb = find(j);
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    }
    std::vector<int> best(n, -1);  // component root -> representative index
    for (int i = 0; i < n; ++i) {
        const int root = find(i);
        if (best[root] < 0 || scores[i] > scores[best[root]]) best[root] = i;
    }
    std::vector<int> reps;
    for (int i = 0; i < n; ++i) {
        if (best[i] >= 0) reps.push_back(best[i]);
    }
    std::sort(reps.begin(), reps.end());
    return reps;
}

std::vector<Configuration> select_informative(const std::vector<AttackResult>& candidates,
                                              const Committee& committee,
                                              const UncertaintyThreshold& thr,
                                              const SelectionConfig& cfg, Rng& rng,
                                              std::vector<SelectionReportRow>* report) {
    cfg.validate();
    if (report) report->clear();
    if (candidates.empty()) return {};

    std::vector<Configuration> points;
    std::vector<double> scores;
    points.reserve(candidates.size());
    for (const auto& cand : candidates) {
        points.push_back(cand.attacked);
        scores.push_back(cand.final_loss);
    }

    const Eigen::MatrixXd dist = distance_matrix(points, cfg.distance_kind);
    const std::vector<int> reps = cluster_representatives(dist, cfg.distance_threshold, scores);

    // Cluster ids for reporting: component roots numbered in index order.
    std::vector<SelectionReportRow> rows(candidates.size());
    if (report) {
        std::vector<int> parent(candidates.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int a) {
            while (parent[a] != a) {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            return a;
        };
        for (size_t i = 0; i < candidates.size(); ++i) {
            for (size_t j = i + 1; j < candidates.size(); ++j) {
                if (dist(i, j) < cfg.distance_threshold) {
                    const int ra = find(static_cast<int>(i)), rb = find(static_cast<int>(j));
                    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
                }
            }
        }
        for (size_t i = 0; i < candidates.size(); ++i) {
            rows[i].candidate_id = static_cast<int>(i);
            rows[i].cluster_id = find(static_cast<int>(i));
        }
    }

    // Keep representatives whose variance is at or above the threshold
    // (the complement of the in-domain classifier).
    std::vector<int> survivors;
    for (int idx : reps) {
        const CommitteeStats stats = committee_stats(committee, candidates[idx].attacked);
        const double variance =
            thr.source == VarianceSource::force_variance ? stats.var_forces : stats.var_energy;
        rows[idx].representative = true;
        rows[idx].variance = variance;
        if (!classify_in_domain(variance, thr)) {
            rows[idx].passed_filter = true;
            survivors.push_back(idx);
        }
    }

    // Cap by uniform subsampling without replacement.
    if (static_cast<int>(survivors.size()) > cfg.max_new) {
        std::vector<int> pool = survivors;
        survivors.clear();
        for (int taken = 0; taken < cfg.max_new; ++taken) {
            const size_t pick = static_cast<size_t>(rng.below(pool.size()));
            survivors.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        std::sort(survivors.begin(), survivors.end());
    }

    std::vector<Configuration> out;
    for (int idx : survivors) {
        rows[idx].selected = true;
        out.push_back(candidates[idx].attacked);
    }
    if (report) *report = std::move(rows);
    return out;
}

void write_selection_report(const std::vector<SelectionReportRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error::input_error("cannot write selection report: " + path);
    out << "candidate_id,cluster_id,representative,variance,passed_filter,selected\n";
    for (const auto& r : rows) {
        out << r.candidate_id << ',' << r.cluster_id << ',' << (r.representative ? 1 : 0) << ','
            << r.variance << ',' << (r.passed_filter ? 1 : 0) << ',' << (r.selected ? 1 : 0) << '\n';
    }
}

}  // namespace advsamp
