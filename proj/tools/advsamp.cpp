#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "advsamp/alloop.hpp"
#include "advsamp/config.hpp"
#include "advsamp/csvio.hpp"
#include "advsamp/errors.hpp"
#include "advsamp/svgplot.hpp"

namespace fs = std::filesystem;
using namespace advsamp;

namespace {

int exit_code(ErrorCategory cat) {
    switch (cat) {
        case ErrorCategory::config: return 2;
        case ErrorCategory::input: return 3;
        case ErrorCategory::training: return 4;
        case ErrorCategory::attack: return 5;
        case ErrorCategory::numeric: return 6;
        case ErrorCategory::geometry: return 7;
    }
    return 1;
}

std::string default_out(const std::string& subcommand) {
    if (const char* env = std::getenv("ADVSAMP_OUT")) {
        return std::string(env) + "/" + subcommand;
    }
    return "out/" + subcommand;
}

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int threads = 1;
};

void add_common(CLI::App* app, CommonArgs* args, const std::string& subcommand) {
    app->add_option("--config", args->config_path, "config file ([section] key = value)");
    app->add_option("--set", args->overrides, "override, e.g. --set train.epochs=100");
    args->out_dir = default_out(subcommand);
    app->add_option("--out", args->out_dir, "output directory");
    app->add_option("--threads", args->threads, "worker threads (1 = bitwise deterministic)");
}

void eval_heatmaps(const Committee& committee, const LoopConfig& cfg, const std::string& out_dir) {
    const int res = cfg.grid_resolution;
    Eigen::MatrixXd coords(2, res * res);
    Eigen::MatrixXd truth(res, res);
    Configuration x;
    x.coords.resize(2);
    int col = 0;
    for (int i = 0; i < res; ++i) {
        const double xv = cfg.bounds[0].first +
                          (cfg.bounds[0].second - cfg.bounds[0].first) * i / (res - 1.0);
        for (int j = 0; j < res; ++j) {
            const double yv = cfg.bounds[1].first +
                              (cfg.bounds[1].second - cfg.bounds[1].first) * j / (res - 1.0);
            coords(0, col) = xv;
            coords(1, col) = yv;
            x.coords << xv, yv;
            truth(i, j) = evaluate_energy(cfg.potential, x);
            ++col;
        }
    }
    const ThermoContext unit_ctx{1.0, 1.0};
    const AttackBatchEval eval =
        adversarial_loss_batch(committee, unit_ctx, coords, VarianceSource::force_variance, false);
    Eigen::MatrixXd mean_grid(res, res), var_grid(res, res);
    col = 0;
    for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
            mean_grid(i, j) = eval.mean_energy[col];
            var_grid(i, j) = eval.variance[col];
            ++col;
        }
    }
    write_heatmap_svg(mean_grid, cfg.bounds[0], cfg.bounds[1], "committee mean energy",
                      out_dir + "/mean_energy.svg");
    write_heatmap_svg(var_grid, cfg.bounds[0], cfg.bounds[1], "committee force variance",
                      out_dir + "/force_variance.svg");
    write_heatmap_svg(truth, cfg.bounds[0], cfg.bounds[1], "ground truth energy",
                      out_dir + "/ground_truth.svg");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"active-learning sampler for committee potentials"};
    app.require_subcommand(1);

    CommonArgs run_args, compare_args, attack_args, train_args, eval_args, cv_args;
    std::string replay_dir;
    int compare_runs = 20;
    std::string committee_path, dataset_path;

    auto* cmd_run = app.add_subcommand("run", "single active-learning loop");
    add_common(cmd_run, &run_args, "run");
    cmd_run->add_option("--replay", replay_dir, "re-run from a previous run directory's config");

    auto* cmd_compare = app.add_subcommand("compare", "adversarial-vs-random multi-run study");
    add_common(cmd_compare, &compare_args, "compare");
    cmd_compare->add_option("--runs", compare_runs, "independent runs per strategy");

    auto* cmd_attack = app.add_subcommand("attack", "one attack round against a saved committee");
    add_common(cmd_attack, &attack_args, "attack");
    cmd_attack->add_option("--committee", committee_path, "committee manifest")->required();
    cmd_attack->add_option("--dataset", dataset_path, "dataset CSV (seeds + partition function)")
        ->required();

    auto* cmd_train = app.add_subcommand("train", "fit a committee from a dataset CSV");
    add_common(cmd_train, &train_args, "train");
    cmd_train->add_option("--dataset", dataset_path, "training dataset CSV")->required();

    auto* cmd_eval = app.add_subcommand("eval", "grid RMSE and PES/uncertainty heatmaps");
    add_common(cmd_eval, &eval_args, "eval");
    cmd_eval->add_option("--committee", committee_path, "committee manifest")->required();

    auto* cmd_cv = app.add_subcommand("cv-demo", "torsion-chain loop attacking in dihedral space");
    add_common(cmd_cv, &cv_args, "cv-demo");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            LoopConfig cfg;
            if (!replay_dir.empty()) {
                const std::string snapshot = replay_dir + "/config.resolved";
                if (!fs::exists(snapshot)) {
                    throw Error::input_error("replay: no config.resolved in " + replay_dir);
                }
                cfg = parse_config(snapshot, run_args.overrides);
            } else {
                cfg = parse_config(run_args.config_path, run_args.overrides);
            }
            const auto records = run_active_learning(cfg, run_args.out_dir);
            std::cout << "generations: " << records.size()
                      << "  final rmse: " << format_double(records.back().rmse)
                      << "  final n_train: " << records.back().n_train << '\n';
            std::cout << "records: " << run_args.out_dir << "/records.csv\n";
        } else if (*cmd_compare) {
            LoopConfig cfg_adv = parse_config(compare_args.config_path, compare_args.overrides);
            LoopConfig cfg_rand = cfg_adv;
            cfg_adv.strategy = Strategy::adversarial;
            cfg_rand.strategy = Strategy::random;
            const auto summary = compare_strategies(cfg_adv, cfg_rand, compare_runs,
                                                    compare_args.out_dir, compare_args.threads);
            std::cout << "rmse ratio (random/adversarial): " << format_double(summary.rmse_ratio)
                      << '\n'
                      << "energy ratio (random/adversarial): " << format_double(summary.energy_ratio)
                      << '\n'
                      << "completed: " << summary.completed_adversarial << " adversarial, "
                      << summary.completed_random << " random\n";
        } else if (*cmd_attack) {
            LoopConfig cfg = parse_config(attack_args.config_path, attack_args.overrides);
            const Committee committee = load_committee(committee_path);
            const auto data = read_dataset_csv(dataset_path);
            if (data.empty()) throw Error::input_error("attack: dataset is empty");
            const ThermoContext ctx = partition_function(data, cfg.kT);
            Rng rng(cfg.seed);
            std::vector<int> pool(data.size());
            for (size_t i = 0; i < data.size(); ++i) pool[i] = static_cast<int>(i);
            std::vector<Configuration> seeds;
            const int n_seeds = std::min<int>(cfg.attack.n_seeds, static_cast<int>(data.size()));
            for (int i = 0; i < n_seeds; ++i) {
                const size_t pick = static_cast<size_t>(rng.below(pool.size()));
                seeds.push_back(data[static_cast<size_t>(pool[pick])].configuration);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            }
            const CoordinateAdapter adapter;
            const auto results = run_attack_batch(committee, ctx, seeds, cfg.attack, rng, adapter);
            fs::create_directories(attack_args.out_dir);
            std::ofstream log(attack_args.out_dir + "/attacks.csv");
            log << "seed_id,step,loss,mean_energy,var_forces,p\n";
            for (size_t s = 0; s < results.size(); ++s) {
                const auto& r = results[s];
                for (size_t step = 0; step < r.loss_trajectory.size(); ++step) {
                    log << s << ',' << step << ',' << format_double(r.loss_trajectory[step]) << ','
                        << format_double(r.mean_energy_trajectory[step]) << ','
                        << format_double(r.variance_trajectory[step]) << ','
                        << format_double(r.probability_trajectory[step]) << '\n';
                }
            }
            write_candidates_csv(results, "attack", attack_args.out_dir + "/candidates.csv");
            double best = 0.0;
            for (const auto& r : results) best = std::max(best, r.final_loss);
            std::cout << "attacks: " << results.size() << "  best final loss: " << format_double(best)
                      << '\n';
        } else if (*cmd_train) {
            LoopConfig cfg = parse_config(train_args.config_path, train_args.overrides);
            const auto data = read_dataset_csv(dataset_path);
            if (data.empty()) throw Error::input_error("train: dataset is empty");
            cfg.architecture.input_dim = data.front().configuration.dim();
            Rng rng(cfg.seed);
            std::vector<TrainRecord> curves;
            const Committee committee = train_committee(data, cfg.architecture, cfg.members,
                                                        cfg.loss, cfg.train, rng, &curves);
            fs::create_directories(train_args.out_dir);
            save_committee(committee, train_args.out_dir, "committee");
            std::ofstream curve_csv(train_args.out_dir + "/curves.csv");
            curve_csv << "epoch,member,train_loss,val_loss\n";
            for (size_t m = 0; m < curves.size(); ++m) {
                for (size_t e = 0; e < curves[m].train_loss.size(); ++e) {
                    curve_csv << e + 1 << ',' << m << ',' << format_double(curves[m].train_loss[e])
                              << ',' << format_double(curves[m].val_loss[e]) << '\n';
                }
            }
            std::cout << "trained " << committee.size() << " members on " << data.size()
                      << " samples; committee at " << train_args.out_dir << "/committee.committee\n";
        } else if (*cmd_eval) {
            LoopConfig cfg = parse_config(eval_args.config_path, eval_args.overrides);
            const Committee committee = load_committee(committee_path);
            const double rmse = grid_rmse(committee, cfg.potential, cfg.bounds, cfg.grid_resolution);
            fs::create_directories(eval_args.out_dir);
            eval_heatmaps(committee, cfg, eval_args.out_dir);
            std::ofstream metrics(eval_args.out_dir + "/metrics.txt");
            metrics << "grid_rmse = " << format_double(rmse) << '\n';
            std::cout << "grid rmse: " << format_double(rmse) << "  heatmaps: " << eval_args.out_dir
                      << '\n';
        } else if (*cmd_cv) {
            std::vector<std::string> overrides = {"potential.kind=torsion_chain",
                                                  "loop.generations=4", "eval.grid_resolution=64"};
            overrides.insert(overrides.end(), cv_args.overrides.begin(), cv_args.overrides.end());
            LoopConfig cfg = parse_config(cv_args.config_path, overrides);
            const CvLoopResult result = run_cv_loop(cfg, cv_args.out_dir);
            std::cout << "generations: " << result.records.size()
                      << "  gen-1 rmse: " << format_double(result.records.front().rmse)
                      << "  final rmse: " << format_double(result.records.back().rmse) << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error (" << category_name(e.category()) << "): " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
