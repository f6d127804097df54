// Python bindings for the adversarial-sampling core. The module mirrors the
// C++ API closely: configs are mutable structs, RNG streams are explicit, and
// all array data crosses the boundary as NumPy arrays via Eigen.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "advsamp/adversary.hpp"
#include "advsamp/alloop.hpp"
#include "advsamp/committee.hpp"
#include "advsamp/config.hpp"
#include "advsamp/csvio.hpp"
#include "advsamp/cvgeom.hpp"
#include "advsamp/errors.hpp"
#include "advsamp/selection.hpp"
#include "advsamp/trainer.hpp"

namespace py = pybind11;
using namespace advsamp;

PYBIND11_MODULE(_advsamp, m) {
    m.doc() = "Uncertainty-driven adversarial sampling for model committees";

    py::register_exception<Error>(m, "AdvsampError");

    // --- randomness ----------------------------------------------------------
    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", py::overload_cast<>(&Rng::uniform))
        .def("normal", py::overload_cast<>(&Rng::normal))
        .def("spawn", &Rng::spawn, py::arg("label"));

    // --- configurations and samples -----------------------------------------
    py::class_<Configuration>(m, "Configuration")
        .def(py::init<>())
        .def(py::init([](const Eigen::VectorXd& coords) {
                 Configuration c;
                 c.coords = coords;
                 return c;
             }),
             py::arg("coords"))
        .def_readwrite("coords", &Configuration::coords)
        .def_readwrite("species", &Configuration::species)
        .def("dim", &Configuration::dim);

    py::class_<LabeledSample>(m, "LabeledSample")
        .def(py::init<>())
        .def_readwrite("configuration", &LabeledSample::configuration)
        .def_readwrite("energy", &LabeledSample::energy)
        .def_readwrite("forces", &LabeledSample::forces);

    // --- potentials ----------------------------------------------------------
    py::enum_<PotentialKind>(m, "PotentialKind")
        .value("double_well", PotentialKind::double_well)
        .value("polynomial", PotentialKind::polynomial)
        .value("torsion_chain", PotentialKind::torsion_chain);

    py::class_<PotentialSpec>(m, "PotentialSpec")
        .def_readonly("kind", &PotentialSpec::kind)
        .def("expected_dim", &PotentialSpec::expected_dim)
        .def_static("double_well", &PotentialSpec::double_well)
        .def_static("torsion_chain", &PotentialSpec::torsion_chain,
                    py::arg("amplitudes"), py::arg("phases"));

    m.def("evaluate_energy", &evaluate_energy, py::arg("spec"), py::arg("x"));
    m.def("evaluate_forces", &evaluate_forces, py::arg("spec"), py::arg("x"));
    m.def("label_configuration", &label_configuration, py::arg("spec"), py::arg("x"));
    m.def("sample_initial_dataset", &sample_initial_dataset, py::arg("spec"),
          py::arg("n_candidates"), py::arg("bounds"), py::arg("energy_cutoff"), py::arg("rng"));

    // --- models and committees ----------------------------------------------
    py::enum_<FeatureMap>(m, "FeatureMap")
        .value("identity", FeatureMap::identity)
        .value("pairwise_distances", FeatureMap::pairwise_distances)
        .value("sin_cos_angles", FeatureMap::sin_cos_angles);

    py::class_<MlpArchitecture>(m, "MlpArchitecture")
        .def(py::init<>())
        .def_readwrite("input_dim", &MlpArchitecture::input_dim)
        .def_readwrite("hidden_layers", &MlpArchitecture::hidden_layers)
        .def_readwrite("hidden_units", &MlpArchitecture::hidden_units)
        .def_readwrite("feature_map", &MlpArchitecture::feature_map);

    py::class_<ModelParameters>(m, "ModelParameters")
        .def(py::init<>())
        .def_readwrite("weights", &ModelParameters::weights)
        .def_readwrite("biases", &ModelParameters::biases);

    py::class_<Committee>(m, "Committee")
        .def(py::init<>())
        .def_readwrite("architecture", &Committee::architecture)
        .def_readwrite("members", &Committee::members)
        .def("size", &Committee::size);

    py::class_<CommitteeStats>(m, "CommitteeStats")
        .def_readonly("mean_energy", &CommitteeStats::mean_energy)
        .def_readonly("var_energy", &CommitteeStats::var_energy)
        .def_readonly("mean_forces", &CommitteeStats::mean_forces)
        .def_readonly("var_forces", &CommitteeStats::var_forces)
        .def_readonly("member_energies", &CommitteeStats::member_energies)
        .def_readonly("member_forces", &CommitteeStats::member_forces);

    py::enum_<VarianceSource>(m, "VarianceSource")
        .value("force_variance", VarianceSource::force_variance)
        .value("energy_variance", VarianceSource::energy_variance);

    py::class_<UncertaintyThreshold>(m, "UncertaintyThreshold")
        .def(py::init<>())
        .def_readwrite("t", &UncertaintyThreshold::t)
        .def_readwrite("percentile", &UncertaintyThreshold::percentile)
        .def_readwrite("source", &UncertaintyThreshold::source);

    m.def("initialize_parameters", &initialize_parameters, py::arg("arch"), py::arg("rng"));
    m.def("predict_energy", &predict_energy, py::arg("params"), py::arg("arch"), py::arg("x"));
    m.def("predict_forces", &predict_forces, py::arg("params"), py::arg("arch"), py::arg("x"));
    m.def("committee_stats", &committee_stats, py::arg("committee"), py::arg("x"));
    m.def("fit_threshold", &fit_threshold, py::arg("committee"), py::arg("train"),
          py::arg("percentile"), py::arg("source"));
    m.def("classify_in_domain", &classify_in_domain, py::arg("variance"), py::arg("threshold"));
    m.def("save_committee", &save_committee, py::arg("committee"), py::arg("dir"), py::arg("stem"));
    m.def("load_committee", &load_committee, py::arg("manifest_path"));

    // --- training ------------------------------------------------------------
    py::class_<LossConfig>(m, "LossConfig")
        .def(py::init<>())
        .def_readwrite("alpha_E", &LossConfig::alpha_E)
        .def_readwrite("alpha_F", &LossConfig::alpha_F);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("split_ratios", &TrainConfig::split_ratios);

    py::class_<TrainRecord>(m, "TrainRecord")
        .def_readonly("train_loss", &TrainRecord::train_loss)
        .def_readonly("val_loss", &TrainRecord::val_loss);

    m.def(
        "train_committee",
        [](const std::vector<LabeledSample>& data, const MlpArchitecture& arch, int members,
           const LossConfig& loss, const TrainConfig& cfg, Rng& rng) {
            std::vector<TrainRecord> records;
            Committee c = train_committee(data, arch, members, loss, cfg, rng, &records);
            return py::make_tuple(c, records);
        },
        py::arg("data"), py::arg("arch"), py::arg("members"), py::arg("loss"), py::arg("cfg"),
        py::arg("rng"));

    // --- adversarial attacks -------------------------------------------------
    py::class_<ThermoContext>(m, "ThermoContext")
        .def(py::init<>())
        .def_readwrite("Q", &ThermoContext::Q)
        .def_readwrite("kT", &ThermoContext::kT);

    py::enum_<AttackSpace>(m, "AttackSpace")
        .value("coordinate", AttackSpace::coordinate)
        .value("collective_variable", AttackSpace::collective_variable);

    py::class_<AttackConfig>(m, "AttackConfig")
        .def(py::init<>())
        .def_readwrite("steps", &AttackConfig::steps)
        .def_readwrite("learning_rate", &AttackConfig::learning_rate)
        .def_readwrite("delta_init_sigma", &AttackConfig::delta_init_sigma)
        .def_readwrite("loss_kind", &AttackConfig::loss_kind)
        .def_readwrite("space", &AttackConfig::space)
        .def_readwrite("n_seeds", &AttackConfig::n_seeds);

    py::class_<AttackResult>(m, "AttackResult")
        .def_readonly("seed", &AttackResult::seed)
        .def_readonly("final_delta", &AttackResult::final_delta)
        .def_readonly("attacked", &AttackResult::attacked)
        .def_readonly("final_loss", &AttackResult::final_loss)
        .def_readonly("final_stats", &AttackResult::final_stats)
        .def_readonly("probability", &AttackResult::probability)
        .def_readonly("loss_trajectory", &AttackResult::loss_trajectory)
        .def_readonly("mean_energy_trajectory", &AttackResult::mean_energy_trajectory)
        .def_readonly("variance_trajectory", &AttackResult::variance_trajectory)
        .def_readonly("zero_signal", &AttackResult::zero_signal);

    m.def("partition_function", &partition_function, py::arg("data"), py::arg("kT"));
    m.def("boltzmann_probability", &boltzmann_probability, py::arg("mean_energy"), py::arg("ctx"));
    m.def("adversarial_loss", &adversarial_loss, py::arg("committee"), py::arg("ctx"),
          py::arg("x_delta"), py::arg("loss_kind"));
    m.def(
        "run_attack",
        [](const Committee& c, const ThermoContext& ctx, const Configuration& seed,
           const AttackConfig& cfg, Rng& rng) {
            const CoordinateAdapter adapter;
            return run_attack(c, ctx, seed, cfg, rng, adapter);
        },
        py::arg("committee"), py::arg("ctx"), py::arg("seed"), py::arg("cfg"), py::arg("rng"));
    m.def(
        "run_attack_batch",
        [](const Committee& c, const ThermoContext& ctx, const std::vector<Configuration>& seeds,
           const AttackConfig& cfg, Rng& rng) {
            const CoordinateAdapter adapter;
            return run_attack_batch(c, ctx, seeds, cfg, rng, adapter);
        },
        py::arg("committee"), py::arg("ctx"), py::arg("seeds"), py::arg("cfg"), py::arg("rng"));

    // --- selection -----------------------------------------------------------
    py::enum_<DistanceKind>(m, "DistanceKind")
        .value("euclidean", DistanceKind::euclidean)
        .value("rmsd", DistanceKind::rmsd);

    py::class_<SelectionConfig>(m, "SelectionConfig")
        .def(py::init<>())
        .def_readwrite("distance_threshold", &SelectionConfig::distance_threshold)
        .def_readwrite("uncertainty_percentile", &SelectionConfig::uncertainty_percentile)
        .def_readwrite("max_new", &SelectionConfig::max_new)
        .def_readwrite("distance_kind", &SelectionConfig::distance_kind);

    m.def("distance_matrix", &distance_matrix, py::arg("points"), py::arg("kind"));
    m.def("cluster_representatives", &cluster_representatives, py::arg("dist"),
          py::arg("threshold"), py::arg("scores"));
    m.def(
        "select_informative",
        [](const std::vector<AttackResult>& candidates, const Committee& committee,
           const UncertaintyThreshold& thr, const SelectionConfig& cfg, Rng& rng) {
            return select_informative(candidates, committee, thr, cfg, rng, nullptr);
        },
        py::arg("candidates"), py::arg("committee"), py::arg("threshold"), py::arg("cfg"),
        py::arg("rng"));

    // --- chain geometry ------------------------------------------------------
    py::class_<ChainTopology>(m, "ChainTopology")
        .def(py::init<>())
        .def_readwrite("n_atoms", &ChainTopology::n_atoms)
        .def_readwrite("bond_length", &ChainTopology::bond_length)
        .def_readwrite("bond_angle", &ChainTopology::bond_angle)
        .def_readwrite("dihedrals", &ChainTopology::dihedrals)
        .def("n_dihedrals", &ChainTopology::n_dihedrals);

    py::class_<CvVector>(m, "CvVector").def_readonly("angles", &CvVector::angles);

    m.def("make_chain_topology", &make_chain_topology, py::arg("n_atoms"), py::arg("bond_length"),
          py::arg("bond_angle"));
    m.def("make_chain_configuration", &make_chain_configuration, py::arg("topology"));
    m.def("dihedral_angle", &dihedral_angle, py::arg("coords"), py::arg("quadruple"));
    m.def("cv_backmap", &cv_backmap, py::arg("seed"), py::arg("topology"), py::arg("delta"));
    m.def("measure_cvs", &measure_cvs, py::arg("coords"), py::arg("topology"));

    // --- full loop, config, CSV ---------------------------------------------
    py::enum_<Strategy>(m, "Strategy")
        .value("adversarial", Strategy::adversarial)
        .value("random", Strategy::random);

    py::class_<LoopConfig>(m, "LoopConfig")
        .def(py::init<>())
        .def_readwrite("potential", &LoopConfig::potential)
        .def_readwrite("bounds", &LoopConfig::bounds)
        .def_readwrite("init_candidates", &LoopConfig::init_candidates)
        .def_readwrite("energy_cutoff", &LoopConfig::energy_cutoff)
        .def_readwrite("architecture", &LoopConfig::architecture)
        .def_readwrite("members", &LoopConfig::members)
        .def_readwrite("loss", &LoopConfig::loss)
        .def_readwrite("train", &LoopConfig::train)
        .def_readwrite("attack", &LoopConfig::attack)
        .def_readwrite("kT", &LoopConfig::kT)
        .def_readwrite("selection", &LoopConfig::selection)
        .def_readwrite("generations", &LoopConfig::generations)
        .def_readwrite("strategy", &LoopConfig::strategy)
        .def_readwrite("random_sigma", &LoopConfig::random_sigma)
        .def_readwrite("seed", &LoopConfig::seed)
        .def_readwrite("grid_resolution", &LoopConfig::grid_resolution)
        .def("validate", &LoopConfig::validate);

    py::class_<GenerationRecord>(m, "GenerationRecord")
        .def_readonly("generation", &GenerationRecord::generation)
        .def_readonly("n_train", &GenerationRecord::n_train)
        .def_readonly("rmse", &GenerationRecord::rmse)
        .def_readonly("n_proposed", &GenerationRecord::n_proposed)
        .def_readonly("n_selected", &GenerationRecord::n_selected)
        .def_readonly("median_new_energy", &GenerationRecord::median_new_energy)
        .def_readonly("new_energies", &GenerationRecord::new_energies)
        .def_readonly("threshold_t", &GenerationRecord::threshold_t)
        .def_readonly("saturated", &GenerationRecord::saturated);

    m.def("parse_config", &parse_config, py::arg("path"),
          py::arg("overrides") = std::vector<std::string>{});
    m.def("serialize_config", &serialize_config, py::arg("cfg"));
    m.def("grid_rmse", &grid_rmse, py::arg("committee"), py::arg("spec"), py::arg("bounds"),
          py::arg("resolution"));
    m.def("random_proposals", &random_proposals, py::arg("data"), py::arg("sigma"),
          py::arg("count"), py::arg("rng"));
    m.def("run_active_learning", &run_active_learning, py::arg("cfg"), py::arg("out_dir") = "",
          py::arg("full_artifacts") = true);
    m.def("write_dataset_csv", &write_dataset_csv, py::arg("data"), py::arg("path"));
    m.def("read_dataset_csv", &read_dataset_csv, py::arg("path"));
}
