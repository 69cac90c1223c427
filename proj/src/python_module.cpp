#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ssr/autoencoder.hpp"
#include "ssr/baselines.hpp"
#include "ssr/checkpoint.hpp"
#include "ssr/datagen.hpp"
#include "ssr/harness.hpp"
#include "ssr/threshold.hpp"

namespace py = pybind11;

namespace {

ssr::SplitComplexVector split_from_numpy(const ssr::CVec& v) {
    return ssr::SplitComplexVector::from_complex(v);
}

ssr::MeasurementMatrix matrix_from_numpy(const ssr::CMat& m) {
    return ssr::MeasurementMatrix::from_complex(m);
}

py::array_t<std::uint8_t> binary_to_numpy(const ssr::BinaryVec& v) {
    py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

ssr::BinaryVec binary_from_numpy(const py::array_t<std::uint8_t>& arr) {
    const auto buf = arr.request();
    const auto* data = static_cast<const std::uint8_t*>(buf.ptr);
    return ssr::BinaryVec(data, data + buf.size);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Joint measurement-matrix and support-recovery design: C++ core";

    py::class_<ssr::Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def_static("from_stream",
                    py::overload_cast<std::uint64_t, std::string_view>(&ssr::Rng::from_stream),
                    py::arg("seed"), py::arg("tag"))
        .def("uniform", &ssr::Rng::uniform)
        .def("normal", &ssr::Rng::normal);

    py::enum_<ssr::ActivityCase>(m, "ActivityCase")
        .value("IID", ssr::ActivityCase::Iid)
        .value("TWO_GROUP", ssr::ActivityCase::TwoGroup)
        .value("GROUP_CORRELATED", ssr::ActivityCase::GroupCorrelated);

    py::class_<ssr::ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("num_devices", &ssr::ScenarioConfig::num_devices)
        .def_readwrite("pilot_length", &ssr::ScenarioConfig::pilot_length)
        .def_readwrite("activity_case", &ssr::ScenarioConfig::activity_case)
        .def_readwrite("p", &ssr::ScenarioConfig::p)
        .def_readwrite("ratio_p1_p2", &ssr::ScenarioConfig::ratio_p1_p2)
        .def_readwrite("p_u", &ssr::ScenarioConfig::p_u)
        .def_readwrite("group_count", &ssr::ScenarioConfig::group_count)
        .def_readwrite("sigma2", &ssr::ScenarioConfig::sigma2)
        .def_readwrite("seed", &ssr::ScenarioConfig::seed)
        .def("validate", &ssr::ScenarioConfig::validate);

    py::class_<ssr::Dataset>(m, "Dataset")
        .def("__len__", [](const ssr::Dataset& d) { return d.size(); })
        .def_property_readonly("signal_dim", &ssr::Dataset::signal_dim)
        .def("signals",
             [](const ssr::Dataset& d) {
                 ssr::CMat out(static_cast<Eigen::Index>(d.size()), d.signal_dim());
                 for (Eigen::Index i = 0; i < out.rows(); ++i) {
                     out.row(i) = d.samples[static_cast<std::size_t>(i)].x.to_complex();
                 }
                 return out;
             })
        .def("labels", [](const ssr::Dataset& d) {
            py::array_t<std::uint8_t> out({d.size(), static_cast<std::size_t>(d.signal_dim())});
            auto view = out.mutable_unchecked<2>();
            for (std::size_t i = 0; i < d.size(); ++i) {
                for (std::size_t k = 0; k < d.samples[i].alpha.size(); ++k) {
                    view(i, k) = d.samples[i].alpha[k];
                }
            }
            return out;
        });

    py::class_<ssr::DatasetSizes>(m, "DatasetSizes")
        .def(py::init<>())
        .def_readwrite("train", &ssr::DatasetSizes::train)
        .def_readwrite("validation", &ssr::DatasetSizes::validation)
        .def_readwrite("test", &ssr::DatasetSizes::test);

    py::class_<ssr::DatasetBundle>(m, "DatasetBundle")
        .def_readonly("train", &ssr::DatasetBundle::train)
        .def_readonly("validation", &ssr::DatasetBundle::validation)
        .def_readonly("test", &ssr::DatasetBundle::test);

    m.def("build_datasets", &ssr::build_datasets, py::arg("config"), py::arg("sizes"));

    m.def(
        "gen_sample",
        [](const ssr::ScenarioConfig& cfg, std::uint64_t seed, std::uint64_t index) {
            ssr::Rng rng = ssr::Rng::from_stream(seed, "sample", index);
            const ssr::Sample s = ssr::gen_sample(cfg, rng);
            return py::make_tuple(s.x.to_complex(), binary_to_numpy(s.alpha));
        },
        py::arg("config"), py::arg("seed"), py::arg("index") = 0);

    m.def(
        "complex_matvec",
        [](const ssr::CMat& a, const ssr::CVec& x) {
            return ssr::complex_matvec(matrix_from_numpy(a), split_from_numpy(x)).to_complex();
        },
        py::arg("matrix"), py::arg("x"));

    m.def(
        "support_of",
        [](const ssr::CVec& x, double tol) {
            return binary_to_numpy(ssr::support_of(split_from_numpy(x), tol));
        },
        py::arg("x"), py::arg("tol") = 0.0);

    m.def(
        "project_pilot_power",
        [](const ssr::CMat& a) {
            return ssr::project_pilot_power(matrix_from_numpy(a)).to_complex();
        },
        py::arg("matrix"));

    py::class_<ssr::TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("hidden_width", &ssr::TrainConfig::hidden_width)
        .def_readwrite("learning_rate", &ssr::TrainConfig::learning_rate)
        .def_readwrite("batch_size", &ssr::TrainConfig::batch_size)
        .def_readwrite("max_epochs", &ssr::TrainConfig::max_epochs)
        .def_readwrite("patience", &ssr::TrainConfig::patience)
        .def_readwrite("loss_change_tol", &ssr::TrainConfig::loss_change_tol)
        .def_readwrite("freeze_matrix", &ssr::TrainConfig::freeze_matrix)
        .def_readwrite("seed", &ssr::TrainConfig::seed);

    py::class_<ssr::EpochRecord>(m, "EpochRecord")
        .def_readonly("epoch", &ssr::EpochRecord::epoch)
        .def_readonly("train_loss", &ssr::EpochRecord::train_loss)
        .def_readonly("val_loss", &ssr::EpochRecord::val_loss)
        .def_readonly("best_val_loss", &ssr::EpochRecord::best_val_loss);

    py::class_<ssr::TrainLog>(m, "TrainLog")
        .def_readonly("epochs", &ssr::TrainLog::epochs)
        .def_readonly("best_epoch", &ssr::TrainLog::best_epoch)
        .def_readonly("train_seconds", &ssr::TrainLog::train_seconds);

    py::class_<ssr::DecoderParams>(m, "DecoderParams")
        .def_readwrite("theta1", &ssr::DecoderParams::theta1)
        .def_readwrite("b1", &ssr::DecoderParams::b1)
        .def_readwrite("theta2", &ssr::DecoderParams::theta2)
        .def_readwrite("b2", &ssr::DecoderParams::b2)
        .def_readwrite("theta3", &ssr::DecoderParams::theta3)
        .def_readwrite("b3", &ssr::DecoderParams::b3);

    py::class_<ssr::TrainedModel>(m, "TrainedModel")
        .def_property_readonly(
            "matrix", [](const ssr::TrainedModel& t) { return t.matrix.to_complex(); })
        .def_readonly("decoder", &ssr::TrainedModel::decoder)
        .def_readonly("log", &ssr::TrainedModel::log);

    m.def(
        "train",
        [](const ssr::Dataset& train_set, const ssr::Dataset& val_set,
           const ssr::TrainConfig& cfg, const ssr::ScenarioConfig& scenario) {
            return ssr::train(train_set, val_set, cfg, scenario);
        },
        py::arg("train_set"), py::arg("val_set"), py::arg("config"), py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "encoder_forward",
        [](const ssr::CMat& a, const ssr::CVec& x, double sigma2, std::uint64_t seed) {
            ssr::Rng rng(seed);
            return ssr::encoder_forward(matrix_from_numpy(a), split_from_numpy(x), sigma2, rng)
                .to_complex();
        },
        py::arg("matrix"), py::arg("x"), py::arg("sigma2"), py::arg("seed") = 0);

    m.def(
        "decoder_forward",
        [](const ssr::DecoderParams& w, const ssr::CVec& y) {
            return ssr::decoder_forward(w, split_from_numpy(y));
        },
        py::arg("decoder"), py::arg("y"));

    m.def(
        "detect",
        [](const ssr::DecoderParams& w, const ssr::CVec& y, double r) {
            return binary_to_numpy(ssr::detect(w, split_from_numpy(y), r));
        },
        py::arg("decoder"), py::arg("y"), py::arg("r"));

    m.def(
        "hard_threshold",
        [](const ssr::Vec& scores, double r) {
            return binary_to_numpy(ssr::hard_threshold(scores, r));
        },
        py::arg("scores"), py::arg("r"));

    m.def(
        "error_rate",
        [](const std::vector<py::array_t<std::uint8_t>>& pred,
           const std::vector<py::array_t<std::uint8_t>>& truth) {
            std::vector<ssr::BinaryVec> p, t;
            for (const auto& a : pred) p.push_back(binary_from_numpy(a));
            for (const auto& a : truth) t.push_back(binary_from_numpy(a));
            return ssr::error_rate(p, t);
        },
        py::arg("predicted"), py::arg("truth"));

    py::class_<ssr::ThresholdCalibration>(m, "ThresholdCalibration")
        .def_readonly("r_star", &ssr::ThresholdCalibration::r_star)
        .def_readonly("pe_star", &ssr::ThresholdCalibration::pe_star)
        .def_readonly("grid", &ssr::ThresholdCalibration::grid);

    m.def(
        "calibrate_threshold",
        [](const std::vector<ssr::Vec>& outputs,
           const std::vector<py::array_t<std::uint8_t>>& labels) {
            std::vector<ssr::BinaryVec> t;
            for (const auto& a : labels) t.push_back(binary_from_numpy(a));
            return ssr::calibrate_threshold(outputs, t);
        },
        py::arg("outputs"), py::arg("labels"));

    py::class_<ssr::SolveResult>(m, "SolveResult")
        .def_property_readonly("x",
                               [](const ssr::SolveResult& r) { return r.x.to_complex(); })
        .def_readonly("converged", &ssr::SolveResult::converged)
        .def_readonly("iterations", &ssr::SolveResult::iterations);

    m.def(
        "lasso_solve",
        [](const ssr::CMat& a, const ssr::CVec& y, double lambda, int max_iters, double tol) {
            ssr::LassoConfig cfg;
            cfg.lambda = lambda;
            cfg.max_iters = max_iters;
            cfg.tol = tol;
            return ssr::lasso_solve(matrix_from_numpy(a), split_from_numpy(y), cfg);
        },
        py::arg("matrix"), py::arg("y"), py::arg("lambda_"), py::arg("max_iters") = 1000,
        py::arg("tol") = 1e-8);

    m.def(
        "group_lasso_solve",
        [](const ssr::CMat& a, const ssr::CVec& y, int group_size, int group_count,
           double lambda, int max_iters, double tol) {
            return ssr::group_lasso_solve(matrix_from_numpy(a), split_from_numpy(y),
                                          ssr::GroupSpec{group_size, group_count}, lambda,
                                          max_iters, tol);
        },
        py::arg("matrix"), py::arg("y"), py::arg("group_size"), py::arg("group_count"),
        py::arg("lambda_"), py::arg("max_iters") = 1000, py::arg("tol") = 1e-8);

    m.def(
        "sparse_group_lasso_solve",
        [](const ssr::CMat& a, const ssr::CVec& y, int group_size, int group_count,
           double lambda1, double lambda2, int max_iters, double tol) {
            return ssr::sparse_group_lasso_solve(matrix_from_numpy(a), split_from_numpy(y),
                                                 ssr::GroupSpec{group_size, group_count},
                                                 lambda1, lambda2, max_iters, tol);
        },
        py::arg("matrix"), py::arg("y"), py::arg("group_size"), py::arg("group_count"),
        py::arg("lambda1"), py::arg("lambda2"), py::arg("max_iters") = 1000,
        py::arg("tol") = 1e-8);

    m.def(
        "amp_solve",
        [](const ssr::CMat& a, const ssr::CVec& y, int max_iters, double damping,
           double sparsity_prior, double sigma2, double threshold_factor, double tol) {
            ssr::AmpConfig cfg;
            cfg.max_iters = max_iters;
            cfg.damping = damping;
            cfg.sparsity_prior = sparsity_prior;
            cfg.sigma2 = sigma2;
            cfg.threshold_factor = threshold_factor;
            cfg.tol = tol;
            return ssr::amp_solve(matrix_from_numpy(a), split_from_numpy(y), cfg);
        },
        py::arg("matrix"), py::arg("y"), py::arg("max_iters") = 200, py::arg("damping") = 0.0,
        py::arg("sparsity_prior") = 0.1, py::arg("sigma2") = 0.1,
        py::arg("threshold_factor") = 1.1, py::arg("tol") = 1e-8);

    m.def(
        "magnitude_support",
        [](const ssr::CVec& x, double tau) {
            return binary_to_numpy(ssr::magnitude_support(split_from_numpy(x), tau));
        },
        py::arg("x"), py::arg("tau"));

    py::class_<ssr::Checkpoint>(m, "Checkpoint")
        .def_property_readonly(
            "matrix", [](const ssr::Checkpoint& c) { return c.matrix.to_complex(); })
        .def_readonly("decoder", &ssr::Checkpoint::decoder)
        .def_readonly("r_star", &ssr::Checkpoint::r_star);

    m.def(
        "save_checkpoint",
        [](const std::string& path, const ssr::CMat& matrix, const ssr::DecoderParams& decoder,
           double r_star) {
            ssr::save_checkpoint(path,
                                 ssr::Checkpoint{matrix_from_numpy(matrix), decoder, r_star});
        },
        py::arg("path"), py::arg("matrix"), py::arg("decoder"), py::arg("r_star") = 0.5);
    m.def("load_checkpoint", &ssr::load_checkpoint, py::arg("path"));

    m.def("write_dataset",
          [](const std::string& path, const ssr::Dataset& ds, ssr::ActivityCase c) {
              ssr::write_dataset(path, ds, c);
          });
    m.def("read_dataset", [](const std::string& path) {
        auto loaded = ssr::read_dataset(path);
        return py::make_tuple(loaded.dataset, loaded.activity_case);
    });

    m.attr("__version__") = "0.1.0";
}
