#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adavu/confusion.hpp"
#include "adavu/datagen.hpp"
#include "adavu/error.hpp"
#include "adavu/event_model.hpp"
#include "adavu/gmm.hpp"
#include "adavu/hmm.hpp"
#include "adavu/model_io.hpp"
#include "adavu/posture_features.hpp"
#include "adavu/svm.hpp"

namespace py = pybind11;
using namespace adavu;

namespace {

LabeledFeatures make_features(const Eigen::MatrixXd& x, const std::vector<std::string>& labels) {
  LabeledFeatures f;
  f.features = x;
  f.labels = labels;
  for (Eigen::Index c = 0; c < x.cols(); ++c) f.columns.push_back("x" + std::to_string(c));
  for (std::size_t i = 0; i < labels.size(); ++i) f.sources.push_back(std::to_string(i));
  f.validate();
  return f;
}

std::vector<std::string> predict_rows(const Eigen::MatrixXd& x, const std::function<Prediction(const Eigen::VectorXd&)>& f) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(f(x.row(i).transpose()).label);
  return out;
}

// Skeleton given as a 20 x 3 array in joint order.
SkeletonFrame to_skeleton(const Eigen::MatrixXd& joints) {
  if (joints.rows() != static_cast<Eigen::Index>(kJointCount) || joints.cols() != 3) {
    throw DomainError("a skeleton is a 20 x 3 array of joint positions");
  }
  SkeletonFrame s;
  for (std::size_t j = 0; j < kJointCount; ++j) s.joints[j] = joints.row(static_cast<Eigen::Index>(j)).transpose();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bharatanatyam Adavu segmentation and recognition toolkit";
  m.attr("__version__") = ADAVU_VERSION;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto domain = py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", domain.ptr());
  py::register_exception<NumericError>(m, "NumericError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());

  m.def("time_to_frame", &time_to_frame, py::arg("seconds"), py::arg("fps") = kDefaultFps);
  m.def("frame_to_time", &frame_to_time, py::arg("frame"), py::arg("fps") = kDefaultFps);

  m.def(
      "hog_length",
      [](int cell, int block, int overlap, int bins, int height, int width) {
        return hog_length(HogParams{cell, block, overlap, bins, height, width});
      },
      py::arg("cell_size") = 8, py::arg("block_size") = 2, py::arg("block_overlap") = 1, py::arg("num_bins") = 9,
      py::arg("image_height") = 120, py::arg("image_width") = 160);
  m.def(
      "hog_descriptor",
      [](const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& img) {
        std::vector<std::uint8_t> px(img.data(), img.data() + img.size());
        HogParams p;
        p.image_height = static_cast<int>(img.rows());
        p.image_width = static_cast<int>(img.cols());
        return hog_descriptor(GrayFrame(p.image_width, p.image_height, std::move(px)), p);
      },
      py::arg("image"), "HOG of a height x width uint8 image.");
  m.def(
      "bone_angles",
      [](const std::vector<Eigen::MatrixXd>& frames) {
        std::vector<SkeletonFrame> s;
        for (const auto& f : frames) s.push_back(to_skeleton(f));
        return bone_angles(s).to_vector();
      },
      py::arg("frames"), "24 bone-axis angles in degrees averaged over 1 to 5 skeletons (20 x 3 arrays).");

  m.def(
      "gen_clusters",
      [](int k, int d, double separation, int n, std::uint64_t seed) {
        const auto f = gen_clusters(k, d, separation, n, seed);
        return py::make_tuple(f.features, f.labels);
      },
      py::arg("k"), py::arg("d"), py::arg("separation"), py::arg("n_per_class"), py::arg("seed") = 0);

  py::class_<GmmClassifier>(m, "GmmClassifier")
      .def_property_readonly("classes", &GmmClassifier::classes)
      .def("predict", [](const GmmClassifier& g, const Eigen::MatrixXd& x) {
        return predict_rows(x, [&](const Eigen::VectorXd& v) { return gmm_predict(g, v); });
      })
      .def("save", [](const GmmClassifier& g, const std::string& path) { save_model(path, g); });
  m.def(
      "gmm_fit",
      [](const Eigen::MatrixXd& x, const std::vector<std::string>& labels, int components, const std::string& covariance,
         std::uint64_t seed) {
        GmmConfig cfg;
        cfg.components = components;
        cfg.covariance = parse_covariance_type(covariance);
        cfg.seed = seed;
        return gmm_fit(make_features(x, labels), cfg);
      },
      py::arg("x"), py::arg("labels"), py::arg("components") = 1, py::arg("covariance") = "full", py::arg("seed") = 0);
  m.def("load_gmm", &load_gmm, py::arg("path"));

  py::class_<SvmOvrClassifier>(m, "SvmClassifier")
      .def_property_readonly("classes", &SvmOvrClassifier::classes)
      .def("predict", [](const SvmOvrClassifier& s, const Eigen::MatrixXd& x) {
        return predict_rows(x, [&](const Eigen::VectorXd& v) { return svm_predict(s, v); });
      })
      .def("save", [](const SvmOvrClassifier& s, const std::string& path) { save_model(path, s); });
  m.def(
      "svm_fit",
      [](const Eigen::MatrixXd& x, const std::vector<std::string>& labels, double c, const std::string& kernel,
         double sigma, std::uint64_t seed) {
        SvmConfig cfg;
        cfg.c = c;
        cfg.kernel = parse_kernel_type(kernel);
        cfg.sigma = sigma;
        cfg.seed = seed;
        return svm_train_ovr(make_features(x, labels), cfg);
      },
      py::arg("x"), py::arg("labels"), py::arg("c") = 1.0, py::arg("kernel") = "rbf", py::arg("sigma") = 0.0,
      py::arg("seed") = 0);
  m.def("load_svm", &load_svm, py::arg("path"));

  py::class_<GaussianHmm>(m, "GaussianHmm")
      .def(py::init([](const Eigen::VectorXd& pi, const Eigen::MatrixXd& a, const Eigen::MatrixXd& means,
                       const Eigen::MatrixXd& variances) {
             GaussianHmm h{"", pi, a, means, variances};
             h.validate();
             return h;
           }),
           py::arg("pi"), py::arg("transition"), py::arg("means"), py::arg("variances"))
      .def_readonly("label", &GaussianHmm::label)
      .def_readonly("pi", &GaussianHmm::pi)
      .def_readonly("transition", &GaussianHmm::transition)
      .def_readonly("means", &GaussianHmm::means)
      .def_readonly("variances", &GaussianHmm::variances)
      .def("log_likelihood", &hmm_log_likelihood, py::arg("observations"))
      .def("viterbi", [](const GaussianHmm& h, const Eigen::MatrixXd& o) {
        const auto v = viterbi(h, o);
        return py::make_tuple(v.path, v.log_probability);
      });

  py::class_<AdavuBank>(m, "AdavuBank")
      .def_readonly("models", &AdavuBank::models)
      .def_property_readonly("labels", &AdavuBank::labels)
      .def("classify", [](const AdavuBank& b, const Eigen::MatrixXd& o) { return classify(b, o).label; })
      .def("scores", [](const AdavuBank& b, const Eigen::MatrixXd& o) { return classify(b, o).scores; })
      .def("save", [](const AdavuBank& b, const std::string& path) { save_model(path, b, HmmConfig{}); });
  m.def("load_bank", &load_bank, py::arg("path"));

  py::class_<ObservationSequence>(m, "ObservationSequence")
      .def_readonly("source", &ObservationSequence::source)
      .def_readonly("label", &ObservationSequence::label)
      .def_readonly("observations", &ObservationSequence::observations)
      .def_readonly("postures", &ObservationSequence::postures);
  m.def(
      "gen_sequences",
      [](const std::vector<std::string>& labels, int count, double joint_jitter, std::uint64_t seed) {
        std::vector<AdavuSpec> specs;
        if (labels.empty()) specs = natta_specs();
        for (const auto& l : labels) specs.push_back(natta_spec(l));
        NoiseSpec noise;
        noise.joint_jitter = joint_jitter;
        return gen_sequence_dataset(specs, count, noise, seed);
      },
      py::arg("labels") = std::vector<std::string>{}, py::arg("count") = 1, py::arg("joint_jitter") = 0.0,
      py::arg("seed") = 0, "Synthetic Natta posture sequences; all eight Adavus when labels is empty.");
  m.def(
      "train_bank",
      [](const std::vector<ObservationSequence>& data, std::uint64_t seed) {
        HmmConfig cfg;
        cfg.seed = seed;
        return train_bank(data, cfg);
      },
      py::arg("sequences"), py::arg("seed") = 0);
  m.def(
      "evaluate_bank",
      [](const AdavuBank& bank, const std::vector<ObservationSequence>& test) {
        const auto c = evaluate(bank, test);
        return py::make_tuple(c.classes(), Eigen::MatrixXd(c.counts().cast<double>()), c.accuracy());
      },
      py::arg("bank"), py::arg("sequences"), "Returns (classes, counts, accuracy).");
}
