// Python bindings: numpy in, numpy out.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <sstream>

#include "chtn/checkpoint.hpp"
#include "chtn/dataset.hpp"
#include "chtn/errors.hpp"
#include "chtn/gradcheck.hpp"
#include "chtn/losses.hpp"
#include "chtn/mmd.hpp"
#include "chtn/retrieval.hpp"
#include "chtn/synth.hpp"
#include "chtn/trainer.hpp"

namespace py = pybind11;
using namespace chtn;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw InvalidArgument("expected a 2-d array, got " + std::to_string(a.ndim()) + "-d");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<double> data(a.data(), a.data() + rows * cols);
  return Matrix(rows, cols, std::move(data));
}

py::array_t<double> to_numpy(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  if (m.size() > 0) std::memcpy(out.mutable_data(), m.data().data(), m.size() * sizeof(double));
  return out;
}

Labels to_labels(const LabelArray& a) {
  if (a.ndim() != 1) throw InvalidArgument("labels must be a 1-d array");
  Labels out(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::int64_t v = a.data()[i];
    if (v < 0) throw InvalidArgument("labels must be non-negative");
    out[i] = static_cast<std::size_t>(v);
  }
  return out;
}

py::array_t<std::int64_t> labels_to_numpy(const Labels& labels) {
  std::vector<std::int64_t> v(labels.begin(), labels.end());
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(v.size())};
  const std::vector<py::ssize_t> strides{sizeof(std::int64_t)};
  return py::array_t<std::int64_t>(shape, strides, v.data());
}

std::size_t infer_classes(const Labels& labels, std::size_t given) {
  if (given > 0) return given;
  std::size_t c = 0;
  for (auto l : labels) c = std::max(c, l + 1);
  return c;
}

Dataset make_dataset(const Array& x, const LabelArray& y, std::size_t classes) {
  Dataset d{to_matrix(x), to_labels(y), 0};
  d.class_count = infer_classes(d.labels, classes);
  d.validate();
  return d;
}

py::dict dataset_dict(const Dataset& d) {
  py::dict out;
  out["x"] = to_numpy(d.features);
  out["y"] = labels_to_numpy(d.labels);
  out["classes"] = d.class_count;
  return out;
}

SynthConfig synth_config_from(const py::kwargs& kw) {
  SynthConfig c;
  for (auto [k, v] : kw) {
    const std::string key = py::cast<std::string>(k);
    if (key == "c_tgt") c.c_tgt = py::cast<std::size_t>(v);
    else if (key == "c_src") c.c_src = py::cast<std::size_t>(v);
    else if (key == "overlap") c.overlap = py::cast<std::size_t>(v);
    else if (key == "d_latent") c.d_latent = py::cast<std::size_t>(v);
    else if (key == "d_img") c.d_img = py::cast<std::size_t>(v);
    else if (key == "d_txt") c.d_txt = py::cast<std::size_t>(v);
    else if (key == "noise_sigma") c.noise_sigma = py::cast<double>(v);
    else if (key == "source_shift") c.source_shift = py::cast<double>(v);
    else if (key == "n_train") c.n_train = py::cast<std::size_t>(v);
    else if (key == "n_test") c.n_test = py::cast<std::size_t>(v);
    else if (key == "n_src") c.n_src = py::cast<std::size_t>(v);
    else if (key == "seed") c.seed = py::cast<std::uint64_t>(v);
    else throw InvalidArgument("synthetic: unknown option '" + key + "'");
  }
  c.validate();
  return c;
}

py::dict report_dict(const RetrievalReport& r) {
  py::dict out;
  out["img2txt"] = r.map_img2txt;
  out["txt2img"] = r.map_txt2img;
  out["average"] = r.map_avg;
  out["ap_img2txt"] = r.ap_img2txt;
  out["ap_txt2img"] = r.ap_txt2img;
  out["skipped_queries"] = r.skipped_queries;
  return out;
}

py::dict breakdown_dict(const LossBreakdown& b) {
  py::dict out;
  out["single"] = b.single;
  out["source"] = b.source;
  out["cross"] = b.cross;
  out["correlation"] = b.correlation;
  out["total"] = b.total;
  return out;
}

// Trained parameters plus the loss history that produced them.
struct Model {
  Params params;
  std::vector<LossBreakdown> history;

  py::array_t<double> represent(const Array& x, const std::string& modality) const {
    Modality m;
    if (modality == "image" || modality == "img") m = Modality::Image;
    else if (modality == "text" || modality == "txt") m = Modality::Text;
    else throw InvalidArgument("modality must be 'image' or 'text'");
    return to_numpy(common_representation(to_matrix(x), m, params));
  }
};

Model train_model(const Array& src_x, const LabelArray& src_y, const Array& img_x,
                  const Array& txt_x, const LabelArray& tgt_y, const std::string& ablation,
                  std::size_t iterations, double lr, std::size_t batch_src, std::size_t batch_tgt,
                  std::size_t hidden, std::uint64_t seed, std::size_t src_classes,
                  std::size_t tgt_classes) {
  const Dataset source = make_dataset(src_x, src_y, src_classes);
  PairedDataset target;
  target.img = make_dataset(img_x, tgt_y, tgt_classes);
  target.txt = make_dataset(txt_x, tgt_y, tgt_classes);
  target.validate();

  TrainConfig cfg;
  cfg.ablation = parse_ablation(ablation);
  cfg.iterations = iterations;
  cfg.lr = lr;
  cfg.batch_src = batch_src;
  cfg.batch_tgt = batch_tgt;
  cfg.seed = seed;
  cfg.validate();
  const NetworkConfig net = make_network_config(source, target, hidden, cfg.ablation);

  TrainResult r;
  {
    py::gil_scoped_release release;
    r = train(source, target, net, cfg);
  }
  return Model{std::move(r.params), std::move(r.log.history)};
}

}  // namespace

PYBIND11_MODULE(_chtn, m) {
  m.doc() = "Cross-modal hybrid transfer network";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ValueError);
  py::register_exception<UndefinedQuery>(m, "UndefinedQuery", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<InvalidState>(m, "InvalidState", PyExc_RuntimeError);

  m.def("default_kernel_multipliers", &KernelSpec::default_multipliers);

  m.def(
      "median_heuristic", [](const Array& x) { return median_heuristic(to_matrix(x)); },
      py::arg("samples"));

  m.def(
      "mmd2",
      [](const Array& a, const Array& b, std::optional<double> bandwidth_sq,
         std::optional<std::vector<double>> multipliers) {
        const Matrix ma = to_matrix(a);
        const Matrix mb = to_matrix(b);
        KernelSpec k;
        if (multipliers) k.multipliers = *multipliers;
        k.base_bandwidth_sq = bandwidth_sq ? *bandwidth_sq : median_heuristic(vstack(ma, mb));
        k.validate();
        return mmd2_biased(ma, mb, k).value;
      },
      py::arg("a"), py::arg("b"), py::arg("bandwidth_sq") = py::none(),
      py::arg("multipliers") = py::none(),
      "Biased squared MMD under a Gaussian mixture kernel. The bandwidth defaults to the "
      "median heuristic over the pooled samples.");

  m.def(
      "softmax_loss",
      [](const Array& logits, const LabelArray& labels) {
        const Labels y = to_labels(labels);
        return softmax_supervision_loss(to_matrix(logits), y).value;
      },
      py::arg("logits"), py::arg("labels"));

  m.def(
      "average_precision",
      [](const std::vector<bool>& relevance, std::optional<std::size_t> total_relevant) {
        std::vector<std::uint8_t> rel(relevance.begin(), relevance.end());
        std::size_t r = 0;
        for (auto v : rel) r += v;
        return average_precision(rel, total_relevant ? *total_relevant : r);
      },
      py::arg("relevance"), py::arg("total_relevant") = py::none());

  m.def(
      "evaluate_retrieval",
      [](const Array& img, const Array& txt, const LabelArray& labels) {
        const Labels y = to_labels(labels);
        return report_dict(evaluate_retrieval(to_matrix(img), to_matrix(txt), y, y));
      },
      py::arg("img_reps"), py::arg("txt_reps"), py::arg("labels"));

  m.def(
      "make_synthetic",
      [](const py::kwargs& kw) {
        const SynthSplit s = generate_synthetic_split(synth_config_from(kw));
        py::dict out;
        out["source"] = dataset_dict(s.source);
        out["train_img"] = dataset_dict(s.train.img);
        out["train_txt"] = dataset_dict(s.train.txt);
        py::dict test;
        test["img"] = to_numpy(s.test.img);
        test["txt"] = to_numpy(s.test.txt);
        test["labels"] = labels_to_numpy(s.test.labels);
        test["classes"] = s.test.class_count;
        out["test"] = test;
        return out;
      },
      "Synthetic source + paired target data. Keyword options override the defaults.");

  m.def(
      "gradcheck",
      [](std::uint64_t seed, const std::string& dims) {
        const GradcheckReport r = run_gradcheck(parse_gradcheck_dims(dims), seed);
        py::dict out;
        for (const auto& t : r.terms) out[py::str(t.term)] = t.max_rel_error;
        out["parameters"] = r.parameter_count;
        return out;
      },
      py::arg("seed") = 1, py::arg("dims") = "");

  py::class_<Model>(m, "Model")
      .def("represent", &Model::represent, py::arg("x"), py::arg("modality"),
           "Softmax over target classes for image or text features.")
      .def_property_readonly("ablation",
                             [](const Model& self) { return std::string(to_string(self.params.config.ablation)); })
      .def_property_readonly("parameter_count",
                             [](const Model& self) { return self.params.values.parameter_count(); })
      .def_property_readonly("history",
                             [](const Model& self) {
                               py::list out;
                               for (const auto& b : self.history) out.append(breakdown_dict(b));
                               return out;
                             })
      .def("save", [](const Model& self, const std::string& path) { save_checkpoint(path, self.params); })
      .def_static("load", [](const std::string& path) { return Model{load_checkpoint(path), {}}; });

  m.def("train", &train_model, py::arg("src_x"), py::arg("src_y"), py::arg("img_x"),
        py::arg("txt_x"), py::arg("tgt_y"), py::kw_only(), py::arg("ablation") = "full",
        py::arg("iterations") = 500, py::arg("lr") = 0.01, py::arg("batch_src") = 32,
        py::arg("batch_tgt") = 32, py::arg("hidden") = 64, py::arg("seed") = 1,
        py::arg("src_classes") = 0, py::arg("tgt_classes") = 0);
}
