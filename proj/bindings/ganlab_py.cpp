// Python bindings for the native core. The surface mirrors the command-line
// tool: experiments are described by the same sectioned config text, and the
// heavy work (training loops, sampling, evaluation) happens in C++ with the
// GIL released.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/config.hpp"
#include "ganlab/diffusion.hpp"
#include "ganlab/gradcheck.hpp"
#include "ganlab/metrics.hpp"
#include "ganlab/report.hpp"
#include "ganlab/toydata.hpp"
#include "ganlab/trainers.hpp"

namespace py = pybind11;
using namespace ganlab;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor tensor_from_numpy(const DoubleArray& arr) {
  const auto info = arr.request();
  int rows = 0;
  int cols = 0;
  if (info.ndim == 1) {
    rows = static_cast<int>(info.shape[0]);
    cols = 1;
  } else if (info.ndim == 2) {
    rows = static_cast<int>(info.shape[0]);
    cols = static_cast<int>(info.shape[1]);
  } else {
    throw std::invalid_argument("expected a 1-D or 2-D float array");
  }
  const double* src = static_cast<const double*>(info.ptr);
  std::vector<double> v(src, src + static_cast<std::size_t>(rows) * cols);
  return Tensor(rows, cols, std::move(v));
}

py::array_t<double> numpy_from_tensor(const Tensor& t) {
  if (!t.defined()) return py::array_t<double>({0, 0});
  py::array_t<double> out({t.rows(), t.cols()});
  std::memcpy(out.mutable_data(), t.values().data(), t.size() * sizeof(double));
  return out;
}

py::dict record_to_dict(const metrics::MetricsRecord& r) {
  py::dict d;
  d["step"] = r.step;
  d["d_loss"] = r.d_loss;
  d["g_loss"] = r.g_loss;
  d["kl"] = r.kl;
  d["js"] = r.js;
  d["w1"] = r.w1;
  d["modes_covered"] = r.modes_covered;
  d["high_quality_fraction"] = r.high_quality_fraction;
  d["d_accuracy"] = r.d_accuracy;
  return d;
}

py::dict report_to_dict(const GradCheckReport& rep) {
  py::dict d;
  d["all_pass"] = rep.all_pass;
  d["seconds"] = rep.seconds;
  py::list cases;
  for (const auto& c : rep.cases) {
    py::dict cd;
    cd["name"] = c.name;
    cd["cases"] = c.cases;
    cd["worst_err"] = c.worst_err;
    cd["pass"] = c.pass;
    cases.append(cd);
  }
  d["cases"] = cases;
  return d;
}

const toydata::DistributionSpec& distribution_of(const trainers::DataSpec& data,
                                                 const char* what) {
  const auto* dist = std::get_if<toydata::DistributionSpec>(&data);
  if (dist == nullptr)
    throw std::invalid_argument(std::string(what) +
                                " needs a [data] section with a plain distribution "
                                "(paired and two-domain sources are trainer-only)");
  return *dist;
}

// A finished adversarial run: the log plus live networks for fresh draws.
struct TrainedModel {
  models::ModelBundle bundle;
  trainers::RunLog log;
  std::string canonical_config;
};

// A fitted denoiser plus the noise schedule it was trained against.
struct DenoiserModel {
  diffusion::Denoiser denoiser;
  diffusion::NoiseSchedule schedule;
  diffusion::DenoiserLog log;
};

TrainedModel run_training(const std::string& config_text) {
  const config::Experiment exp = config::parse_config(config_text);
  trainers::TrainResult res = trainers::train(exp.train);
  return TrainedModel{std::move(res.bundle), std::move(res.log), config::print_config(exp)};
}

DenoiserModel run_denoiser_training(const std::string& config_text) {
  const config::Experiment exp = config::parse_config(config_text);
  const auto& dist = distribution_of(exp.train.data, "train_denoiser");
  const diffusion::DenoiserConfig cfg =
      config::make_denoiser_config(exp.diffusion, dist, exp.train.seed);
  diffusion::DenoiserResult res = diffusion::train_denoiser(cfg);
  return DenoiserModel{std::move(res.denoiser), cfg.schedule, std::move(res.log)};
}

}  // namespace

PYBIND11_MODULE(_ganlab, m) {
  m.doc() = "Native core: adversarial and diffusion training on low-dimensional "
            "synthetic distributions, with divergence-based evaluation.";
  m.attr("__version__") = "0.1.0";

  py::class_<TrainedModel>(m, "TrainedModel",
                           "A completed adversarial training run. Holds the fitted "
                           "networks, so fresh samples can be drawn after training.")
      .def_property_readonly(
          "status", [](const TrainedModel& t) { return t.log.status; },
          "\"completed\" or \"diverged\".")
      .def_property_readonly(
          "wall_time_s", [](const TrainedModel& t) { return t.log.wall_time_s; })
      .def_property_readonly(
          "steps_completed", [](const TrainedModel& t) { return t.log.steps_completed; })
      .def_property_readonly(
          "config", [](const TrainedModel& t) { return t.canonical_config; },
          "Canonical echo of the resolved configuration.")
      .def_property_readonly(
          "records",
          [](const TrainedModel& t) {
            py::list out;
            for (const auto& r : t.log.records) out.append(record_to_dict(r));
            return out;
          },
          "One dict per evaluation snapshot (step, losses, divergences, coverage).")
      .def_property_readonly(
          "final_samples",
          [](const TrainedModel& t) { return numpy_from_tensor(t.log.final_samples); },
          "Generator draws taken at the last evaluation, shape (n, data_dim).")
      .def(
          "sample",
          [](const TrainedModel& t, int n, std::uint64_t seed) {
            Rng rng(seed);
            return numpy_from_tensor(trainers::generate_samples(t.bundle, n, rng));
          },
          py::arg("n"), py::arg("seed") = 0,
          "Draw n fresh generator outputs (eval-mode; labels/codes uniform "
          "where the model uses them).")
      .def(
          "sample_with_labels",
          [](const TrainedModel& t, const std::vector<int>& labels, std::uint64_t seed) {
            Rng rng(seed);
            return numpy_from_tensor(trainers::generate_with_labels(t.bundle, labels, rng));
          },
          py::arg("labels"), py::arg("seed") = 0,
          "Class-conditional draws, one row per requested label.")
      .def(
          "sample_with_codes",
          [](const TrainedModel& t, const std::vector<int>& codes, std::uint64_t seed) {
            Rng rng(seed);
            return numpy_from_tensor(trainers::generate_with_codes(t.bundle, codes, rng));
          },
          py::arg("codes"), py::arg("seed") = 0,
          "Code-conditional draws, one row per requested categorical code.");

  py::class_<DenoiserModel>(m, "DenoiserModel",
                            "A fitted denoising-diffusion model and its noise schedule.")
      .def_property_readonly(
          "status", [](const DenoiserModel& d) { return d.log.status; })
      .def_property_readonly(
          "wall_time_s", [](const DenoiserModel& d) { return d.log.wall_time_s; })
      .def_property_readonly(
          "losses",
          [](const DenoiserModel& d) {
            py::list out;
            for (const auto& [step, loss] : d.log.losses) out.append(py::make_tuple(step, loss));
            return out;
          },
          "(step, minibatch loss) pairs; the first entry is the at-initialization loss.")
      .def(
          "sample",
          [](const DenoiserModel& d, int n, std::uint64_t seed) {
            Rng rng(seed);
            py::gil_scoped_release release;
            return numpy_from_tensor(diffusion::reverse_sample(d.denoiser, d.schedule, n, rng));
          },
          py::arg("n"), py::arg("seed") = 0,
          "Ancestral draws from pure noise through the full reverse chain.");

  m.def("train", &run_training, py::arg("config_text"),
        py::call_guard<py::gil_scoped_release>(),
        "Run the full adversarial training loop described by the config text "
        "(same schema as the command-line tool) and return a TrainedModel.");

  m.def("train_denoiser", &run_denoiser_training, py::arg("config_text"),
        py::call_guard<py::gil_scoped_release>(),
        "Fit the denoising-diffusion baseline on the config's [data] source, "
        "using its [diffusion] settings, and return a DenoiserModel.");

  m.def(
      "sample_data",
      [](const std::string& config_text, int n, std::uint64_t seed) {
        const config::Experiment exp = config::parse_config(config_text);
        const auto& dist = distribution_of(exp.train.data, "sample_data");
        Rng rng(seed);
        return numpy_from_tensor(toydata::sample(dist, n, rng));
      },
      py::arg("config_text"), py::arg("n"), py::arg("seed") = 0,
      "Draw n rows from the config's [data] distribution.");

  m.def(
      "evaluate",
      [](const DoubleArray& samples, const std::string& config_text, int bins,
         std::uint64_t seed) {
        const config::Experiment exp = config::parse_config(config_text);
        const Tensor fake = tensor_from_numpy(samples);
        Rng rng(seed);
        const report::SampleFit fit = report::evaluate_samples(fake, exp.train.data, bins, rng);
        py::dict d;
        d["kl"] = fit.kl;
        d["js"] = fit.js;
        d["w1"] = fit.w1;
        d["modes_covered"] = fit.modes_covered;
        d["high_quality_fraction"] = fit.high_quality_fraction;
        return d;
      },
      py::arg("samples"), py::arg("config_text"), py::arg("bins") = 64, py::arg("seed") = 0,
      "Score a sample array against the config's [data] law: per-axis KL/JS, "
      "exact 1-D transport distance, and mode coverage.");

  m.def(
      "canonical_config",
      [](const std::string& config_text) {
        return config::print_config(config::parse_config(config_text));
      },
      py::arg("config_text"),
      "Parse config text and re-emit it in canonical form (every key, fixed "
      "order); a fixed point of itself.");

  m.def(
      "gradcheck_ops",
      [](int cases, std::uint64_t seed, double rtol) {
        return report_to_dict(gradcheck_ops(cases, seed, rtol));
      },
      py::arg("cases") = 100, py::arg("seed") = 0, py::arg("rtol") = 1e-5,
      "Check every primitive op's reverse-mode gradient against central "
      "finite differences on random in-domain inputs.");

  m.def(
      "gradcheck_losses",
      [](int cases, std::uint64_t seed, double rtol) {
        return report_to_dict(gradcheck_losses(cases, seed, rtol));
      },
      py::arg("cases") = 100, py::arg("seed") = 0, py::arg("rtol") = 1e-5,
      "Finite-difference check for every loss function, including the "
      "parameter derivative of the gradient penalty.");

  m.def(
      "w1_exact",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        return metrics::w1_exact(xs, ys);
      },
      py::arg("xs"), py::arg("ys"),
      "Exact 1-D Wasserstein-1 distance between two equal-weight empirical "
      "distributions (sorted-coupling form).");

  m.def(
      "histogram_kl",
      [](const std::vector<double>& xs, const std::vector<double>& ys, int bins, double lo,
         double hi) {
        return metrics::kl(metrics::histogram(xs, bins, lo, hi),
                           metrics::histogram(ys, bins, lo, hi));
      },
      py::arg("xs"), py::arg("ys"), py::arg("bins") = 64, py::arg("lo") = -4.0,
      py::arg("hi") = 4.0,
      "KL divergence between uniform-bin histograms of two 1-D samples.");

  m.def(
      "histogram_js",
      [](const std::vector<double>& xs, const std::vector<double>& ys, int bins, double lo,
         double hi) {
        return metrics::js(metrics::histogram(xs, bins, lo, hi),
                           metrics::histogram(ys, bins, lo, hi));
      },
      py::arg("xs"), py::arg("ys"), py::arg("bins") = 64, py::arg("lo") = -4.0,
      py::arg("hi") = 4.0,
      "Jensen-Shannon divergence (natural log, bounded by ln 2) between "
      "uniform-bin histograms of two 1-D samples.");
}
