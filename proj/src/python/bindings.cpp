#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kneecast/cli.hpp"
#include "kneecast/data/synth.hpp"
#include "kneecast/error.hpp"
#include "kneecast/io/checkpoint.hpp"
#include "kneecast/io/run_config.hpp"
#include "kneecast/metrics/metrics.hpp"
#include "kneecast/model/model.hpp"
#include "kneecast/signal/butterworth.hpp"
#include "kneecast/signal/preprocess.hpp"

namespace py = pybind11;
using namespace kneecast;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

signal::ChannelKind parse_kind(const std::string& k) {
  if (k == "emg") return signal::ChannelKind::emg;
  if (k == "kinematic") return signal::ChannelKind::kinematic;
  if (k == "force") return signal::ChannelKind::force;
  throw ConfigError("unknown channel kind '" + k + "' (emg, kinematic or force)");
}

py::dict report_dict(const metrics::MetricsReport& r) {
  py::dict d;
  d["nmae"] = r.nmae;
  d["nrmse"] = r.nrmse;
  d["r2"] = r.r2;
  d["range_deg"] = r.normalization_range_deg;
  py::list steps;
  for (const auto& s : r.per_step) steps.append(py::make_tuple(s.nmae, s.nrmse, s.r2));
  d["per_step"] = steps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "kneecast: EMG-driven knee-angle forecasting";

  py::register_exception<Error>(m, "Error");

  m.def(
      "synthesize",
      [](int cycles, std::uint64_t seed, const std::string& condition, bool forces, double period) {
        data::SynthSpec s;
        s.n_cycles = cycles;
        s.seed = seed;
        s.condition = data::parse_condition(condition);
        s.include_forces = forces;
        s.cycle_period_s = period;
        const auto rec = data::synthesize_subject(s);
        py::dict d;
        d["time_ms"] = to_array(rec.time_ms);
        d["knee_angle_deg"] = to_array(rec.knee_angle_deg);
        py::list emg;
        for (const auto& ch : rec.emg) emg.append(to_array(ch));
        d["emg"] = emg;
        if (rec.has_forces()) {
          d["force_thigh_n"] = to_array(*rec.force_thigh_n);
          d["force_shank_n"] = to_array(*rec.force_shank_n);
        }
        return d;
      },
      py::arg("cycles") = 40, py::arg("seed") = 0, py::arg("condition") = "normal", py::arg("forces") = false,
      py::arg("period") = 1.2, "Seeded synthetic gait recording as numpy arrays.");

  m.def(
      "preprocess_window",
      [](const std::vector<Array>& raw, const std::vector<std::string>& kinds) {
        std::vector<std::vector<double>> channels;
        for (const auto& a : raw) channels.push_back(to_vector(a));
        std::vector<signal::ChannelKind> k;
        for (const auto& s : kinds) k.push_back(parse_kind(s));
        const auto w = signal::preprocess_window(channels, k, {});
        py::dict d;
        py::list emg, forces;
        for (const auto& ch : w.emg) emg.append(to_array(ch));
        for (const auto& ch : w.forces) forces.append(to_array(ch));
        d["emg"] = emg;
        d["forces"] = forces;
        d["kinematic"] = to_array(w.kinematic);
        return d;
      },
      py::arg("raw"), py::arg("kinds"), "Condition, standardize and decimate one 2000-sample window.");

  m.def(
      "butterworth_gain",
      [](const std::string& kind, int order, double cutoff_hz, double fs_hz, double freq_hz) {
        const auto k = kind == "low" ? signal::FilterKind::low_pass : signal::FilterKind::high_pass;
        if (kind != "low" && kind != "high") throw ConfigError("filter kind must be 'low' or 'high'");
        return signal::design_butterworth({k, order, cutoff_hz, fs_hz}).gain(freq_hz, fs_hz);
      },
      py::arg("kind"), py::arg("order"), py::arg("cutoff_hz"), py::arg("fs_hz"), py::arg("freq_hz"));

  m.def(
      "parameter_count",
      [](const std::string& scenario, int horizon) {
        model::ModelHyper h;
        h.horizon = horizon;
        const auto c = model::count_parameters(model::build_model(parse_scenario(scenario), h, 0));
        py::dict d;
        d["total"] = c.total;
        for (auto g : model::kGroups) d[py::str(std::string(model::to_string(g)))] = c.group(g);
        return d;
      },
      py::arg("scenario"), py::arg("horizon") = 1, "Parameter totals of the default-size model.");

  m.def(
      "evaluate_metrics",
      [](const Array& pred, const Array& truth) {
        if (pred.ndim() != 2 || truth.ndim() != 2) throw DataError("pred and truth must be 2-D (N x H)", "shape");
        if (pred.shape(0) != truth.shape(0) || pred.shape(1) != truth.shape(1)) {
          throw DataError("pred and truth shapes differ", "shape");
        }
        return report_dict(metrics::evaluate_metrics(to_vector(pred), to_vector(truth),
                                                      static_cast<std::size_t>(truth.shape(0)),
                                                      static_cast<std::size_t>(truth.shape(1))));
      },
      py::arg("pred"), py::arg("truth"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a kneecast subcommand in-process; returns (exit code, stdout, stderr).");

  m.def("run_config_schema", [] { return std::string(io::run_config_schema()); });
  m.def(
      "schema_violations",
      [](const std::string& document) { return io::schema_violations(document, io::run_config_schema()); },
      py::arg("document"), "Violations of the run-config schema, as 'path: message' strings.");
  m.def(
      "checkpoint_tensors",
      [](const std::string& path) {
        const auto model = io::load_checkpoint(path);
        py::dict d;
        for (const auto& p : model.params) d[py::str(p.name)] = to_array(p.tensor.values);
        return d;
      },
      py::arg("path"), "Flat tensor values of a checkpoint, keyed by name.");
}
