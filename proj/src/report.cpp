#include "ganlab/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <json.hpp>

namespace ganlab::report {

namespace {

using config::format_double;

std::vector<double> column(const Tensor& t, int c) {
  std::vector<double> v(static_cast<std::size_t>(t.rows()));
  for (int r = 0; r < t.rows(); ++r) v[static_cast<std::size_t>(r)] = t.at(r, c);
  return v;
}

// Noisy rotated pairs have y ~ N(0, 1 + 0.0025) per axis exactly (the
// rotation is orthogonal and the additive noise is independent).
constexpr double kPairedStddev2 = 1.0025;

struct ModeTarget {
  Tensor centers;
  double stddev = 1.0;
};

ModeTarget mode_target(const trainers::DataSpec& data) {
  if (std::holds_alternative<trainers::PairedData>(data)) {
    const double s = std::sqrt(kPairedStddev2);
    return {Tensor(1, 2), s};
  }
  if (std::holds_alternative<trainers::TwoDomainData>(data)) {
    const auto b = toydata::two_domain_b();
    return {toydata::mode_centers(b), toydata::mode_stddev(b)};
  }
  const auto& dist = std::get<toydata::DistributionSpec>(data);
  return {toydata::mode_centers(dist), toydata::mode_stddev(dist)};
}

Tensor reference_sample(const trainers::DataSpec& data, int n, Rng& rng) {
  if (std::holds_alternative<trainers::PairedData>(data))
    return toydata::sample_paired(n, rng).y;
  if (std::holds_alternative<trainers::TwoDomainData>(data))
    return toydata::sample_two_domain(n, rng).b;
  return toydata::sample(std::get<toydata::DistributionSpec>(data), n, rng);
}

}  // namespace

std::vector<AxisTarget> axis_targets(const trainers::DataSpec& data) {
  if (std::holds_alternative<trainers::PairedData>(data)) {
    const double s = std::sqrt(kPairedStddev2);
    AxisTarget t{toydata::GaussMix1D{{0.0}, s}, -4.8 * s, 4.8 * s};
    return {t, t};
  }
  if (std::holds_alternative<trainers::TwoDomainData>(data)) {
    const auto b = toydata::two_domain_b();
    auto [lo, hi] = toydata::default_hist_range(b);
    std::vector<AxisTarget> out;
    for (int axis = 0; axis < toydata::dim(b); ++axis)
      out.push_back({toydata::axis_marginal(b, axis), lo, hi});
    return out;
  }
  const auto& dist = std::get<toydata::DistributionSpec>(data);
  auto [lo, hi] = toydata::default_hist_range(dist);
  std::vector<AxisTarget> out;
  for (int axis = 0; axis < toydata::dim(dist); ++axis)
    out.push_back({toydata::axis_marginal(dist, axis), lo, hi});
  return out;
}

SampleFit evaluate_samples(const Tensor& fake, const trainers::DataSpec& data, int bins,
                           Rng& rng) {
  const auto targets = axis_targets(data);
  if (fake.cols() != static_cast<int>(targets.size()))
    throw std::invalid_argument("evaluate_samples: sample width does not match the data");
  const Tensor real = reference_sample(data, fake.rows(), rng);
  SampleFit fit;
  for (std::size_t axis = 0; axis < targets.size(); ++axis) {
    const AxisTarget& t = targets[axis];
    const auto fake_col = column(fake, static_cast<int>(axis));
    const auto hist = metrics::histogram(fake_col, bins, t.lo, t.hi);
    const auto target =
        metrics::histogram_from_probs(toydata::bin_probs(t.marginal, bins, t.lo, t.hi), t.lo, t.hi);
    fit.kl += metrics::kl(hist, target);
    fit.js += metrics::js(hist, target);
    fit.w1 += metrics::w1_exact(fake_col, column(real, static_cast<int>(axis)));
  }
  const double n_axes = static_cast<double>(targets.size());
  fit.kl /= n_axes;
  fit.js /= n_axes;
  fit.w1 /= n_axes;
  const ModeTarget mt = mode_target(data);
  const auto ms = metrics::mode_stats(fake, mt.centers, mt.stddev);
  fit.modes_covered = ms.modes_covered;
  fit.high_quality_fraction = ms.high_quality_fraction;
  return fit;
}

std::string metrics_csv(const std::vector<metrics::MetricsRecord>& records) {
  std::ostringstream out;
  out << "step,d_loss,g_loss,kl,js,w1,modes_covered,hq_frac,d_acc\n";
  for (const auto& r : records) {
    out << r.step << ',' << format_double(r.d_loss) << ',' << format_double(r.g_loss) << ','
        << format_double(r.kl) << ',' << format_double(r.js) << ',' << format_double(r.w1) << ','
        << r.modes_covered << ',' << format_double(r.high_quality_fraction) << ','
        << format_double(r.d_accuracy) << "\n";
  }
  return out.str();
}

std::string samples_csv(const Tensor& samples) {
  std::ostringstream out;
  for (int c = 0; c < samples.cols(); ++c) out << (c ? "," : "") << "x" << c;
  out << "\n";
  for (int r = 0; r < samples.rows(); ++r) {
    for (int c = 0; c < samples.cols(); ++c)
      out << (c ? "," : "") << format_double(samples.at(r, c));
    out << "\n";
  }
  return out.str();
}

std::string runlog_json(const config::Experiment& exp, const trainers::RunLog& log) {
  nlohmann::json j;
  j["status"] = log.status;
  j["algorithm"] = models::algorithm_name(log.config.algorithm);
  j["seed"] = log.config.seed;
  j["steps_completed"] = log.steps_completed;
  j["g_updates"] = log.g_updates;
  j["d_updates"] = log.d_updates;
  j["wall_time_s"] = log.wall_time_s;
  j["config"] = config::print_config(exp);
  auto record_json = [](const metrics::MetricsRecord& r) {
    nlohmann::json o;
    o["step"] = r.step;
    o["d_loss"] = r.d_loss;
    o["g_loss"] = r.g_loss;
    o["kl"] = r.kl;
    o["js"] = r.js;
    o["w1"] = r.w1;
    o["modes_covered"] = r.modes_covered;
    o["hq_frac"] = r.high_quality_fraction;
    o["d_acc"] = r.d_accuracy;
    return o;
  };
  j["records"] = nlohmann::json::array();
  for (const auto& r : log.records) j["records"].push_back(record_json(r));
  if (!log.records.empty()) j["final"] = record_json(log.records.back());
  return j.dump(2) + "\n";
}

namespace {

void svg_panel(std::ostringstream& out, int axis, double y_top, double panel_w, double panel_h,
               const metrics::Histogram& hist, const std::vector<double>& target) {
  const double margin_l = 46.0, margin_r = 14.0, margin_t = 26.0, margin_b = 26.0;
  const double plot_w = panel_w - margin_l - margin_r;
  const double plot_h = panel_h - margin_t - margin_b;
  double y_max = 1e-12;
  for (double p : hist.probs) y_max = std::max(y_max, p);
  for (double p : target) y_max = std::max(y_max, p);
  y_max *= 1.08;
  const double x0 = margin_l, y_base = y_top + margin_t + plot_h;
  const double bw = plot_w / static_cast<double>(hist.bins);

  out << "<text x=\"" << format_double(x0) << "\" y=\"" << format_double(y_top + 16)
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">axis " << axis
      << " &#8212; generated share (bars) vs target mass (line)</text>\n";
  for (int i = 0; i < hist.bins; ++i) {
    const double h = plot_h * hist.probs[static_cast<std::size_t>(i)] / y_max;
    if (h <= 0.0) continue;
    out << "<rect x=\"" << format_double(x0 + i * bw) << "\" y=\"" << format_double(y_base - h)
        << "\" width=\"" << format_double(bw) << "\" height=\"" << format_double(h)
        << "\" fill=\"#4a90d9\" fill-opacity=\"0.75\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.8\" points=\"";
  for (int i = 0; i < hist.bins; ++i) {
    const double px = x0 + (i + 0.5) * bw;
    const double py = y_base - plot_h * target[static_cast<std::size_t>(i)] / y_max;
    out << (i ? " " : "") << format_double(px) << ',' << format_double(py);
  }
  out << "\"/>\n";
  out << "<line x1=\"" << format_double(x0) << "\" y1=\"" << format_double(y_base) << "\" x2=\""
      << format_double(x0 + plot_w) << "\" y2=\"" << format_double(y_base)
      << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << format_double(x0) << "\" y=\"" << format_double(y_base + 16)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">" << format_double(hist.lo)
      << "</text>\n";
  out << "<text x=\"" << format_double(x0 + plot_w) << "\" y=\"" << format_double(y_base + 16)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">"
      << format_double(hist.hi) << "</text>\n";
}

}  // namespace

std::string histogram_svg(const Tensor& samples, const trainers::DataSpec& data, int bins) {
  const auto targets = axis_targets(data);
  const double panel_w = 640.0, panel_h = 230.0;
  const double total_h = panel_h * static_cast<double>(targets.size());
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(panel_w)
      << "\" height=\"" << format_double(total_h) << "\" viewBox=\"0 0 " << format_double(panel_w)
      << ' ' << format_double(total_h) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t axis = 0; axis < targets.size(); ++axis) {
    const AxisTarget& t = targets[axis];
    const auto hist = metrics::histogram(column(samples, static_cast<int>(axis)), bins, t.lo, t.hi);
    const auto target = toydata::bin_probs(t.marginal, bins, t.lo, t.hi);
    svg_panel(out, static_cast<int>(axis), panel_h * static_cast<double>(axis), panel_w, panel_h,
              hist, target);
  }
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace ganlab::report
