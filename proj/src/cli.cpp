#include "ganlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ganlab/config.hpp"
#include "ganlab/diffusion.hpp"
#include "ganlab/gradcheck.hpp"
#include "ganlab/report.hpp"
#include "ganlab/sweep.hpp"
#include "ganlab/trainers.hpp"

namespace ganlab::cli {

namespace {

namespace fs = std::filesystem;
using config::format_double;

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void print_record_line(std::ostream& out, const metrics::MetricsRecord& r) {
  out << "step=" << r.step << " d_loss=" << format_double(r.d_loss)
      << " g_loss=" << format_double(r.g_loss) << " kl=" << format_double(r.kl)
      << " js=" << format_double(r.js) << " w1=" << format_double(r.w1)
      << " modes=" << r.modes_covered << " hq_frac=" << format_double(r.high_quality_fraction)
      << " d_acc=" << format_double(r.d_accuracy);
}

int fail_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

}  // namespace

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override, bool svg) {
  try {
    config::Experiment exp = config::load_config_file(config_path);
    if (seed_override) exp.train.seed = *seed_override;
    fs::create_directories(out_dir);
    trainers::TrainResult result = trainers::train(exp.train);
    exp.train = result.log.config;  // resolved echo
    report::write_text_file(join_path(out_dir, "config.toml"), config::print_config(exp));
    report::write_text_file(join_path(out_dir, "metrics.csv"),
                            report::metrics_csv(result.log.records));
    report::write_text_file(join_path(out_dir, "samples.csv"),
                            report::samples_csv(result.log.final_samples));
    report::write_text_file(join_path(out_dir, "runlog.json"),
                            report::runlog_json(exp, result.log));
    if (svg && result.log.final_samples.all_finite()) {
      report::write_text_file(
          join_path(out_dir, "histogram.svg"),
          report::histogram_svg(result.log.final_samples, exp.train.data, exp.train.eval_bins));
    }
    std::cout << "status=" << result.log.status << " algorithm="
              << models::algorithm_name(exp.train.algorithm) << " seed=" << exp.train.seed
              << " steps=" << result.log.steps_completed
              << " wall_time_s=" << format_double(result.log.wall_time_s) << "\n";
    std::cout << "final: ";
    print_record_line(std::cout, result.log.records.back());
    std::cout << "\nwrote " << out_dir << "/{config.toml, metrics.csv, samples.csv, runlog.json"
              << (svg ? ", histogram.svg" : "") << "}\n";
    return 0;
  } catch (const std::exception& err) {
    return fail_usage(err.what());
  }
}

int cmd_eval(const std::string& runlog_path) {
  try {
    const nlohmann::json j = nlohmann::json::parse(report::read_text_file(runlog_path));
    auto num = [](const nlohmann::json& v) {
      return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    std::cout << "status: " << j.at("status").get<std::string>() << "\n";
    std::cout << "algorithm: " << j.at("algorithm").get<std::string>()
              << "  seed: " << j.at("seed").get<std::uint64_t>() << "\n";
    std::cout << "steps_completed: " << j.at("steps_completed").get<long>()
              << "  g_updates: " << j.at("g_updates").get<long>()
              << "  d_updates: " << j.at("d_updates").get<long>()
              << "  wall_time_s: " << format_double(num(j.at("wall_time_s"))) << "\n";
    std::cout << "evaluations: " << j.at("records").size() << "\n";
    const nlohmann::json& f = j.at("final");
    metrics::MetricsRecord r;
    r.step = f.at("step").get<long>();
    r.d_loss = num(f.at("d_loss"));
    r.g_loss = num(f.at("g_loss"));
    r.kl = num(f.at("kl"));
    r.js = num(f.at("js"));
    r.w1 = num(f.at("w1"));
    r.modes_covered = f.at("modes_covered").get<int>();
    r.high_quality_fraction = num(f.at("hq_frac"));
    r.d_accuracy = num(f.at("d_acc"));
    std::cout << "final: ";
    print_record_line(std::cout, r);
    std::cout << "\n";
    return 0;
  } catch (const std::exception& err) {
    return fail_usage(std::string("cannot read runlog: ") + err.what());
  }
}

int cmd_sweep(const std::string& sweep_path, const std::string& out_dir, int parallelism) {
  try {
    const sweep::SweepSpec spec = sweep::load_sweep_file(sweep_path);
    fs::create_directories(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = sweep::run_sweep(spec, parallelism, [&](const sweep::SweepRow& row) {
      std::cout << "run " << row.index << " seed=" << row.seed << " status=" << row.status
                << " js=" << format_double(row.final_record.js)
                << " modes=" << row.final_record.modes_covered << "\n";
    });
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report::write_text_file(join_path(out_dir, "index.csv"), sweep::index_csv(spec, rows));
    int diverged = 0;
    for (const auto& row : rows) diverged += (row.status != "completed");
    std::cout << rows.size() << " runs (" << diverged << " diverged) in "
              << format_double(secs) << "s; wrote " << out_dir << "/index.csv\n";
    return 0;
  } catch (const std::exception& err) {
    return fail_usage(err.what());
  }
}

int cmd_gradcheck(int cases_per_op, std::uint64_t seed) {
  bool all_pass = true;
  auto show = [&](const GradCheckReport& rep, const char* what) {
    for (const auto& c : rep.cases) {
      std::cout << (c.pass ? "PASS" : "FAIL") << " " << what << " " << c.name
                << " (cases=" << c.cases << ", worst_err=" << format_double(c.worst_err) << ")\n";
    }
    all_pass = all_pass && rep.all_pass;
  };
  show(gradcheck_ops(cases_per_op, seed), "op");
  show(gradcheck_losses(cases_per_op, seed + 1), "loss");
  double worst = 0.0;
  const bool dd = gradcheck_double_backprop(seed + 2, 1e-4, 1e-8, &worst);
  std::cout << (dd ? "PASS" : "FAIL")
            << " gradient-of-gradient (worst_err=" << format_double(worst) << ")\n";
  all_pass = all_pass && dd;
  std::cout << (all_pass ? "all gradient checks passed" : "GRADIENT CHECKS FAILED") << "\n";
  return all_pass ? 0 : 1;
}

namespace {

config::Experiment default_compare_experiment() {
  config::Experiment e;
  e.train.algorithm = models::Algorithm::vanilla;
  e.train.data = toydata::DistributionSpec(toydata::Gaussian1D{});
  e.train.steps = 2000;
  e.train.batch = 64;
  e.train.dims.z_dim = 8;
  e.train.dims.hidden = {32, 32};
  e.train.eval_every = 500;
  e.train.eval_samples = 2000;
  e.train.eval_bins = 64;
  e.train.seed = 1;
  e.diffusion.schedule = "constant";
  e.diffusion.beta = 0.02;
  e.diffusion.timesteps = 300;
  e.diffusion.steps = 2000;
  e.diffusion.batch = 64;
  e.diffusion.hidden = {64, 64};
  e.diffusion.lr = 1e-3;
  return e;
}

struct MethodSummary {
  double js_sum = 0.0, w1_sum = 0.0, modes_sum = 0.0, hq_sum = 0.0;
  double wall_time_s = 0.0;
  int completed = 0;
  int diverged = 0;

  void add(double js, double w1, int modes, double hq) {
    js_sum += js;
    w1_sum += w1;
    modes_sum += modes;
    hq_sum += hq;
    ++completed;
  }
  double mean(double sum) const {
    return completed > 0 ? sum / completed : std::numeric_limits<double>::quiet_NaN();
  }
  std::string csv_row(const std::string& method) const {
    std::ostringstream out;
    out << method << ',' << format_double(mean(js_sum)) << ',' << format_double(mean(w1_sum))
        << ',' << format_double(mean(modes_sum)) << ',' << format_double(wall_time_s) << ','
        << diverged << "\n";
    return out.str();
  }
};

}  // namespace

int cmd_compare(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed_override) {
  try {
    config::Experiment exp =
        config_path.empty() ? default_compare_experiment() : config::load_config_file(config_path);
    if (seed_override) exp.train.seed = *seed_override;
    const auto* dist = std::get_if<toydata::DistributionSpec>(&exp.train.data);
    if (!dist)
      return fail_usage("compare needs a plain sampled distribution (not paired/two_domain)");
    fs::create_directories(out_dir);

    std::vector<std::uint64_t> seeds = {exp.train.seed, exp.train.seed + 1, exp.train.seed + 2};
    MethodSummary gan, ddpm;

    for (std::uint64_t s : seeds) {
      trainers::TrainConfig cfg = exp.train;
      cfg.seed = s;
      trainers::TrainResult result = trainers::train(cfg);
      gan.wall_time_s += result.log.wall_time_s;
      if (result.log.status == "completed") {
        const auto& r = result.log.records.back();
        gan.add(r.js, r.w1, r.modes_covered, r.high_quality_fraction);
      } else {
        ++gan.diverged;
      }
      std::cout << "adversarial seed=" << s << " status=" << result.log.status << "\n";
    }

    for (std::uint64_t s : seeds) {
      const auto t0 = std::chrono::steady_clock::now();
      diffusion::DenoiserConfig dcfg = config::make_denoiser_config(exp.diffusion, *dist, s);
      diffusion::DenoiserResult dres = diffusion::train_denoiser(dcfg);
      bool ok = (dres.log.status == "completed");
      if (ok) {
        Rng sample_rng = Rng(s).split(501);
        Rng eval_rng = Rng(s).split(502);
        const Tensor samples = diffusion::reverse_sample(dres.denoiser, dcfg.schedule,
                                                         exp.train.eval_samples, sample_rng);
        ok = samples.all_finite();
        if (ok) {
          const report::SampleFit fit =
              report::evaluate_samples(samples, exp.train.data, exp.train.eval_bins, eval_rng);
          ddpm.add(fit.js, fit.w1, fit.modes_covered, fit.high_quality_fraction);
        }
      }
      if (!ok) ++ddpm.diverged;
      ddpm.wall_time_s +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << "diffusion seed=" << s << " status=" << (ok ? "completed" : "diverged") << "\n";
    }

    std::string csv = "method,js,w1,modes_covered,wall_time_s,diverged\n";
    csv += gan.csv_row("adversarial");
    csv += ddpm.csv_row("diffusion");
    report::write_text_file(join_path(out_dir, "compare.csv"), csv);
    std::cout << "\n" << csv << "wrote " << out_dir << "/compare.csv\n";
    return 0;
  } catch (const std::exception& err) {
    return fail_usage(err.what());
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"adversarial training laboratory for low-dimensional toy distributions"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", runlog_path, svg_mode = "on";
  std::uint64_t seed_value = 0;
  int parallel = 1, cases = 100;
  std::uint64_t gradcheck_seed = 20240801ULL;

  CLI::App* train = app.add_subcommand("train", "train one configured run");
  train->add_option("--config", config_path, "experiment config file")->required();
  train->add_option("--out", out_dir, "output directory (default: out)");
  CLI::Option* train_seed = train->add_option("--seed", seed_value, "override the config seed");
  train->add_option("--svg", svg_mode, "write histogram.svg (on/off, default on)")
      ->check(CLI::IsMember({"on", "off"}));

  CLI::App* eval = app.add_subcommand("eval", "print the summary stored in a runlog.json");
  eval->add_option("runlog", runlog_path, "path to runlog.json")->required();

  CLI::App* sw = app.add_subcommand("sweep", "run a config grid and write index.csv");
  sw->add_option("--config", config_path, "sweep file")->required();
  sw->add_option("--out", out_dir, "output directory (default: out)");
  sw->add_option("--parallel", parallel, "worker count (default 1)")
      ->check(CLI::PositiveNumber);

  CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference audit of every gradient");
  gc->add_option("--cases", cases, "random cases per op (default 100)")
      ->check(CLI::PositiveNumber);
  gc->add_option("--seed", gradcheck_seed, "random seed for the audit");

  CLI::App* cmp = app.add_subcommand(
      "compare", "train matched adversarial and diffusion runs, write compare.csv");
  cmp->add_option("--config", config_path, "experiment config file (optional)");
  cmp->add_option("--out", out_dir, "output directory (default: out)");
  CLI::Option* cmp_seed = cmp->add_option("--seed", seed_value, "base seed for both methods");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (train->parsed()) {
    std::optional<std::uint64_t> seed;
    if (train_seed->count() > 0) seed = seed_value;
    return cmd_train(config_path, out_dir, seed, svg_mode == "on");
  }
  if (eval->parsed()) return cmd_eval(runlog_path);
  if (sw->parsed()) return cmd_sweep(config_path, out_dir, parallel);
  if (gc->parsed()) return cmd_gradcheck(cases, gradcheck_seed);
  if (cmp->parsed()) {
    std::optional<std::uint64_t> seed;
    if (cmp_seed->count() > 0) seed = seed_value;
    return cmd_compare(config_path, out_dir, seed);
  }
  return 1;
}

}  // namespace ganlab::cli
