#include "ganlab/sweep.hpp"

#include "ganlab/report.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

namespace ganlab::sweep {

namespace {

using config::ConfigError;
using config::ConfigValue;

std::string value_text(const ConfigValue& v) {
  switch (v.type) {
    case ConfigValue::Type::integer: return std::to_string(v.int_value);
    case ConfigValue::Type::real: return config::format_double(v.real_value);
    case ConfigValue::Type::boolean: return v.bool_value ? "true" : "false";
    case ConfigValue::Type::string: return v.string_value;
    case ConfigValue::Type::array: break;
  }
  throw ConfigError("sweep axis values must be scalars");
}

}  // namespace

SweepSpec parse_sweep(const std::string& text) {
  config::ConfigDoc doc = config::parse_document(text);
  SweepSpec spec;

  auto sweep_it = doc.find("sweep");
  if (sweep_it == doc.end()) throw ConfigError("sweep file needs a [sweep] section with seeds");
  for (const auto& [key, value] : sweep_it->second) {
    if (key != "seeds") throw ConfigError("unknown key '" + key + "' in [sweep]");
    if (value.type != ConfigValue::Type::array)
      throw ConfigError("key 'seeds' in [sweep] expects an array of integers");
    for (const ConfigValue& e : value.items) {
      if (e.type != ConfigValue::Type::integer || e.int_value < 0)
        throw ConfigError("key 'seeds' in [sweep] expects non-negative integers");
      spec.seeds.push_back(static_cast<std::uint64_t>(e.int_value));
    }
  }
  if (spec.seeds.empty()) throw ConfigError("[sweep] seeds list is empty");
  doc.erase(sweep_it);

  auto axes_it = doc.find("axes");
  if (axes_it != doc.end()) {
    for (const auto& [path, value] : axes_it->second) {
      auto dot = path.find('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
        throw ConfigError("axis key '" + path + "' must look like section.key");
      if (value.type != ConfigValue::Type::array || value.items.empty())
        throw ConfigError("axis '" + path + "' expects a non-empty array of values");
      AxisSpec axis;
      axis.section = path.substr(0, dot);
      axis.key = path.substr(dot + 1);
      if (axis.key.find('.') != std::string::npos)
        throw ConfigError("axis key '" + path + "' must name exactly one section and key");
      axis.values = value.items;
      spec.axes.push_back(std::move(axis));
    }
    doc.erase(axes_it);
  }
  std::sort(spec.axes.begin(), spec.axes.end(),
            [](const AxisSpec& a, const AxisSpec& b) { return a.path() < b.path(); });

  spec.base = std::move(doc);
  // Fail fast on a broken base or axes before any training starts.
  enumerate_cells(spec);
  return spec;
}

SweepSpec load_sweep_file(const std::string& path) {
  return parse_sweep(report::read_text_file(path));
}

std::vector<SweepCell> enumerate_cells(const SweepSpec& spec) {
  std::vector<SweepCell> cells;
  std::vector<int> choice(spec.axes.size(), 0);
  int index = 0;
  // Odometer over the sorted axes, last axis fastest, seeds innermost.
  while (true) {
    for (std::uint64_t seed : spec.seeds) {
      config::ConfigDoc doc = spec.base;
      for (std::size_t a = 0; a < spec.axes.size(); ++a) {
        const AxisSpec& axis = spec.axes[a];
        doc[axis.section][axis.key] = axis.values[static_cast<std::size_t>(choice[a])];
      }
      ConfigValue seed_value;
      seed_value.type = ConfigValue::Type::integer;
      seed_value.int_value = static_cast<long long>(seed);
      doc["experiment"]["seed"] = seed_value;
      SweepCell cell;
      cell.index = index++;
      cell.choice = choice;
      cell.seed = seed;
      try {
        cell.experiment = config::build_experiment(doc);
      } catch (const std::exception& err) {
        std::ostringstream msg;
        msg << "sweep cell " << cell.index << " (";
        for (std::size_t a = 0; a < spec.axes.size(); ++a)
          msg << (a ? ", " : "") << spec.axes[a].path() << "="
              << value_text(spec.axes[a].values[static_cast<std::size_t>(choice[a])]);
        msg << (spec.axes.empty() ? "" : ", ") << "seed=" << seed << "): " << err.what();
        throw ConfigError(msg.str());
      }
      cells.push_back(std::move(cell));
    }
    // Advance the odometer; most-significant axis first in sorted order.
    std::size_t a = spec.axes.size();
    while (a > 0) {
      --a;
      if (++choice[a] < static_cast<int>(spec.axes[a].values.size())) break;
      choice[a] = 0;
      if (a == 0) return cells;
    }
    if (spec.axes.empty()) return cells;
  }
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int parallelism,
                                const std::function<void(const SweepRow&)>& on_done) {
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  const std::vector<SweepCell> cells = enumerate_cells(spec);
  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const SweepCell& cell = cells[i];
      trainers::TrainResult result = trainers::train(cell.experiment.train);
      SweepRow row;
      row.index = cell.index;
      row.choice = cell.choice;
      row.seed = cell.seed;
      row.status = result.log.status;
      row.wall_time_s = result.log.wall_time_s;
      row.final_record = result.log.records.back();
      {
        std::lock_guard<std::mutex> lock(done_mutex);
        rows[i] = row;
        if (on_done) on_done(row);
      }
    }
  };

  const int n_workers = std::min<int>(parallelism, static_cast<int>(cells.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string index_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "run";
  for (const AxisSpec& axis : spec.axes) out << ',' << axis.path();
  out << ",seed,status,wall_time_s,step,d_loss,g_loss,kl,js,w1,modes_covered,hq_frac,d_acc\n";
  for (const SweepRow& row : rows) {
    out << row.index;
    for (std::size_t a = 0; a < spec.axes.size(); ++a)
      out << ',' << value_text(spec.axes[a].values[static_cast<std::size_t>(row.choice[a])]);
    const metrics::MetricsRecord& r = row.final_record;
    out << ',' << row.seed << ',' << row.status << ',' << config::format_double(row.wall_time_s)
        << ',' << r.step << ',' << config::format_double(r.d_loss) << ','
        << config::format_double(r.g_loss) << ',' << config::format_double(r.kl) << ','
        << config::format_double(r.js) << ',' << config::format_double(r.w1) << ','
        << r.modes_covered << ',' << config::format_double(r.high_quality_fraction) << ','
        << config::format_double(r.d_accuracy) << "\n";
  }
  return out.str();
}

}  // namespace ganlab::sweep
