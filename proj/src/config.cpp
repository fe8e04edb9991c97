#include "ganlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

namespace ganlab::config {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool bare_key_ok(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
      return false;
  }
  return true;
}

// Strips a trailing comment; '#' inside a quoted string does not count.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;  // skip the escaped character
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string parse_quoted(const std::string& s, int line, std::size_t* end) {
  std::string out;
  std::size_t i = 1;  // past the opening quote
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\\') {
      if (i + 1 >= s.size()) fail("line " + std::to_string(line) + ": dangling escape in string");
      char n = s[++i];
      switch (n) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: fail("line " + std::to_string(line) + ": unsupported escape '\\" + n + "'");
      }
    } else if (c == '"') {
      *end = i + 1;
      return out;
    } else {
      out.push_back(c);
    }
  }
  fail("line " + std::to_string(line) + ": unterminated string");
}

ConfigValue parse_scalar(const std::string& raw, int line) {
  ConfigValue v;
  v.line = line;
  const std::string s = trim(raw);
  if (s.empty()) fail("line " + std::to_string(line) + ": missing value");
  if (s.front() == '"') {
    std::size_t end = 0;
    v.string_value = parse_quoted(s, line, &end);
    if (trim(s.substr(end)) != "")
      fail("line " + std::to_string(line) + ": trailing text after string value");
    v.type = ConfigValue::Type::string;
    return v;
  }
  if (s == "true" || s == "false") {
    v.type = ConfigValue::Type::boolean;
    v.bool_value = (s == "true");
    return v;
  }
  // Integer: an optional sign and digits only.
  bool integer = !s.empty();
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (i == 0 && (c == '+' || c == '-')) continue;
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      integer = false;
      break;
    }
  }
  if (integer && s != "+" && s != "-") {
    errno = 0;
    char* endp = nullptr;
    long long n = std::strtoll(s.c_str(), &endp, 10);
    if (errno != 0 || endp != s.c_str() + s.size())
      fail("line " + std::to_string(line) + ": integer out of range: '" + s + "'");
    v.type = ConfigValue::Type::integer;
    v.int_value = n;
    return v;
  }
  // Float, accepting the forms the canonical printer emits (and inf/nan).
  char* endp = nullptr;
  double d = std::strtod(s.c_str(), &endp);
  if (endp == s.c_str() + s.size() && endp != s.c_str()) {
    v.type = ConfigValue::Type::real;
    v.real_value = d;
    return v;
  }
  fail("line " + std::to_string(line) + ": cannot parse value '" + s + "'");
}

ConfigValue parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']')
      fail("line " + std::to_string(line) + ": array must open and close on one line");
    ConfigValue v;
    v.line = line;
    v.type = ConfigValue::Type::array;
    const std::string body = s.substr(1, s.size() - 2);
    // Split on top-level commas; strings may contain commas.
    std::string cur;
    bool in_string = false;
    auto flush = [&] {
      if (trim(cur).empty())
        fail("line " + std::to_string(line) + ": empty array element");
      v.items.push_back(parse_scalar(cur, line));
      cur.clear();
    };
    for (std::size_t i = 0; i < body.size(); ++i) {
      char c = body[i];
      if (in_string) {
        cur.push_back(c);
        if (c == '\\' && i + 1 < body.size()) cur.push_back(body[++i]);
        else if (c == '"') in_string = false;
      } else if (c == '"') {
        cur.push_back(c);
        in_string = true;
      } else if (c == ',') {
        flush();
      } else {
        cur.push_back(c);
      }
    }
    if (!trim(cur).empty()) flush();
    return v;
  }
  return parse_scalar(s, line);
}

const char* type_name(ConfigValue::Type t) {
  switch (t) {
    case ConfigValue::Type::integer: return "integer";
    case ConfigValue::Type::real: return "float";
    case ConfigValue::Type::boolean: return "boolean";
    case ConfigValue::Type::string: return "string";
    case ConfigValue::Type::array: return "array";
  }
  return "?";
}

// Reads one section's keys with type checking; tracks which keys were
// consumed so leftovers can be rejected by name.
class SectionReader {
 public:
  SectionReader(const ConfigDoc& doc, std::string section) : section_(std::move(section)) {
    auto it = doc.find(section_);
    if (it != doc.end()) table_ = &it->second;
  }

  bool has(const std::string& key) const { return table_ && table_->count(key) > 0; }

  const ConfigValue* take(const std::string& key) {
    if (!table_) return nullptr;
    auto it = table_->find(key);
    if (it == table_->end()) return nullptr;
    seen_.insert(key);
    return &it->second;
  }

  void get_int(const std::string& key, int* out) {
    long long v = 0;
    bool present = false;
    get_long(key, &v, &present);
    if (!present) return;
    if (v < INT_MIN_ || v > INT_MAX_) type_error(key, "integer in int range");
    *out = static_cast<int>(v);
  }

  void get_long(const std::string& key, long long* out, bool* present = nullptr) {
    const ConfigValue* v = take(key);
    if (present) *present = (v != nullptr);
    if (!v) return;
    if (v->type != ConfigValue::Type::integer) type_error(key, "integer", v);
    *out = v->int_value;
  }

  void get_seed(const std::string& key, std::uint64_t* out) {
    const ConfigValue* v = take(key);
    if (!v) return;
    if (v->type != ConfigValue::Type::integer || v->int_value < 0)
      type_error(key, "non-negative integer", v);
    *out = static_cast<std::uint64_t>(v->int_value);
  }

  void get_double(const std::string& key, double* out) {
    const ConfigValue* v = take(key);
    if (!v) return;
    if (v->type == ConfigValue::Type::integer) *out = static_cast<double>(v->int_value);
    else if (v->type == ConfigValue::Type::real) *out = v->real_value;
    else type_error(key, "number", v);
  }

  void get_bool(const std::string& key, bool* out) {
    const ConfigValue* v = take(key);
    if (!v) return;
    if (v->type != ConfigValue::Type::boolean) type_error(key, "boolean", v);
    *out = v->bool_value;
  }

  void get_string(const std::string& key, std::string* out) {
    const ConfigValue* v = take(key);
    if (!v) return;
    if (v->type != ConfigValue::Type::string) type_error(key, "string", v);
    *out = v->string_value;
  }

  void get_int_array(const std::string& key, std::vector<int>* out) {
    const ConfigValue* v = take(key);
    if (!v) return;
    if (v->type != ConfigValue::Type::array) type_error(key, "array of integers", v);
    std::vector<int> vals;
    for (const ConfigValue& e : v->items) {
      if (e.type != ConfigValue::Type::integer) type_error(key, "array of integers", v);
      if (e.int_value < INT_MIN_ || e.int_value > INT_MAX_)
        type_error(key, "array of integers in int range", v);
      vals.push_back(static_cast<int>(e.int_value));
    }
    *out = std::move(vals);
  }

  // Every key the schema knows has been taken; anything left is unknown.
  void finish() const {
    if (!table_) return;
    for (const auto& [key, value] : *table_) {
      if (!seen_.count(key))
        fail("unknown key '" + key + "' in [" + section_ + "] (line " +
             std::to_string(value.line) + ")");
    }
  }

 private:
  static constexpr long long INT_MIN_ = -2147483648LL;
  static constexpr long long INT_MAX_ = 2147483647LL;

  [[noreturn]] void type_error(const std::string& key, const std::string& want,
                               const ConfigValue* got = nullptr) const {
    std::string msg = "key '" + key + "' in [" + section_ + "] expects " + want;
    if (got) msg += ", got " + std::string(type_name(got->type));
    fail(msg);
  }

  std::string section_;
  const std::map<std::string, ConfigValue>* table_ = nullptr;
  std::set<std::string> seen_;
};

nn::OptimizerKind parse_optimizer_kind(const std::string& s) {
  if (s == "sgd") return nn::OptimizerKind::sgd;
  if (s == "adam") return nn::OptimizerKind::adam;
  if (s == "rmsprop") return nn::OptimizerKind::rmsprop;
  fail("unknown optimizer kind '" + s + "' (expected sgd, adam, or rmsprop)");
}

const char* optimizer_kind_name(nn::OptimizerKind k) {
  switch (k) {
    case nn::OptimizerKind::sgd: return "sgd";
    case nn::OptimizerKind::adam: return "adam";
    case nn::OptimizerKind::rmsprop: return "rmsprop";
  }
  return "?";
}

nn::ClipMode parse_clip_mode(const std::string& s) {
  if (s == "none") return nn::ClipMode::none;
  if (s == "value") return nn::ClipMode::value;
  if (s == "norm") return nn::ClipMode::norm;
  fail("unknown grad_clip mode '" + s + "' (expected none, value, or norm)");
}

const char* clip_mode_name(nn::ClipMode m) {
  switch (m) {
    case nn::ClipMode::none: return "none";
    case nn::ClipMode::value: return "value";
    case nn::ClipMode::norm: return "norm";
  }
  return "?";
}

trainers::DataSpec build_data(SectionReader& r) {
  std::string kind = "gaussian1d";
  r.get_string("distribution", &kind);
  if (kind == "gaussian1d") {
    toydata::Gaussian1D g;
    r.get_double("mean", &g.mean);
    r.get_double("stddev", &g.stddev);
    return toydata::DistributionSpec(g);
  }
  if (kind == "ring") {
    toydata::MixtureRing m;
    r.get_int("modes", &m.modes);
    r.get_double("radius", &m.radius);
    r.get_double("stddev", &m.stddev);
    return toydata::DistributionSpec(m);
  }
  if (kind == "grid") {
    toydata::MixtureGrid m;
    r.get_int("side", &m.side);
    r.get_double("spacing", &m.spacing);
    r.get_double("stddev", &m.stddev);
    return toydata::DistributionSpec(m);
  }
  if (kind == "labeled_ring") {
    int modes = 4;
    double radius = 2.0, stddev = 0.25;
    r.get_int("modes", &modes);
    r.get_double("radius", &radius);
    r.get_double("stddev", &stddev);
    return toydata::DistributionSpec(toydata::labeled_ring(modes, radius, stddev));
  }
  if (kind == "paired") return trainers::PairedData{};
  if (kind == "two_domain") return trainers::TwoDomainData{};
  fail("unknown distribution '" + kind +
       "' (expected gaussian1d, ring, grid, labeled_ring, paired, or two_domain)");
}

void print_data(std::ostringstream& out, const trainers::DataSpec& data);

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

ConfigDoc parse_document(const std::string& text) {
  ConfigDoc doc;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!bare_key_ok(section))
        fail("line " + std::to_string(lineno) + ": malformed section name '" + section + "'");
      if (doc.count(section))
        fail("line " + std::to_string(lineno) + ": duplicate section [" + section + "]");
      doc[section];  // create, possibly empty
      continue;
    }
    // key = value
    std::size_t eq;
    std::string key;
    if (line.front() == '"') {
      std::size_t end = 0;
      key = parse_quoted(line, lineno, &end);
      std::string rest = trim(line.substr(end));
      if (rest.empty() || rest.front() != '=')
        fail("line " + std::to_string(lineno) + ": expected '=' after quoted key");
      eq = line.find('=', end);
    } else {
      eq = line.find('=');
      if (eq == std::string::npos)
        fail("line " + std::to_string(lineno) + ": expected 'key = value' or '[section]'");
      key = trim(line.substr(0, eq));
      if (!bare_key_ok(key))
        fail("line " + std::to_string(lineno) + ": malformed key '" + key + "'");
    }
    if (section.empty())
      fail("line " + std::to_string(lineno) + ": key '" + key + "' appears before any [section]");
    if (doc[section].count(key))
      fail("line " + std::to_string(lineno) + ": duplicate key '" + key + "' in [" + section + "]");
    doc[section][key] = parse_value(line.substr(eq + 1), lineno);
  }
  return doc;
}

Experiment parse_config(const std::string& text) { return build_experiment(parse_document(text)); }

Experiment build_experiment(const ConfigDoc& doc) {
  static const std::set<std::string> kSections = {"experiment",   "model", "data",
                                                  "optim",        "regularizers",
                                                  "diffusion"};
  for (const auto& [name, table] : doc) {
    (void)table;
    if (!kSections.count(name)) fail("unknown section [" + name + "]");
  }

  Experiment e;
  trainers::TrainConfig& t = e.train;

  SectionReader exp(doc, "experiment");
  long long version = 1;
  exp.get_long("version", &version);
  if (version != 1)
    fail("unsupported config version " + std::to_string(version) + " (expected 1)");
  std::string alg = models::algorithm_name(t.algorithm);
  exp.get_string("algorithm", &alg);
  try {
    t.algorithm = models::parse_algorithm(alg);
  } catch (const std::invalid_argument& err) {
    fail(std::string(err.what()) + " (key 'algorithm' in [experiment])");
  }
  exp.get_seed("seed", &t.seed);
  exp.get_int("steps", &t.steps);
  exp.get_int("batch", &t.batch);
  exp.get_int("n_critic", &t.n_critic);
  exp.get_int("unroll_k", &t.unroll_k);
  std::string obj = "nonsaturating";
  exp.get_string("g_objective", &obj);
  if (obj == "nonsaturating") t.g_objective = losses::GeneratorObjective::nonsaturating;
  else if (obj == "saturating") t.g_objective = losses::GeneratorObjective::saturating;
  else fail("unknown g_objective '" + obj + "' (expected nonsaturating or saturating)");
  exp.get_int("eval_every", &t.eval_every);
  exp.get_int("eval_samples", &t.eval_samples);
  exp.get_int("eval_bins", &t.eval_bins);
  exp.finish();

  SectionReader model(doc, "model");
  model.get_int("z_dim", &t.dims.z_dim);
  model.get_int_array("hidden", &t.dims.hidden);
  model.get_int("pack_k", &t.dims.pack_k);
  model.get_int("num_classes", &t.dims.num_classes);
  model.get_int("code_k", &t.dims.code_k);
  model.get_int("embed_dim", &t.dims.embed_dim);
  model.finish();

  SectionReader data(doc, "data");
  t.data = build_data(data);
  data.finish();

  SectionReader optim(doc, "optim");
  const bool wclip = (t.algorithm == models::Algorithm::wgan_clip);
  // Weight clamping pairs with a plain small-step optimizer by default.
  if (wclip) {
    t.g_opt.kind = nn::OptimizerKind::rmsprop;
    t.d_opt.kind = nn::OptimizerKind::rmsprop;
    t.g_opt.lr = 5e-5;
    t.d_opt.lr = 5e-5;
  }
  std::string g_kind = optimizer_kind_name(t.g_opt.kind);
  std::string d_kind = optimizer_kind_name(t.d_opt.kind);
  optim.get_string("g_kind", &g_kind);
  optim.get_string("d_kind", &d_kind);
  t.g_opt.kind = parse_optimizer_kind(g_kind);
  t.d_opt.kind = parse_optimizer_kind(d_kind);
  optim.get_double("g_lr", &t.g_opt.lr);
  optim.get_double("d_lr", &t.d_opt.lr);
  double beta1 = t.g_opt.beta1, beta2 = t.g_opt.beta2;
  double alpha = t.g_opt.alpha, eps = t.g_opt.eps;
  optim.get_double("beta1", &beta1);
  optim.get_double("beta2", &beta2);
  optim.get_double("alpha", &alpha);
  optim.get_double("eps", &eps);
  for (nn::OptimizerConfig* o : {&t.g_opt, &t.d_opt}) {
    o->beta1 = beta1;
    o->beta2 = beta2;
    o->alpha = alpha;
    o->eps = eps;
  }
  optim.finish();

  SectionReader reg(doc, "regularizers");
  reg.get_double("smoothing_real", &t.reg.smoothing.real_target);
  reg.get_double("smoothing_fake", &t.reg.smoothing.fake_target);
  reg.get_double("input_noise_std", &t.reg.input_noise_std);
  reg.get_int("replay_capacity", &t.reg.replay_capacity);
  reg.get_double("replay_mix_fraction", &t.reg.replay_mix_fraction);
  reg.get_double("dp_noise_std", &t.reg.dp_noise_std);
  reg.get_double("feature_matching_weight", &t.reg.feature_matching_weight);
  reg.get_bool("spectral_norm", &t.reg.spectral_norm);
  std::string clip = clip_mode_name(t.reg.grad_clip_mode);
  reg.get_string("grad_clip", &clip);
  t.reg.grad_clip_mode = parse_clip_mode(clip);
  reg.get_double("grad_clip_bound", &t.reg.grad_clip_bound);
  reg.get_double("gp_lambda", &t.reg.gp_lambda);
  reg.get_double("clip_c", &t.reg.clip_c);
  reg.get_double("l1_lambda", &t.reg.l1_lambda);
  reg.get_double("cycle_lambda", &t.reg.cycle_lambda);
  reg.finish();

  SectionReader diff(doc, "diffusion");
  diff.get_string("schedule", &e.diffusion.schedule);
  if (e.diffusion.schedule != "linear" && e.diffusion.schedule != "constant")
    fail("unknown schedule '" + e.diffusion.schedule + "' (expected linear or constant)");
  diff.get_int("timesteps", &e.diffusion.timesteps);
  diff.get_double("beta", &e.diffusion.beta);
  diff.get_double("beta_start", &e.diffusion.beta_start);
  diff.get_double("beta_end", &e.diffusion.beta_end);
  diff.get_int("steps", &e.diffusion.steps);
  diff.get_int("batch", &e.diffusion.batch);
  diff.get_int_array("hidden", &e.diffusion.hidden);
  diff.get_double("lr", &e.diffusion.lr);
  diff.finish();

  return e;
}

Experiment load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

void print_data(std::ostringstream& out, const trainers::DataSpec& data) {
  out << "[data]\n";
  if (std::holds_alternative<trainers::PairedData>(data)) {
    out << "distribution = \"paired\"\n";
    return;
  }
  if (std::holds_alternative<trainers::TwoDomainData>(data)) {
    out << "distribution = \"two_domain\"\n";
    return;
  }
  const auto& dist = std::get<toydata::DistributionSpec>(data);
  if (const auto* g = std::get_if<toydata::Gaussian1D>(&dist)) {
    out << "distribution = \"gaussian1d\"\n";
    out << "mean = " << format_double(g->mean) << "\n";
    out << "stddev = " << format_double(g->stddev) << "\n";
  } else if (const auto* m = std::get_if<toydata::MixtureRing>(&dist)) {
    out << "distribution = \"ring\"\n";
    out << "modes = " << m->modes << "\n";
    out << "radius = " << format_double(m->radius) << "\n";
    out << "stddev = " << format_double(m->stddev) << "\n";
  } else if (const auto* m = std::get_if<toydata::MixtureGrid>(&dist)) {
    out << "distribution = \"grid\"\n";
    out << "side = " << m->side << "\n";
    out << "spacing = " << format_double(m->spacing) << "\n";
    out << "stddev = " << format_double(m->stddev) << "\n";
  } else if (const auto* m = std::get_if<toydata::LabeledMixture>(&dist)) {
    // Labeled mixtures built from config always lie on a ring whose first
    // center sits at angle zero, so (modes, radius) are recoverable exactly.
    out << "distribution = \"labeled_ring\"\n";
    out << "modes = " << m->centers.size() << "\n";
    out << "radius = " << format_double(m->centers.empty() ? 0.0 : m->centers[0][0]) << "\n";
    out << "stddev = " << format_double(m->stddev) << "\n";
  }
}

}  // namespace

std::string print_config(const Experiment& e) {
  const trainers::TrainConfig& t = e.train;
  std::ostringstream out;
  out << "[experiment]\n";
  out << "version = 1\n";
  out << "algorithm = \"" << models::algorithm_name(t.algorithm) << "\"\n";
  out << "seed = " << t.seed << "\n";
  out << "steps = " << t.steps << "\n";
  out << "batch = " << t.batch << "\n";
  out << "n_critic = " << t.n_critic << "\n";
  out << "unroll_k = " << t.unroll_k << "\n";
  out << "g_objective = \""
      << (t.g_objective == losses::GeneratorObjective::saturating ? "saturating"
                                                                  : "nonsaturating")
      << "\"\n";
  out << "eval_every = " << t.eval_every << "\n";
  out << "eval_samples = " << t.eval_samples << "\n";
  out << "eval_bins = " << t.eval_bins << "\n";
  out << "\n[model]\n";
  out << "z_dim = " << t.dims.z_dim << "\n";
  out << "hidden = [";
  for (std::size_t i = 0; i < t.dims.hidden.size(); ++i)
    out << (i ? ", " : "") << t.dims.hidden[i];
  out << "]\n";
  out << "pack_k = " << t.dims.pack_k << "\n";
  out << "num_classes = " << t.dims.num_classes << "\n";
  out << "code_k = " << t.dims.code_k << "\n";
  out << "embed_dim = " << t.dims.embed_dim << "\n";
  out << "\n";
  print_data(out, t.data);
  out << "\n[optim]\n";
  out << "g_kind = \"" << optimizer_kind_name(t.g_opt.kind) << "\"\n";
  out << "g_lr = " << format_double(t.g_opt.lr) << "\n";
  out << "d_kind = \"" << optimizer_kind_name(t.d_opt.kind) << "\"\n";
  out << "d_lr = " << format_double(t.d_opt.lr) << "\n";
  out << "beta1 = " << format_double(t.g_opt.beta1) << "\n";
  out << "beta2 = " << format_double(t.g_opt.beta2) << "\n";
  out << "alpha = " << format_double(t.g_opt.alpha) << "\n";
  out << "eps = " << format_double(t.g_opt.eps) << "\n";
  out << "\n[regularizers]\n";
  out << "smoothing_real = " << format_double(t.reg.smoothing.real_target) << "\n";
  out << "smoothing_fake = " << format_double(t.reg.smoothing.fake_target) << "\n";
  out << "input_noise_std = " << format_double(t.reg.input_noise_std) << "\n";
  out << "replay_capacity = " << t.reg.replay_capacity << "\n";
  out << "replay_mix_fraction = " << format_double(t.reg.replay_mix_fraction) << "\n";
  out << "dp_noise_std = " << format_double(t.reg.dp_noise_std) << "\n";
  out << "feature_matching_weight = " << format_double(t.reg.feature_matching_weight) << "\n";
  out << "spectral_norm = " << (t.reg.spectral_norm ? "true" : "false") << "\n";
  out << "grad_clip = \"" << clip_mode_name(t.reg.grad_clip_mode) << "\"\n";
  out << "grad_clip_bound = " << format_double(t.reg.grad_clip_bound) << "\n";
  out << "gp_lambda = " << format_double(t.reg.gp_lambda) << "\n";
  out << "clip_c = " << format_double(t.reg.clip_c) << "\n";
  out << "l1_lambda = " << format_double(t.reg.l1_lambda) << "\n";
  out << "cycle_lambda = " << format_double(t.reg.cycle_lambda) << "\n";
  out << "\n[diffusion]\n";
  out << "schedule = \"" << e.diffusion.schedule << "\"\n";
  out << "timesteps = " << e.diffusion.timesteps << "\n";
  out << "beta = " << format_double(e.diffusion.beta) << "\n";
  out << "beta_start = " << format_double(e.diffusion.beta_start) << "\n";
  out << "beta_end = " << format_double(e.diffusion.beta_end) << "\n";
  out << "steps = " << e.diffusion.steps << "\n";
  out << "batch = " << e.diffusion.batch << "\n";
  out << "hidden = [";
  for (std::size_t i = 0; i < e.diffusion.hidden.size(); ++i)
    out << (i ? ", " : "") << e.diffusion.hidden[i];
  out << "]\n";
  out << "lr = " << format_double(e.diffusion.lr) << "\n";
  return out.str();
}

diffusion::NoiseSchedule make_schedule(const DiffusionSettings& s) {
  if (s.schedule == "constant") return diffusion::constant_schedule(s.timesteps, s.beta);
  return diffusion::linear_schedule(s.timesteps, s.beta_start, s.beta_end);
}

diffusion::DenoiserConfig make_denoiser_config(const DiffusionSettings& s,
                                               const toydata::DistributionSpec& dist,
                                               std::uint64_t seed) {
  diffusion::DenoiserConfig cfg;
  cfg.dist = dist;
  cfg.schedule = make_schedule(s);
  cfg.steps = s.steps;
  cfg.batch = s.batch;
  cfg.hidden = s.hidden;
  cfg.opt.lr = s.lr;
  cfg.seed = seed;
  return cfg;
}

}  // namespace ganlab::config
