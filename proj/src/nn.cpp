#include "ganlab/nn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ganlab::nn {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "unknown";
}

namespace {

bool relu_family(Activation a) {
  return a == Activation::relu || a == Activation::leaky_relu;
}

Tensor apply_activation(const Tensor& z, Activation a, double slope) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::relu: return relu(z);
    case Activation::leaky_relu: return leaky_relu(z, slope);
    case Activation::tanh: return tanh(z);
    case Activation::sigmoid: return sigmoid(z);
  }
  throw std::invalid_argument("apply_activation: unknown activation");
}

void validate_spec(const NetworkSpec& spec) {
  if (spec.layer_sizes.size() < 2)
    throw std::invalid_argument("NetworkSpec: need at least input and output sizes");
  for (int s : spec.layer_sizes)
    if (s <= 0) throw std::invalid_argument("NetworkSpec: layer sizes must be positive");
  if (spec.feature_tap >= spec.num_layers() - 1)
    throw std::invalid_argument("NetworkSpec: feature_tap must name a hidden layer");
}

std::vector<double> normalized_or_throw(std::vector<double> v, const char* who) {
  double s = 0.0;
  for (double x : v) s += x * x;
  const double n = std::sqrt(s);
  if (n == 0.0) throw NumericDomainError(std::string(who) + ": zero vector has no direction");
  for (double& x : v) x /= n;
  return v;
}

// W^T u for raw buffers: W [out x in], u [out] -> [in].
std::vector<double> wt_u(const Tensor& w, const std::vector<double>& u) {
  std::vector<double> v(static_cast<std::size_t>(w.cols()), 0.0);
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j)
      v[static_cast<std::size_t>(j)] += w.at(i, j) * u[static_cast<std::size_t>(i)];
  return v;
}

// W v: [out].
std::vector<double> w_v(const Tensor& w, const std::vector<double>& v) {
  std::vector<double> u(static_cast<std::size_t>(w.rows()), 0.0);
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j)
      u[static_cast<std::size_t>(i)] += w.at(i, j) * v[static_cast<std::size_t>(j)];
  return u;
}

}  // namespace

ParameterSet init_network(const NetworkSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  Rng root(seed);
  ParameterSet out;
  const int layers = spec.num_layers();
  for (int l = 0; l < layers; ++l) {
    const int fan_in = spec.layer_sizes[static_cast<std::size_t>(l)];
    const int fan_out = spec.layer_sizes[static_cast<std::size_t>(l) + 1];
    const Activation next =
        l + 1 < layers ? spec.hidden_activation : spec.output_activation;
    Rng rng = root.split(static_cast<std::uint64_t>(l));
    std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
    if (relu_family(next)) {
      const double stddev = std::sqrt(2.0 / fan_in);
      for (double& x : w) x = stddev * rng.normal();
    } else {
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& x : w) x = limit * (2.0 * rng.uniform01() - 1.0);
    }
    out.params.emplace_back(fan_out, fan_in, std::move(w));
    out.params.emplace_back(1, fan_out);  // bias, zero
    if (spec.spectral_norm) {
      Rng urng = root.split(1000 + static_cast<std::uint64_t>(l));
      std::vector<double> u(static_cast<std::size_t>(fan_out));
      for (double& x : u) x = urng.normal();
      out.sn_u.push_back(Tensor::row(normalized_or_throw(std::move(u), "init_network")));
    }
  }
  return out;
}

SpectralResult spectral_normalize(const Tensor& w, const Tensor& u, int iters) {
  if (u.rows() != 1 || u.cols() != w.rows())
    throw std::invalid_argument("spectral_normalize: u must be 1x" + std::to_string(w.rows()) +
                                ", got " + u.shape_str());
  std::vector<double> uv = u.values();
  std::vector<double> vv = normalized_or_throw(wt_u(w, uv), "spectral_normalize");
  for (int i = 0; i < iters; ++i) {
    if (i > 0) vv = normalized_or_throw(wt_u(w, uv), "spectral_normalize");
    uv = normalized_or_throw(w_v(w, vv), "spectral_normalize");
  }
  // sigma = u^T W v.
  const std::vector<double> wv = w_v(w, vv);
  double sigma = 0.0;
  for (std::size_t i = 0; i < uv.size(); ++i) sigma += uv[i] * wv[i];
  if (sigma <= 0.0)
    throw NumericDomainError("spectral_normalize: non-positive sigma estimate");
  SpectralResult r;
  r.sigma = sigma;
  std::vector<double> what = w.values();
  for (double& x : what) x /= sigma;
  r.w_hat = Tensor(w.rows(), w.cols(), std::move(what));
  r.u = Tensor::row(std::move(uv));
  return r;
}

ForwardResult forward(const NetworkSpec& spec, ParameterSet& params, const Tensor& x,
                      Mode mode) {
  validate_spec(spec);
  const int layers = spec.num_layers();
  if (params.params.size() != static_cast<std::size_t>(2 * layers))
    throw std::invalid_argument("forward: parameter count does not match spec");
  if (x.cols() != spec.input_dim())
    throw std::invalid_argument("forward: input has width " + std::to_string(x.cols()) +
                                ", spec expects " + std::to_string(spec.input_dim()));
  ForwardResult result;
  Tensor h = x;
  for (int l = 0; l < layers; ++l) {
    Tensor w = params.params[static_cast<std::size_t>(2 * l)];
    const Tensor& b = params.params[static_cast<std::size_t>(2 * l) + 1];
    if (spec.spectral_norm) {
      // Estimate sigma from the raw weights. u and v enter the tape as
      // constants; gradients flow through W inside sigma = u W v.
      Tensor& u_state = params.sn_u[static_cast<std::size_t>(l)];
      std::vector<double> uv = u_state.values();
      std::vector<double> vv;
      const Tensor w_raw = w.detached();
      if (mode == Mode::train) {
        vv = normalized_or_throw(wt_u(w_raw, uv), "forward");
        uv = normalized_or_throw(w_v(w_raw, vv), "forward");
        u_state = Tensor::row(uv);
      } else {
        vv = normalized_or_throw(wt_u(w_raw, uv), "forward");
      }
      const Tensor u_row = Tensor::row(uv);
      const Tensor v_col(static_cast<int>(vv.size()), 1, vv);
      const Tensor sigma = matmul(matmul(u_row, w), v_col);
      w = mul(w, exp(neg(log(sigma))));
    }
    Tensor z = add(matmul(h, transpose(w)), b);
    const Activation act = l + 1 < layers ? spec.hidden_activation : spec.output_activation;
    h = apply_activation(z, act, spec.leaky_slope);
    if (l == spec.feature_tap) result.tapped = h;
  }
  result.output = h;
  return result;
}

// ---- optimizers -------------------------------------------------------------

OptimizerState make_optimizer(const OptimizerConfig& cfg, const ParameterSet& params) {
  OptimizerState st;
  st.cfg = cfg;
  for (const Tensor& p : params.params) {
    st.m.emplace_back(p.size(), 0.0);
    st.v.emplace_back(p.size(), 0.0);
  }
  return st;
}

void optimizer_step(OptimizerState& opt, ParameterSet& params, const std::vector<Tensor>& grads) {
  if (grads.size() != params.params.size())
    throw std::invalid_argument("optimizer_step: gradient count " + std::to_string(grads.size()) +
                                " does not match parameter count " +
                                std::to_string(params.params.size()));
  ++opt.step_count;
  const OptimizerConfig& c = opt.cfg;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(opt.step_count));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(opt.step_count));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const Tensor& p = params.params[i];
    const Tensor& g = grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw std::invalid_argument("optimizer_step: gradient " + std::to_string(i) + " has shape " +
                                  g.shape_str() + ", parameter is " + p.shape_str());
    std::vector<double> nv = p.values();
    for (std::size_t j = 0; j < nv.size(); ++j) {
      const double gj = g.values()[j];
      switch (c.kind) {
        case OptimizerKind::sgd:
          nv[j] -= c.lr * gj;
          break;
        case OptimizerKind::adam: {
          double& m = opt.m[i][j];
          double& v = opt.v[i][j];
          m = c.beta1 * m + (1.0 - c.beta1) * gj;
          v = c.beta2 * v + (1.0 - c.beta2) * gj * gj;
          const double mhat = m / bc1;
          const double vhat = v / bc2;
          nv[j] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
          break;
        }
        case OptimizerKind::rmsprop: {
          double& s = opt.m[i][j];
          s = c.alpha * s + (1.0 - c.alpha) * gj * gj;
          nv[j] -= c.lr * gj / (std::sqrt(s) + c.eps);
          break;
        }
      }
    }
    params.params[i] = Tensor(p.rows(), p.cols(), std::move(nv));
  }
}

void clip_weight_values(ParameterSet& params, double c) {
  if (c <= 0.0) throw std::invalid_argument("clip_weight_values: bound must be positive");
  for (Tensor& p : params.params) {
    std::vector<double> nv = p.values();
    for (double& x : nv) x = std::min(std::max(x, -c), c);
    p = Tensor(p.rows(), p.cols(), std::move(nv));
  }
}

void clip_gradient(std::vector<Tensor>& grads, ClipMode mode, double bound) {
  if (mode == ClipMode::none) return;
  if (bound <= 0.0) throw std::invalid_argument("clip_gradient: bound must be positive");
  if (mode == ClipMode::value) {
    for (Tensor& g : grads) {
      std::vector<double> nv = g.values();
      for (double& x : nv) x = std::min(std::max(x, -bound), bound);
      g = Tensor(g.rows(), g.cols(), std::move(nv));
    }
    return;
  }
  double sq = 0.0;
  for (const Tensor& g : grads)
    for (double x : g.values()) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm <= bound) return;
  const double s = bound / norm;
  for (Tensor& g : grads) {
    std::vector<double> nv = g.values();
    for (double& x : nv) x *= s;
    g = Tensor(g.rows(), g.cols(), std::move(nv));
  }
}

// ---- embeddings ---------------------------------------------------------------

Tensor init_embedding(int num_classes, int embed_dim, std::uint64_t seed) {
  if (num_classes <= 0 || embed_dim <= 0)
    throw std::invalid_argument("init_embedding: sizes must be positive");
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(num_classes) * embed_dim);
  for (double& x : v) x = rng.normal();
  return Tensor(num_classes, embed_dim, std::move(v));
}

Tensor embed(const Tensor& table, const std::vector<int>& labels) {
  return select_rows(table, labels);
}

// ---- persistence ----------------------------------------------------------------

namespace {
nlohmann::json tensor_to_json(const Tensor& t) {
  return {{"rows", t.rows()}, {"cols", t.cols()}, {"values", t.values()}};
}

Tensor tensor_from_json(const nlohmann::json& j) {
  return Tensor(j.at("rows").get<int>(), j.at("cols").get<int>(),
                j.at("values").get<std::vector<double>>());
}
}  // namespace

std::string save_params(const ParameterSet& params) {
  nlohmann::json j;
  j["params"] = nlohmann::json::array();
  for (const Tensor& t : params.params) j["params"].push_back(tensor_to_json(t));
  j["sn_u"] = nlohmann::json::array();
  for (const Tensor& t : params.sn_u) j["sn_u"].push_back(tensor_to_json(t));
  return j.dump();
}

ParameterSet load_params(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ParameterSet p;
  for (const auto& t : j.at("params")) p.params.push_back(tensor_from_json(t));
  for (const auto& t : j.at("sn_u")) p.sn_u.push_back(tensor_from_json(t));
  return p;
}

void save_params_file(const ParameterSet& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_params_file: cannot open " + path);
  out << save_params(params);
  if (!out) throw std::runtime_error("save_params_file: write failed for " + path);
}

ParameterSet load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_params_file: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_params(ss.str());
}

ParameterSet clone(const ParameterSet& params) {
  ParameterSet out;
  for (const Tensor& t : params.params)
    out.params.emplace_back(t.rows(), t.cols(), t.values());
  for (const Tensor& t : params.sn_u) out.sn_u.emplace_back(t.rows(), t.cols(), t.values());
  return out;
}

ParameterSet attach(const std::shared_ptr<Graph>& g, const ParameterSet& params) {
  ParameterSet out;
  out.params.reserve(params.params.size());
  for (const Tensor& t : params.params) out.params.push_back(g->leaf(t));
  out.sn_u = params.sn_u;
  return out;
}

}  // namespace ganlab::nn
