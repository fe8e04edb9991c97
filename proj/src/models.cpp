#include "ganlab/models.hpp"

#include <algorithm>
#include <stdexcept>

#include "ganlab/rng.hpp"

namespace ganlab::models {

namespace {

struct AlgorithmName {
  Algorithm a;
  const char* name;
};

constexpr AlgorithmName kNames[] = {
    {Algorithm::vanilla, "vanilla"},
    {Algorithm::wgan_clip, "wgan_clip"},
    {Algorithm::wgan_gp, "wgan_gp"},
    {Algorithm::lsgan, "lsgan"},
    {Algorithm::hinge, "hinge"},
    {Algorithm::cgan, "cgan"},
    {Algorithm::infogan, "infogan"},
    {Algorithm::ebgan, "ebgan"},
    {Algorithm::aae, "aae"},
    {Algorithm::pix2pix_toy, "pix2pix_toy"},
    {Algorithm::cyclegan_toy, "cyclegan_toy"},
};

nn::NetworkSpec mlp(int in, const std::vector<int>& hidden, int out, nn::Activation hidden_act,
                    nn::Activation out_act, bool sn, int tap = -1) {
  nn::NetworkSpec spec;
  spec.layer_sizes.push_back(in);
  for (int h : hidden) spec.layer_sizes.push_back(h);
  spec.layer_sizes.push_back(out);
  spec.hidden_activation = hidden_act;
  spec.output_activation = out_act;
  spec.spectral_norm = sn;
  spec.feature_tap = tap;
  return spec;
}

nn::NetworkSpec generator_spec(int in, const std::vector<int>& hidden, int out) {
  return mlp(in, hidden, out, nn::Activation::relu, nn::Activation::identity, false);
}

nn::NetworkSpec discriminator_spec(int in, const std::vector<int>& hidden,
                                   nn::Activation head, bool sn) {
  const int tap = hidden.empty() ? -1 : static_cast<int>(hidden.size()) - 1;
  return mlp(in, hidden, 1, nn::Activation::leaky_relu, head, sn, tap);
}

bool can_pack(Algorithm a) {
  return a == Algorithm::vanilla || a == Algorithm::wgan_clip || a == Algorithm::wgan_gp ||
         a == Algorithm::lsgan || a == Algorithm::hinge;
}

// Raw-score discriminators (no squashing head): the critic family, the
// margin loss, and every least-squares adversary.
nn::Activation main_head(Algorithm a) {
  switch (a) {
    case Algorithm::wgan_clip:
    case Algorithm::wgan_gp:
    case Algorithm::hinge:
    case Algorithm::lsgan:
    case Algorithm::pix2pix_toy:
    case Algorithm::cyclegan_toy: return nn::Activation::identity;
    default: return nn::Activation::sigmoid;
  }
}

void validate(Algorithm a, const Dims& d) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("build_bundle: " + m); };
  if (d.data_dim < 1) fail("data_dim must be >= 1");
  if (d.z_dim < 1) fail("z_dim must be >= 1");
  if (d.pack_k < 1) fail("pack_k must be >= 1");
  for (int h : d.hidden)
    if (h < 1) fail("hidden widths must be >= 1");
  if (d.pack_k > 1 && !can_pack(a)) fail("packing only applies to the unconditional families");
  if (a == Algorithm::cgan && d.num_classes < 2) fail("cgan needs num_classes >= 2");
  if (a == Algorithm::infogan && d.code_k < 2) fail("infogan needs code_k >= 2");
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  for (const AlgorithmName& n : kNames)
    if (n.a == a) return n.name;
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (const AlgorithmName& n : kNames)
    if (name == n.name) return n.a;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::vector<Algorithm> all_algorithms() {
  std::vector<Algorithm> out;
  for (const AlgorithmName& n : kNames) out.push_back(n.a);
  return out;
}

bool is_wgan_family(Algorithm a) {
  return a == Algorithm::wgan_clip || a == Algorithm::wgan_gp;
}

int autoencoder_latent_dim(const Dims& dims) { return std::max(2, dims.data_dim); }

ModelBundle build_bundle(Algorithm algorithm, const Dims& dims, std::uint64_t seed) {
  validate(algorithm, dims);
  Rng root(seed);
  auto sub = [&](std::uint64_t k) { return root.split(k).next_u64(); };
  auto make = [&](const nn::NetworkSpec& spec, std::uint64_t k) {
    Network net;
    net.spec = spec;
    net.params = nn::init_network(spec, sub(k));
    return net;
  };

  ModelBundle b;
  b.algorithm = algorithm;
  b.dims = dims;
  const int d = dims.data_dim;
  const nn::Activation head = main_head(algorithm);
  const bool sn = dims.spectral_norm;

  switch (algorithm) {
    case Algorithm::vanilla:
    case Algorithm::wgan_clip:
    case Algorithm::wgan_gp:
    case Algorithm::lsgan:
    case Algorithm::hinge: {
      b.generator = make(generator_spec(dims.z_dim, dims.hidden, d), 1);
      b.discriminator = make(discriminator_spec(d * dims.pack_k, dims.hidden, head, sn), 2);
      break;
    }
    case Algorithm::cgan: {
      const int e = dims.effective_embed_dim();
      b.generator = make(generator_spec(dims.z_dim + e, dims.hidden, d), 1);
      b.discriminator = make(discriminator_spec(d + e, dims.hidden, head, sn), 2);
      b.g_embedding = nn::init_embedding(dims.num_classes, e, sub(7));
      b.d_embedding = nn::init_embedding(dims.num_classes, e, sub(8));
      break;
    }
    case Algorithm::infogan: {
      b.generator = make(generator_spec(dims.z_dim + dims.code_k, dims.hidden, d), 1);
      b.discriminator = make(discriminator_spec(d, dims.hidden, head, sn), 2);
      b.q_network = make(mlp(d, dims.hidden, dims.code_k, nn::Activation::leaky_relu,
                             nn::Activation::identity, false),
                         6);
      break;
    }
    case Algorithm::ebgan: {
      b.generator = make(generator_spec(dims.z_dim, dims.hidden, d), 1);
      const int h0 = dims.hidden.empty() ? 128 : dims.hidden.front();
      const nn::NetworkSpec ae = mlp(d, {h0, autoencoder_latent_dim(dims), h0}, d,
                                     nn::Activation::leaky_relu, nn::Activation::identity, sn);
      b.discriminator = make(ae, 2);
      break;
    }
    case Algorithm::aae: {
      const int latent = autoencoder_latent_dim(dims);
      // generator doubles as the decoder: latent -> data.
      b.generator = make(generator_spec(latent, dims.hidden, d), 1);
      b.encoder = make(mlp(d, dims.hidden, latent, nn::Activation::leaky_relu,
                           nn::Activation::identity, false),
                       5);
      b.discriminator = make(discriminator_spec(latent, dims.hidden, head, sn), 2);
      break;
    }
    case Algorithm::pix2pix_toy: {
      b.generator = make(generator_spec(d, dims.hidden, d), 1);
      b.discriminator = make(discriminator_spec(2 * d, dims.hidden, head, sn), 2);
      break;
    }
    case Algorithm::cyclegan_toy: {
      b.generator = make(generator_spec(d, dims.hidden, d), 1);
      b.generator_b = make(generator_spec(d, dims.hidden, d), 3);
      b.discriminator = make(discriminator_spec(d, dims.hidden, head, sn), 2);
      b.discriminator_b = make(discriminator_spec(d, dims.hidden, head, sn), 4);
      break;
    }
  }
  return b;
}

ModelBundle clone_bundle(const ModelBundle& bundle) {
  ModelBundle out;
  out.algorithm = bundle.algorithm;
  out.dims = bundle.dims;
  auto copy_net = [](const Network& n) {
    Network c;
    c.spec = n.spec;
    c.params = nn::clone(n.params);
    return c;
  };
  out.generator = copy_net(bundle.generator);
  out.discriminator = copy_net(bundle.discriminator);
  if (bundle.generator_b) out.generator_b = copy_net(*bundle.generator_b);
  if (bundle.discriminator_b) out.discriminator_b = copy_net(*bundle.discriminator_b);
  if (bundle.encoder) out.encoder = copy_net(*bundle.encoder);
  if (bundle.q_network) out.q_network = copy_net(*bundle.q_network);
  auto copy_tensor = [](const Tensor& t) { return Tensor(t.rows(), t.cols(), t.values()); };
  if (bundle.g_embedding) out.g_embedding = copy_tensor(*bundle.g_embedding);
  if (bundle.d_embedding) out.d_embedding = copy_tensor(*bundle.d_embedding);
  return out;
}

Tensor pack(const Tensor& batch, int k) {
  if (!batch.defined()) throw std::invalid_argument("pack: undefined tensor");
  if (k < 1) throw std::invalid_argument("pack: k must be >= 1");
  if (k == 1) return batch;
  const int n = batch.rows();
  if (n % k != 0) {
    throw std::invalid_argument("pack: row count " + std::to_string(n) +
                                " not divisible by k = " + std::to_string(k));
  }
  const int m = n / k;
  Tensor out;
  for (int j = 0; j < k; ++j) {
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i * k + j;
    const Tensor slice = select_rows(batch, idx);
    out = out.defined() ? concat(out, slice, 1) : slice;
  }
  return out;
}

Tensor unpack(const Tensor& packed, int k) {
  if (!packed.defined()) throw std::invalid_argument("unpack: undefined tensor");
  if (k < 1) throw std::invalid_argument("unpack: k must be >= 1");
  if (k == 1) return packed;
  if (packed.cols() % k != 0) {
    throw std::invalid_argument("unpack: column count " + std::to_string(packed.cols()) +
                                " not divisible by k = " + std::to_string(k));
  }
  const int m = packed.rows();
  const int d = packed.cols() / k;
  std::vector<double> v(static_cast<std::size_t>(m) * static_cast<std::size_t>(k) *
                        static_cast<std::size_t>(d));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int c = 0; c < d; ++c) {
        v[(static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
           static_cast<std::size_t>(j)) *
              static_cast<std::size_t>(d) +
          static_cast<std::size_t>(c)] = packed.at(i, j * d + c);
      }
    }
  }
  return Tensor(m * k, d, v);
}

Tensor condition(const Tensor& z, const Tensor& label_vecs) {
  if (!z.defined() || !label_vecs.defined()) {
    throw std::invalid_argument("condition: undefined tensor");
  }
  if (z.rows() != label_vecs.rows()) {
    throw std::invalid_argument("condition: row mismatch " + z.shape_str() + " vs " +
                                label_vecs.shape_str());
  }
  return concat(z, label_vecs, 1);
}

}  // namespace ganlab::models
