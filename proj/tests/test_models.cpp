#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/models.hpp"
#include "ganlab/rng.hpp"

using namespace ganlab;
using namespace ganlab::models;

namespace {

Tensor random_input(Rng& rng, int n, int d) {
  std::vector<double> v(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  for (double& x : v) x = rng.normal();
  return Tensor(n, d, v);
}

}  // namespace

TEST_CASE("bundle wiring for the plain roster") {
  Dims dims;
  dims.data_dim = 1;
  ModelBundle b = build_bundle(Algorithm::vanilla, dims, 1);
  CHECK(b.generator.spec.input_dim() == 100);
  CHECK(b.generator.spec.output_dim() == 1);
  CHECK(b.discriminator.spec.input_dim() == 1);
  CHECK(b.discriminator.spec.output_dim() == 1);
  CHECK(b.discriminator.spec.output_activation == nn::Activation::sigmoid);
  CHECK(b.generator.spec.output_activation == nn::Activation::identity);

  dims.data_dim = 2;
  dims.pack_k = 2;
  ModelBundle packed = build_bundle(Algorithm::vanilla, dims, 1);
  CHECK(packed.discriminator.spec.input_dim() == 4);

  // Raw-score heads for the critic family.
  dims.pack_k = 1;
  CHECK(build_bundle(Algorithm::wgan_clip, dims, 1).discriminator.spec.output_activation ==
        nn::Activation::identity);
  CHECK(build_bundle(Algorithm::hinge, dims, 1).discriminator.spec.output_activation ==
        nn::Activation::identity);
  CHECK(build_bundle(Algorithm::lsgan, dims, 1).discriminator.spec.output_activation ==
        nn::Activation::identity);
}

TEST_CASE("conditional roster widths") {
  Dims dims;
  dims.data_dim = 2;
  dims.num_classes = 4;
  dims.embed_dim = 8;
  ModelBundle b = build_bundle(Algorithm::cgan, dims, 3);
  CHECK(b.generator.spec.input_dim() == 108);
  CHECK(b.discriminator.spec.input_dim() == 10);
  REQUIRE(b.g_embedding.has_value());
  REQUIRE(b.d_embedding.has_value());
  CHECK(b.g_embedding->rows() == 4);
  CHECK(b.g_embedding->cols() == 8);
  // embed_dim defaults to num_classes.
  dims.embed_dim = 0;
  CHECK(build_bundle(Algorithm::cgan, dims, 3).generator.spec.input_dim() == 104);
}

TEST_CASE("bundle validation rejects inconsistent dims") {
  Dims dims;  // data_dim missing
  CHECK_THROWS_AS(build_bundle(Algorithm::vanilla, dims, 1), std::invalid_argument);
  dims.data_dim = 2;
  CHECK_THROWS_AS(build_bundle(Algorithm::cgan, dims, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_bundle(Algorithm::infogan, dims, 1), std::invalid_argument);
  dims.pack_k = 2;
  dims.num_classes = 4;
  CHECK_THROWS_AS(build_bundle(Algorithm::cgan, dims, 1), std::invalid_argument);
  dims.pack_k = 0;
  CHECK_THROWS_AS(build_bundle(Algorithm::vanilla, dims, 1), std::invalid_argument);
}

TEST_CASE("every roster type-checks end to end") {
  Rng rng(5);
  Dims dims;
  dims.data_dim = 2;
  dims.z_dim = 6;
  dims.hidden = {16, 16};
  dims.num_classes = 3;
  dims.code_k = 4;
  const int n = 4;

  for (Algorithm a : all_algorithms()) {
    ModelBundle b = build_bundle(a, dims, 7);
    CAPTURE(algorithm_name(a));

    // Generator forward on its natural input.
    const Tensor gin = random_input(rng, n, b.generator.spec.input_dim());
    const Tensor gout = nn::forward(b.generator.spec, b.generator.params, gin).output;
    CHECK(gout.rows() == n);
    CHECK(gout.cols() == b.generator.spec.output_dim());

    // Discriminator forward.
    const Tensor din = random_input(rng, n, b.discriminator.spec.input_dim());
    const Tensor dout = nn::forward(b.discriminator.spec, b.discriminator.params, din).output;
    CHECK(dout.rows() == n);
    if (a == Algorithm::ebgan) {
      CHECK(dout.cols() == dims.data_dim);  // autoencoder reconstructs
    } else {
      CHECK(dout.cols() == 1);
    }

    if (a == Algorithm::aae) {
      REQUIRE(b.encoder.has_value());
      CHECK(b.encoder->spec.input_dim() == dims.data_dim);
      CHECK(b.encoder->spec.output_dim() == autoencoder_latent_dim(dims));
      CHECK(b.generator.spec.input_dim() == autoencoder_latent_dim(dims));
      CHECK(b.discriminator.spec.input_dim() == autoencoder_latent_dim(dims));
    }
    if (a == Algorithm::infogan) {
      REQUIRE(b.q_network.has_value());
      CHECK(b.q_network->spec.input_dim() == dims.data_dim);
      CHECK(b.q_network->spec.output_dim() == dims.code_k);
      CHECK(b.generator.spec.input_dim() == dims.z_dim + dims.code_k);
    }
    if (a == Algorithm::cyclegan_toy) {
      REQUIRE(b.generator_b.has_value());
      REQUIRE(b.discriminator_b.has_value());
      CHECK(b.generator_b->spec.input_dim() == dims.data_dim);
    }
    if (a == Algorithm::pix2pix_toy) {
      CHECK(b.discriminator.spec.input_dim() == 2 * dims.data_dim);
    }
  }
}

TEST_CASE("spectral norm flag reaches the discriminator") {
  Dims dims;
  dims.data_dim = 2;
  dims.spectral_norm = true;
  ModelBundle b = build_bundle(Algorithm::hinge, dims, 2);
  CHECK(b.discriminator.spec.spectral_norm);
  CHECK_FALSE(b.generator.spec.spectral_norm);
  CHECK_FALSE(b.discriminator.params.sn_u.empty());
}

TEST_CASE("bundle init is deterministic in the seed") {
  Dims dims;
  dims.data_dim = 2;
  const ModelBundle a = build_bundle(Algorithm::vanilla, dims, 42);
  const ModelBundle b = build_bundle(Algorithm::vanilla, dims, 42);
  const ModelBundle c = build_bundle(Algorithm::vanilla, dims, 43);
  REQUIRE(a.generator.params.params.size() == b.generator.params.params.size());
  for (std::size_t i = 0; i < a.generator.params.params.size(); ++i) {
    CHECK(a.generator.params.params[i].values() == b.generator.params.params[i].values());
  }
  CHECK(a.generator.params.params[0].values() != c.generator.params.params[0].values());
  // Generator and discriminator draw from independent streams.
  CHECK(a.generator.params.params[0].values() != a.discriminator.params.params[0].values());
}

TEST_CASE("pack groups consecutive rows and keeps gradients") {
  const Tensor batch(4, 2, {0, 1, 10, 11, 20, 21, 30, 31});
  const Tensor packed = pack(batch, 2);
  CHECK(packed.rows() == 2);
  CHECK(packed.cols() == 4);
  CHECK(packed.at(0, 0) == 0.0);
  CHECK(packed.at(0, 1) == 1.0);
  CHECK(packed.at(0, 2) == 10.0);
  CHECK(packed.at(0, 3) == 11.0);
  CHECK(packed.at(1, 0) == 20.0);

  CHECK(pack(batch, 1).values() == batch.values());
  CHECK_THROWS_AS(pack(Tensor(5, 2, std::vector<double>(10, 0.0)), 2), std::invalid_argument);

  // Round trip.
  const Tensor back = unpack(packed, 2);
  CHECK(back.rows() == 4);
  CHECK(back.values() == batch.values());

  // Gradient of sum(pack(x)) with respect to x is all ones.
  auto g = Graph::create();
  const Tensor leaf = g->leaf(batch);
  const Tensor total = sum(pack(leaf, 2));
  const Tensor grad_x = grad(total, {leaf})[0];
  for (double v : grad_x.values()) CHECK(v == 1.0);
}

TEST_CASE("conditioning concatenates and splits gradients cleanly") {
  const Tensor z(2, 3, {1, 2, 3, 4, 5, 6});
  const Tensor e(2, 2, {0, 0, 0, 0});
  const Tensor zc = condition(z, e);
  CHECK(zc.cols() == 5);
  CHECK(zc.at(0, 3) == 0.0);
  CHECK(zc.at(1, 4) == 0.0);
  CHECK_THROWS_AS(condition(z, Tensor(3, 2, std::vector<double>(6, 0.0))),
                  std::invalid_argument);

  auto g = Graph::create();
  const Tensor zl = g->leaf(z);
  const Tensor el = g->leaf(e);
  // Weight the two halves differently so the split is visible in gradients.
  const Tensor cat = condition(zl, el);
  const Tensor w(5, 1, {1, 1, 1, 7, 7});
  const Tensor loss = sum(matmul(cat, w));
  const auto gs = grad(loss, {zl, el});
  for (double v : gs[0].values()) CHECK(v == 1.0);
  for (double v : gs[1].values()) CHECK(v == 7.0);
}

TEST_CASE("clone yields equal values in distinct buffers") {
  Dims dims;
  dims.data_dim = 2;
  dims.num_classes = 3;
  ModelBundle b = build_bundle(Algorithm::cgan, dims, 9);
  ModelBundle c = clone_bundle(b);
  CHECK(c.generator.params.params[0].values() == b.generator.params.params[0].values());
  CHECK(c.g_embedding->values() == b.g_embedding->values());
  CHECK(c.generator.params.params[0].values().data() !=
        b.generator.params.params[0].values().data());
}

TEST_CASE("algorithm names round trip") {
  for (Algorithm a : all_algorithms()) {
    CHECK(parse_algorithm(algorithm_name(a)) == a);
  }
  CHECK_THROWS_AS(parse_algorithm("nope"), std::invalid_argument);
  CHECK(is_wgan_family(Algorithm::wgan_clip));
  CHECK(is_wgan_family(Algorithm::wgan_gp));
  CHECK_FALSE(is_wgan_family(Algorithm::hinge));
}
