#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/autodiff.hpp"
#include "ganlab/gradcheck.hpp"
#include "ganlab/rng.hpp"

using namespace ganlab;

TEST_CASE("matmul forward") {
  const Tensor a(2, 2, {1, 2, 3, 4});
  const Tensor b(2, 1, {5, 6});
  const Tensor c = matmul(a, b);
  CHECK(c.rows() == 2);
  CHECK(c.cols() == 1);
  CHECK(c.at(0, 0) == doctest::Approx(17));
  CHECK(c.at(1, 0) == doctest::Approx(39));
}

TEST_CASE("concat axis 1") {
  const Tensor c = concat(Tensor::row({1, 2}), Tensor::row({3}), 1);
  CHECK(c.rows() == 1);
  CHECK(c.cols() == 3);
  CHECK(c.values() == std::vector<double>{1, 2, 3});
}

TEST_CASE("row broadcast add") {
  const Tensor batch(2, 3, {1, 2, 3, 4, 5, 6});
  const Tensor bias = Tensor::row({10, 20, 30});
  const Tensor out = add(batch, bias);
  CHECK(out.at(0, 0) == 11);
  CHECK(out.at(1, 2) == 36);
  CHECK_THROWS_AS(add(Tensor(2, 3), Tensor(3, 2)), std::invalid_argument);
}

TEST_CASE("grad of mean(square(x))") {
  auto g = Graph::create();
  const Tensor x = g->leaf(Tensor::row({1, 2, 3}));
  const Tensor y = mean(square(x));
  const auto gs = grad(y, {x});
  CHECK(gs[0].values()[0] == doctest::Approx(2.0 / 3));
  CHECK(gs[0].values()[1] == doctest::Approx(4.0 / 3));
  CHECK(gs[0].values()[2] == doctest::Approx(2.0));
}

TEST_CASE("grad of mean(leaky_relu(x, 0.2))") {
  auto g = Graph::create();
  const Tensor x = g->leaf(Tensor::row({-1, 1}));
  const auto gs = grad(mean(leaky_relu(x, 0.2)), {x});
  CHECK(gs[0].values()[0] == doctest::Approx(0.1));
  CHECK(gs[0].values()[1] == doctest::Approx(0.5));
}

TEST_CASE("log rejects non-positive input") {
  CHECK_THROWS_AS(log(Tensor::row({1.0, 0.0})), NumericDomainError);
  CHECK_THROWS_AS(log(Tensor::row({-2.0})), NumericDomainError);
  CHECK_THROWS_AS(sqrt(Tensor::row({-1.0})), NumericDomainError);
}

TEST_CASE("select_rows gradient hits only the selected rows") {
  auto g = Graph::create();
  const Tensor table = g->leaf(Tensor(4, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}));
  const auto gs = grad(sum(select_rows(table, {2})), {table});
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) CHECK(gs[0].at(r, c) == (r == 2 ? 1.0 : 0.0));

  // Repeated indices accumulate.
  auto g2 = Graph::create();
  const Tensor t2 = g2->leaf(Tensor(3, 2, {0, 0, 0, 0, 0, 0}));
  const auto gs2 = grad(sum(select_rows(t2, {1, 1})), {t2});
  CHECK(gs2[0].at(1, 0) == 2.0);
  CHECK(gs2[0].at(0, 0) == 0.0);
}

TEST_CASE("shared consumers accumulate gradients") {
  auto g = Graph::create();
  const Tensor x = g->leaf(Tensor::row({1.5, -2.0}));
  // y = sum(x*x + x), dy/dx = 2x + 1
  const auto gs = grad(sum(add(mul(x, x), x)), {x});
  CHECK(gs[0].values()[0] == doctest::Approx(4.0));
  CHECK(gs[0].values()[1] == doctest::Approx(-3.0));
}

TEST_CASE("gradient for an unused wrt tensor is zero") {
  auto g = Graph::create();
  const Tensor x = g->leaf(Tensor::row({1.0}));
  const Tensor z = g->leaf(Tensor(2, 2, {1, 2, 3, 4}));
  const auto gs = grad(sum(square(x)), {x, z});
  CHECK(gs[1].rows() == 2);
  CHECK(gs[1].cols() == 2);
  for (double v : gs[1].values()) CHECK(v == 0.0);
}

TEST_CASE("grad requires a scalar attached output") {
  auto g = Graph::create();
  const Tensor x = g->leaf(Tensor::row({1.0, 2.0}));
  CHECK_THROWS_AS(grad(square(x), {x}), std::invalid_argument);
  const Tensor detached = Tensor::row({1.0});
  CHECK_THROWS_AS(grad(detached, {x}), std::invalid_argument);
}

TEST_CASE("forward replay is bit exact") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    auto g = Graph::create();
    std::vector<double> xv(12), wv(12);
    for (double& v : xv) v = rng.normal();
    for (double& v : wv) v = rng.normal();
    const Tensor x = g->leaf(Tensor(3, 4, xv));
    const Tensor w = g->leaf(Tensor(4, 3, wv));
    const Tensor y = mean(sigmoid(matmul(tanh(x), w)));
    CHECK(y.graph()->replay_matches());
    return y.item();
  };
  CHECK(run(7) == run(7));
  CHECK(run(7) != run(8));
}

TEST_CASE("second derivative through create_graph") {
  // f = sum(x^3): df/dx = 3x^2, d(sum(df/dx))/dx = 6x.
  auto g = Graph::create();
  const Tensor x = g->leaf(Tensor::row({0.5, -1.25, 2.0}));
  const Tensor f = sum(mul(mul(x, x), x));
  const Tensor gx = grad(f, {x}, /*create_graph=*/true)[0];
  CHECK(gx.attached());
  const Tensor gx2 = grad(sum(gx), {x})[0];
  for (int j = 0; j < 3; ++j) CHECK(gx2.values()[j] == doctest::Approx(6.0 * x.values()[j]));
}

TEST_CASE("double backprop through a tanh network matches finite differences") {
  double worst = 0.0;
  CHECK(gradcheck_double_backprop(11, 1e-4, 1e-8, &worst));
  CHECK(worst < 1.0);
}

TEST_CASE("finite difference sweep over every op") {
  const GradCheckReport report = gradcheck_ops(8, 1234);
  for (const auto& c : report.cases) {
    INFO(c.name, " worst scaled err ", c.worst_err);
    CHECK(c.pass);
  }
  CHECK(report.all_pass);
  CHECK(report.cases.size() == all_op_kinds().size());
}

TEST_CASE("log_softmax rows sum to one after exp") {
  const Tensor x(2, 3, {1, 2, 3, -1, 0, 1});
  const Tensor ls = log_softmax(x, 1);
  for (int i = 0; i < 2; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += std::exp(ls.at(i, j));
    CHECK(s == doctest::Approx(1.0));
  }
}

TEST_CASE("row_l2_norm") {
  const Tensor x(2, 2, {3, 4, 0, 5});
  const Tensor n = row_l2_norm(x);
  CHECK(n.at(0, 0) == doctest::Approx(5.0));
  CHECK(n.at(1, 0) == doctest::Approx(5.0));
}

TEST_CASE("rng streams are deterministic and splittable") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42);
  Rng s1 = c.split(1), s2 = c.split(2);
  CHECK(s1.next_u64() != s2.next_u64());
  // Splitting does not disturb the parent stream.
  CHECK(c.next_u64() == Rng(42).next_u64());
}

TEST_CASE("rng normal moments") {
  Rng rng(5);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  const double m = s / n;
  CHECK(std::abs(m) < 0.01);
  CHECK(std::abs(s2 / n - m * m - 1.0) < 0.02);
}
