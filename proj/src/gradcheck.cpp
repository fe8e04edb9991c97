#include "ganlab/gradcheck.hpp"

#include <chrono>
#include <cmath>
#include <utility>

#include "ganlab/losses.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

bool allclose(double a, double b, double rtol, double atol) {
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

namespace {

struct CaseShape {
  int ar, ac;
  int br = 0, bc = 0;  // second operand when binary
};

// Uniform in [lo, hi).
double unif(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

// Keep piecewise-linear ops away from their kink so the central difference
// stays on one side.
double away_from(Rng& rng, double kink) {
  double x = rng.normal();
  while (std::abs(x - kink) < 1e-3) x = rng.normal();
  return x;
}

std::vector<double> fill(Rng& rng, int n, OpKind kind, double kink) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) {
    switch (kind) {
      case OpKind::log:
      case OpKind::sqrt: x = unif(rng, 0.3, 2.5); break;
      case OpKind::row_l2_norm: x = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * unif(rng, 0.2, 1.5); break;
      case OpKind::abs:
      case OpKind::relu:
      case OpKind::leaky_relu:
      case OpKind::max_with: x = away_from(rng, kink); break;
      default: x = rng.normal();
    }
  }
  return v;
}

bool is_binary(OpKind k) {
  return k == OpKind::add || k == OpKind::sub || k == OpKind::mul || k == OpKind::matmul ||
         k == OpKind::concat;
}

struct CheckOutcome {
  bool pass = true;
  double worst = 0.0;
};

// Compare autodiff gradients of f = sum(proj * op(inputs)) against finite
// differences over every input entry.
CheckOutcome run_case(OpKind kind, const std::vector<std::vector<double>>& input_vals,
                      const std::vector<CaseShape>& shapes, const OpAttrs& attrs,
                      const std::vector<double>& proj, double rtol, double atol) {
  auto eval = [&](const std::vector<std::vector<double>>& vals, bool attach,
                  std::vector<Tensor>* leaves) {
    auto g = Graph::create();
    std::vector<Tensor> ins;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const int r = i == 0 ? shapes[0].ar : shapes[0].br;
      const int c = i == 0 ? shapes[0].ac : shapes[0].bc;
      Tensor t(r, c, vals[i]);
      if (attach) t = g->leaf(t);
      ins.push_back(t);
    }
    if (leaves) *leaves = ins;
    const Tensor out = apply(kind, ins, attrs);
    return sum(mul(out, Tensor(out.rows(), out.cols(), proj)));
  };

  std::vector<Tensor> leaves;
  const Tensor loss = eval(input_vals, true, &leaves);
  const std::vector<Tensor> grads = grad(loss, leaves);

  CheckOutcome out;
  for (std::size_t i = 0; i < input_vals.size(); ++i) {
    auto f = [&](const std::vector<double>& x) {
      std::vector<std::vector<double>> vals = input_vals;
      vals[i] = x;
      return eval(vals, false, nullptr).item();
    };
    const std::vector<double> fd = finite_diff(f, input_vals[i]);
    for (std::size_t j = 0; j < fd.size(); ++j) {
      const double ad = grads[i].values()[j];
      const double err = std::abs(ad - fd[j]) / (atol + rtol * std::max(std::abs(ad), std::abs(fd[j])));
      out.worst = std::max(out.worst, err);
      if (!allclose(ad, fd[j], rtol, atol)) out.pass = false;
    }
  }
  return out;
}

}  // namespace

GradCheckReport gradcheck_ops(int cases_per_op, std::uint64_t seed, double rtol, double atol) {
  const auto t0 = std::chrono::steady_clock::now();
  GradCheckReport report;
  Rng root(seed);
  for (OpKind kind : all_op_kinds()) {
    Rng rng = root.split(static_cast<std::uint64_t>(kind));
    GradCheckCase c;
    c.name = op_name(kind);
    for (int k = 0; k < cases_per_op; ++k) {
      CaseShape s;
      s.ar = 1 + rng.uniform_int(4);
      s.ac = 1 + rng.uniform_int(4);
      OpAttrs attrs;
      double kink = 0.0;
      switch (kind) {
        case OpKind::scale: attrs.c = unif(rng, -2.0, 2.0); break;
        case OpKind::leaky_relu: attrs.c = unif(rng, 0.05, 0.5); break;
        case OpKind::max_with: attrs.c = unif(rng, -0.5, 0.5); kink = attrs.c; break;
        case OpKind::log_softmax: attrs.axis = rng.uniform_int(2); break;
        default: break;
      }
      std::vector<std::vector<double>> vals;
      if (is_binary(kind)) {
        if (kind == OpKind::matmul) {
          s.br = s.ac;
          s.bc = 1 + rng.uniform_int(4);
        } else if (kind == OpKind::concat) {
          attrs.axis = rng.uniform_int(2);
          if (attrs.axis == 1) {
            s.br = s.ar;
            s.bc = 1 + rng.uniform_int(4);
          } else {
            s.br = 1 + rng.uniform_int(4);
            s.bc = s.ac;
          }
        } else {
          // Exercise full shape, row broadcast, and scalar broadcast.
          const int mode = rng.uniform_int(3);
          if (mode == 0) {
            s.br = s.ar;
            s.bc = s.ac;
          } else if (mode == 1) {
            s.br = 1;
            s.bc = s.ac;
          } else {
            s.br = 1;
            s.bc = 1;
          }
          if (rng.uniform_int(2) == 0) {
            std::swap(s.ar, s.br);
            std::swap(s.ac, s.bc);
          }
        }
        vals.push_back(fill(rng, s.ar * s.ac, kind, kink));
        vals.push_back(fill(rng, s.br * s.bc, kind, kink));
      } else if (kind == OpKind::select_rows) {
        const int n_sel = 1 + rng.uniform_int(5);
        attrs.rows.resize(static_cast<std::size_t>(n_sel));
        for (int& idx : attrs.rows) idx = rng.uniform_int(s.ar);
        vals.push_back(fill(rng, s.ar * s.ac, kind, kink));
      } else {
        vals.push_back(fill(rng, s.ar * s.ac, kind, kink));
      }

      // Output shape for the projection vector.
      std::vector<CaseShape> shapes = {s};
      std::vector<Tensor> probe;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const int r = i == 0 ? s.ar : s.br;
        const int cc = i == 0 ? s.ac : s.bc;
        probe.emplace_back(r, cc, vals[i]);
      }
      const Tensor shape_probe = apply(kind, probe, attrs);
      std::vector<double> proj(shape_probe.size());
      for (double& p : proj) p = unif(rng, -1.0, 1.0);

      const CheckOutcome got = run_case(kind, vals, shapes, attrs, proj, rtol, atol);
      c.worst_err = std::max(c.worst_err, got.worst);
      if (!got.pass) c.pass = false;
      ++c.cases;
    }
    if (!c.pass) report.all_pass = false;
    report.cases.push_back(std::move(c));
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

GradCheckReport gradcheck_losses(int cases_per_loss, std::uint64_t seed, double rtol,
                                 double atol) {
  namespace L = ganlab::losses;
  const auto t0 = std::chrono::steady_clock::now();
  GradCheckReport report;
  Rng root(seed);

  using Builder = std::function<Tensor(const std::vector<std::vector<double>>&,
                                       std::vector<Tensor>*)>;

  // Autodiff gradients of the scalar the builder produces, for every input
  // block, against central differences over that block's entries.
  auto compare = [&](const std::vector<std::vector<double>>& vals, const Builder& build,
                     double rt, double fd_eps) {
    std::vector<Tensor> leaves;
    const Tensor loss_t = build(vals, &leaves);
    const std::vector<Tensor> grads = grad(loss_t, leaves);
    CheckOutcome out;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      auto f = [&](const std::vector<double>& x) {
        std::vector<std::vector<double>> v2 = vals;
        v2[i] = x;
        return build(v2, nullptr).item();
      };
      const std::vector<double> fd = finite_diff(f, vals[i], fd_eps);
      for (std::size_t j = 0; j < fd.size(); ++j) {
        const double ad = grads[i].values()[j];
        const double err =
            std::abs(ad - fd[j]) / (atol + rt * std::max(std::abs(ad), std::abs(fd[j])));
        out.worst = std::max(out.worst, err);
        if (!allclose(ad, fd[j], rt, atol)) out.pass = false;
      }
    }
    return out;
  };

  auto probs = [&](Rng& rng, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = unif(rng, 0.05, 0.95);
    return v;
  };
  auto normals = [&](Rng& rng, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = rng.normal();
    return v;
  };
  auto energies = [&](Rng& rng, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = unif(rng, 0.1, 2.0);
    return v;
  };
  // Adds a per-entry offset of magnitude >= 0.05 so |a - b| terms stay away
  // from the kink under the finite-difference probe.
  auto offset_from = [&](Rng& rng, const std::vector<double>& base) {
    std::vector<double> v = base;
    for (double& x : v) x += (rng.uniform01() < 0.5 ? -1.0 : 1.0) * unif(rng, 0.05, 1.0);
    return v;
  };

  struct Entry {
    std::string name;
    std::function<CheckOutcome(Rng&, int)> run_one;
  };
  std::vector<Entry> entries;

  entries.push_back({"d_minimax", [&](Rng& rng, int k) {
    const int n = 1 + rng.uniform_int(4), m = 1 + rng.uniform_int(4);
    L::SmoothingConfig sc;
    if (k % 2 == 1) sc = {0.9, 0.1};
    const std::vector<std::vector<double>> vals = {probs(rng, n), probs(rng, m)};
    return compare(vals,
                   [n, m, sc](const std::vector<std::vector<double>>& v,
                              std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor pr = g->leaf(Tensor(n, 1, v[0]));
                     const Tensor pf = g->leaf(Tensor(m, 1, v[1]));
                     if (leaves) *leaves = {pr, pf};
                     return L::d_loss_minimax(pr, pf, sc);
                   },
                   rtol, 1e-6);
  }});

  for (const auto obj : {L::GeneratorObjective::saturating, L::GeneratorObjective::nonsaturating}) {
    const std::string name =
        obj == L::GeneratorObjective::saturating ? "g_saturating" : "g_nonsaturating";
    entries.push_back({name, [&, obj](Rng& rng, int) {
      const int n = 1 + rng.uniform_int(5);
      const std::vector<std::vector<double>> vals = {probs(rng, n)};
      return compare(vals,
                     [n, obj](const std::vector<std::vector<double>>& v,
                              std::vector<Tensor>* leaves) {
                       auto g = Graph::create();
                       const Tensor pf = g->leaf(Tensor(n, 1, v[0]));
                       if (leaves) *leaves = {pf};
                       return L::g_loss(obj, pf);
                     },
                     rtol, 1e-6);
    }});
  }

  entries.push_back({"wgan_d", [&](Rng& rng, int) {
    const int n = 1 + rng.uniform_int(4), m = 1 + rng.uniform_int(4);
    const std::vector<std::vector<double>> vals = {normals(rng, n), normals(rng, m)};
    return compare(vals,
                   [n, m](const std::vector<std::vector<double>>& v,
                          std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor sr = g->leaf(Tensor(n, 1, v[0]));
                     const Tensor sf = g->leaf(Tensor(m, 1, v[1]));
                     if (leaves) *leaves = {sr, sf};
                     return L::wgan_losses(sr, sf).d_loss;
                   },
                   rtol, 1e-6);
  }});
  entries.push_back({"wgan_g", [&](Rng& rng, int) {
    const int m = 1 + rng.uniform_int(5);
    const std::vector<std::vector<double>> vals = {normals(rng, m)};
    return compare(vals,
                   [m](const std::vector<std::vector<double>>& v, std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor sf = g->leaf(Tensor(m, 1, v[0]));
                     if (leaves) *leaves = {sf};
                     return L::wgan_losses(sf, sf).g_loss;
                   },
                   rtol, 1e-6);
  }});

  entries.push_back({"lsgan_d", [&](Rng& rng, int) {
    const int n = 1 + rng.uniform_int(4), m = 1 + rng.uniform_int(4);
    const std::vector<std::vector<double>> vals = {normals(rng, n), normals(rng, m)};
    return compare(vals,
                   [n, m](const std::vector<std::vector<double>>& v,
                          std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor vr = g->leaf(Tensor(n, 1, v[0]));
                     const Tensor vf = g->leaf(Tensor(m, 1, v[1]));
                     if (leaves) *leaves = {vr, vf};
                     return L::lsgan_losses(vr, vf).d_loss;
                   },
                   rtol, 1e-6);
  }});
  entries.push_back({"lsgan_g", [&](Rng& rng, int) {
    const int m = 1 + rng.uniform_int(5);
    const std::vector<std::vector<double>> vals = {normals(rng, m)};
    return compare(vals,
                   [m](const std::vector<std::vector<double>>& v, std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor vf = g->leaf(Tensor(m, 1, v[0]));
                     if (leaves) *leaves = {vf};
                     return L::lsgan_losses(vf, vf).g_loss;
                   },
                   rtol, 1e-6);
  }});

  entries.push_back({"hinge_d", [&](Rng& rng, int) {
    const int n = 1 + rng.uniform_int(4), m = 1 + rng.uniform_int(4);
    std::vector<double> sr(static_cast<std::size_t>(n)), sf(static_cast<std::size_t>(m));
    for (double& x : sr) x = away_from(rng, 1.0);
    for (double& x : sf) x = away_from(rng, -1.0);
    const std::vector<std::vector<double>> vals = {sr, sf};
    return compare(vals,
                   [n, m](const std::vector<std::vector<double>>& v,
                          std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor tr = g->leaf(Tensor(n, 1, v[0]));
                     const Tensor tf = g->leaf(Tensor(m, 1, v[1]));
                     if (leaves) *leaves = {tr, tf};
                     return L::hinge_losses(tr, tf).d_loss;
                   },
                   rtol, 1e-6);
  }});
  entries.push_back({"hinge_g", [&](Rng& rng, int) {
    const int m = 1 + rng.uniform_int(5);
    const std::vector<std::vector<double>> vals = {normals(rng, m)};
    return compare(vals,
                   [m](const std::vector<std::vector<double>>& v, std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor sf = g->leaf(Tensor(m, 1, v[0]));
                     if (leaves) *leaves = {sf};
                     return L::hinge_losses(sf, sf).g_loss;
                   },
                   rtol, 1e-6);
  }});

  entries.push_back({"ebgan_d", [&](Rng& rng, int) {
    const int n = 1 + rng.uniform_int(4), m = 1 + rng.uniform_int(4);
    const std::vector<std::vector<double>> vals = {energies(rng, n), energies(rng, m)};
    return compare(vals,
                   [n, m](const std::vector<std::vector<double>>& v,
                          std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor er = g->leaf(Tensor(n, 1, v[0]));
                     const Tensor ef = g->leaf(Tensor(m, 1, v[1]));
                     if (leaves) *leaves = {er, ef};
                     return L::ebgan_losses(er, ef).d_loss;
                   },
                   rtol, 1e-6);
  }});
  entries.push_back({"ebgan_g", [&](Rng& rng, int) {
    const int m = 1 + rng.uniform_int(5);
    const std::vector<std::vector<double>> vals = {energies(rng, m)};
    return compare(vals,
                   [m](const std::vector<std::vector<double>>& v, std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor ef = g->leaf(Tensor(m, 1, v[0]));
                     if (leaves) *leaves = {ef};
                     return L::ebgan_losses(ef, ef).g_loss;
                   },
                   rtol, 1e-6);
  }});

  entries.push_back({"infogan_aux", [&](Rng& rng, int) {
    const int n = 1 + rng.uniform_int(4);
    const int k = 2 + rng.uniform_int(4);
    std::vector<int> codes(static_cast<std::size_t>(n));
    for (int& c : codes) c = rng.uniform_int(k);
    const std::vector<std::vector<double>> vals = {normals(rng, n * k)};
    return compare(vals,
                   [n, k, codes](const std::vector<std::vector<double>>& v,
                                 std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor logits = g->leaf(Tensor(n, k, v[0]));
                     if (leaves) *leaves = {logits};
                     return L::infogan_aux_loss(logits, codes);
                   },
                   rtol, 1e-6);
  }});

  entries.push_back({"pix2pix_g", [&](Rng& rng, int) {
    const int n = 1 + rng.uniform_int(3), d = 1 + rng.uniform_int(3);
    const double lam = unif(rng, 0.0, 3.0);
    const std::vector<double> y = normals(rng, n * d);
    const std::vector<std::vector<double>> vals = {offset_from(rng, y), y};
    return compare(vals,
                   [n, d, lam](const std::vector<std::vector<double>>& v,
                               std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor y_hat = g->leaf(Tensor(n, d, v[0]));
                     const Tensor y_t = g->leaf(Tensor(n, d, v[1]));
                     if (leaves) *leaves = {y_hat, y_t};
                     const Tensor adv = scale(mean(square(y_hat)), 0.5);
                     return L::pix2pix_g_loss(adv, y_hat, y_t, lam);
                   },
                   rtol, 1e-6);
  }});

  entries.push_back({"cycle", [&](Rng& rng, int) {
    const int n = 1 + rng.uniform_int(3), d = 1 + rng.uniform_int(3);
    const std::vector<double> x = normals(rng, n * d);
    const std::vector<double> y = normals(rng, n * d);
    const std::vector<std::vector<double>> vals = {x, offset_from(rng, x), y, offset_from(rng, y)};
    return compare(vals,
                   [n, d](const std::vector<std::vector<double>>& v,
                          std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor xt = g->leaf(Tensor(n, d, v[0]));
                     const Tensor xr = g->leaf(Tensor(n, d, v[1]));
                     const Tensor yt = g->leaf(Tensor(n, d, v[2]));
                     const Tensor yr = g->leaf(Tensor(n, d, v[3]));
                     if (leaves) *leaves = {xt, xr, yt, yr};
                     return L::cycle_loss(xt, xr, yt, yr);
                   },
                   rtol, 1e-6);
  }});

  entries.push_back({"feature_matching", [&](Rng& rng, int) {
    const int n = 1 + rng.uniform_int(4), m = 1 + rng.uniform_int(4);
    const int h = 1 + rng.uniform_int(4);
    const std::vector<std::vector<double>> vals = {normals(rng, n * h), normals(rng, m * h)};
    return compare(vals,
                   [n, m, h](const std::vector<std::vector<double>>& v,
                             std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor fr = g->leaf(Tensor(n, h, v[0]));
                     const Tensor ff = g->leaf(Tensor(m, h, v[1]));
                     if (leaves) *leaves = {fr, ff};
                     return L::feature_matching_loss(fr, ff);
                   },
                   rtol, 1e-6);
  }});

  entries.push_back({"gradient_penalty", [&](Rng& rng, int) {
    const int d = 2 + rng.uniform_int(2);
    const int n = 2 + rng.uniform_int(3);
    const int h = 4;
    const Tensor real_t(n, d, normals(rng, n * d));
    const Tensor fake_t(n, d, normals(rng, n * d));
    const std::uint64_t eps_seed = rng.next_u64();
    std::vector<double> w1(static_cast<std::size_t>(h * d)), b1(static_cast<std::size_t>(h)),
        w2(static_cast<std::size_t>(h)), b2(1);
    for (double& x : w1) x = 0.7 * rng.normal();
    for (double& x : b1) x = 0.3 * rng.normal();
    for (double& x : w2) x = 0.7 * rng.normal();
    for (double& x : b2) x = 0.3 * rng.normal();
    const std::vector<std::vector<double>> vals = {w1, b1, w2, b2};
    // Double-backprop path: looser tolerance and a wider probe step.
    return compare(vals,
                   [n, d, h, real_t, fake_t, eps_seed](
                       const std::vector<std::vector<double>>& v, std::vector<Tensor>* leaves) {
                     auto g = Graph::create();
                     const Tensor W1 = g->leaf(Tensor(h, d, v[0]));
                     const Tensor B1 = g->leaf(Tensor(1, h, v[1]));
                     const Tensor W2 = g->leaf(Tensor(1, h, v[2]));
                     const Tensor B2 = g->leaf(Tensor(1, 1, v[3]));
                     if (leaves) *leaves = {W1, B1, W2, B2};
                     auto critic = [&](const Tensor& x) {
                       return add(matmul(tanh(add(matmul(x, transpose(W1)), B1)), transpose(W2)),
                                  B2);
                     };
                     Rng eps_rng(eps_seed);
                     return L::gradient_penalty(g, critic, real_t, fake_t, 10.0, eps_rng);
                   },
                   std::max(rtol, 1e-4), 1e-5);
  }});

  for (Entry& e : entries) {
    Rng rng = root.split(std::hash<std::string>{}(e.name));
    GradCheckCase c;
    c.name = e.name;
    for (int k = 0; k < cases_per_loss; ++k) {
      const CheckOutcome got = e.run_one(rng, k);
      c.worst_err = std::max(c.worst_err, got.worst);
      if (!got.pass) c.pass = false;
      ++c.cases;
    }
    if (!c.pass) report.all_pass = false;
    report.cases.push_back(std::move(c));
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

bool gradcheck_double_backprop(std::uint64_t seed, double rtol, double atol, double* worst_err) {
  Rng rng(seed);
  const int in_dim = 3, hidden = 6;
  std::vector<double> w1(hidden * in_dim), b1(hidden), w2(hidden), b2(1), xv(in_dim);
  for (double& v : w1) v = 0.6 * rng.normal();
  for (double& v : b1) v = 0.3 * rng.normal();
  for (double& v : w2) v = 0.6 * rng.normal();
  for (double& v : b2) v = 0.3 * rng.normal();
  for (double& v : xv) v = rng.normal();

  // h(theta) = || d D(x) / d x ||^2 for D(x) = W2 tanh(W1 x + b1) + b2.
  auto h_and_grads = [&](const std::vector<double>& theta, bool want_grads,
                         std::vector<double>* grads_out) {
    auto g = Graph::create();
    std::size_t o = 0;
    auto take = [&](int r, int c) {
      const std::size_t n = static_cast<std::size_t>(r) * static_cast<std::size_t>(c);
      const auto first = theta.begin() + static_cast<std::ptrdiff_t>(o);
      o += n;
      return g->leaf(Tensor(r, c, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n))));
    };
    const Tensor W1 = take(hidden, in_dim);
    const Tensor B1 = take(1, hidden);
    const Tensor W2 = take(1, hidden);
    const Tensor B2 = take(1, 1);
    const Tensor x = g->leaf(Tensor(1, in_dim, xv));

    const Tensor hid = tanh(add(matmul(x, transpose(W1)), B1));
    const Tensor y = add(matmul(hid, transpose(W2)), B2);
    const Tensor gx = grad(y, {x}, /*create_graph=*/true)[0];
    const Tensor h = sum(square(gx));
    if (want_grads) {
      const auto gs = grad(h, {W1, B1, W2, B2});
      grads_out->clear();
      for (const Tensor& t : gs)
        grads_out->insert(grads_out->end(), t.values().begin(), t.values().end());
    }
    return h.item();
  };

  std::vector<double> theta;
  theta.insert(theta.end(), w1.begin(), w1.end());
  theta.insert(theta.end(), b1.begin(), b1.end());
  theta.insert(theta.end(), w2.begin(), w2.end());
  theta.insert(theta.end(), b2.begin(), b2.end());

  std::vector<double> ad;
  h_and_grads(theta, true, &ad);
  const std::vector<double> fd = finite_diff(
      [&](const std::vector<double>& t) { return h_and_grads(t, false, nullptr); }, theta, 1e-5);

  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    worst = std::max(worst, std::abs(ad[i] - fd[i]) /
                                (atol + rtol * std::max(std::abs(ad[i]), std::abs(fd[i]))));
    if (!allclose(ad[i], fd[i], rtol, atol)) ok = false;
  }
  if (worst_err) *worst_err = worst;
  return ok;
}

}  // namespace ganlab
