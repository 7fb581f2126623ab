#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fasisac/adam.hpp"
#include "fasisac/checkpoint.hpp"
#include "fasisac/errors.hpp"
#include "fasisac/mlp.hpp"
#include "fasisac/rng.hpp"

using namespace fasisac;

namespace {

// Scalar-loop forward pass, coded independently of Mlp::forward, used as a
// duplicate-implementation oracle.
std::vector<double> naive_forward(const Mlp& net, const std::vector<double>& x,
                                  const std::vector<double>& aux) {
  std::vector<double> act = x;
  const int n = net.num_layers();
  for (int l = 0; l < n; ++l) {
    if (l == 1 && net.aux_dim() > 0) {
      for (double a : aux) act.push_back(a);
    }
    const auto& w = net.weights()[l];
    const auto& b = net.biases()[l];
    std::vector<double> out(static_cast<std::size_t>(w.rows()));
    for (int r = 0; r < w.rows(); ++r) {
      double s = b(r);
      for (int c = 0; c < w.cols(); ++c) s += w(r, c) * act[static_cast<std::size_t>(c)];
      out[static_cast<std::size_t>(r)] = s;
    }
    if (l < n - 1) {
      for (double& v : out) v = v > 0.0 ? v : 0.0;
    } else if (net.output_activation() == OutputActivation::kTanhScaled) {
      for (double& v : out) v = net.output_scale() * std::tanh(v);
    }
    act = std::move(out);
  }
  return act;
}

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.normal();
  }
  return m;
}

void randomize(Mlp& net, Rng& rng) {
  for (auto& w : net.weights()) w = random_matrix(static_cast<int>(w.rows()), static_cast<int>(w.cols()), rng);
  for (auto& b : net.biases()) b = random_matrix(static_cast<int>(b.size()), 1, rng);
}

// Loss = sum of coeff .* forward(inputs); what backward differentiates when
// handed coeff as output_grad.
double weighted_output_sum(const Mlp& net, const Eigen::MatrixXd& inputs,
                           const Eigen::MatrixXd* aux, const Eigen::MatrixXd& coeff) {
  return (coeff.array() * net.forward(inputs, aux).array()).sum();
}

struct FdReport {
  double max_rel_err = 0.0;
};

double rel_err(double analytic, double fd) {
  const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-6});
  return std::abs(analytic - fd) / denom;
}

// Central finite differences over every parameter, plus input and aux
// gradients, against one backward() call.
FdReport finite_difference_check(Mlp net, const Eigen::MatrixXd& inputs,
                                 const Eigen::MatrixXd* aux,
                                 const Eigen::MatrixXd& coeff) {
  constexpr double kH = 1e-5;
  ForwardCache cache;
  net.forward(inputs, aux, &cache);
  const MlpGradients grads = net.backward(cache, coeff);

  FdReport report;
  for (int l = 0; l < net.num_layers(); ++l) {
    auto& w = net.weights()[l];
    for (int idx = 0; idx < w.size(); ++idx) {
      const double saved = w.data()[idx];
      w.data()[idx] = saved + kH;
      const double up = weighted_output_sum(net, inputs, aux, coeff);
      w.data()[idx] = saved - kH;
      const double down = weighted_output_sum(net, inputs, aux, coeff);
      w.data()[idx] = saved;
      const double fd = (up - down) / (2.0 * kH);
      report.max_rel_err = std::max(report.max_rel_err, rel_err(grads.weights[l].data()[idx], fd));
    }
    auto& b = net.biases()[l];
    for (int idx = 0; idx < b.size(); ++idx) {
      const double saved = b(idx);
      b(idx) = saved + kH;
      const double up = weighted_output_sum(net, inputs, aux, coeff);
      b(idx) = saved - kH;
      const double down = weighted_output_sum(net, inputs, aux, coeff);
      b(idx) = saved;
      const double fd = (up - down) / (2.0 * kH);
      report.max_rel_err = std::max(report.max_rel_err, rel_err(grads.biases[l](idx), fd));
    }
  }

  Eigen::MatrixXd in = inputs;
  for (int idx = 0; idx < in.size(); ++idx) {
    const double saved = in.data()[idx];
    in.data()[idx] = saved + kH;
    const double up = weighted_output_sum(net, in, aux, coeff);
    in.data()[idx] = saved - kH;
    const double down = weighted_output_sum(net, in, aux, coeff);
    in.data()[idx] = saved;
    const double fd = (up - down) / (2.0 * kH);
    report.max_rel_err = std::max(report.max_rel_err, rel_err(grads.input.data()[idx], fd));
  }
  if (aux != nullptr) {
    Eigen::MatrixXd a = *aux;
    for (int idx = 0; idx < a.size(); ++idx) {
      const double saved = a.data()[idx];
      a.data()[idx] = saved + kH;
      const double up = weighted_output_sum(net, inputs, &a, coeff);
      a.data()[idx] = saved - kH;
      const double down = weighted_output_sum(net, inputs, &a, coeff);
      a.data()[idx] = saved;
      const double fd = (up - down) / (2.0 * kH);
      report.max_rel_err = std::max(report.max_rel_err, rel_err(grads.aux_input.data()[idx], fd));
    }
  }
  return report;
}

bool mlp_equal(const Mlp& a, const Mlp& b) {
  if (a.layer_dims() != b.layer_dims() || a.aux_dim() != b.aux_dim() ||
      a.output_activation() != b.output_activation() ||
      a.output_scale() != b.output_scale()) {
    return false;
  }
  for (int l = 0; l < a.num_layers(); ++l) {
    if (a.weights()[l] != b.weights()[l]) return false;
    if (a.biases()[l] != b.biases()[l]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("forward: 1->1 linear affine map") {
  Mlp net({1, 1}, OutputActivation::kLinear);
  net.weights()[0](0, 0) = 2.0;
  net.biases()[0](0) = 1.0;
  Eigen::VectorXd x(1);
  x << 3.0;
  CHECK(net.forward_vec(x)(0) == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("forward: zero parameters and scaled tanh give zero output") {
  Mlp net({4, 6, 3}, OutputActivation::kTanhScaled, 2.5);
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(4, 5, 1.7);
  CHECK(net.forward(x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward matches an independently coded scalar-loop pass") {
  Rng rng(404);
  Mlp plain({5, 8, 7, 3}, OutputActivation::kTanhScaled, 2.0);
  plain.init_params(rng);
  Mlp critic({6, 10, 9, 1}, OutputActivation::kLinear, 1.0, 4);
  critic.init_params(rng);

  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x5 = random_matrix(5, 1, rng);
    std::vector<double> xs(x5.data(), x5.data() + 5);
    const auto want = naive_forward(plain, xs, {});
    const Eigen::VectorXd got = plain.forward_vec(x5);
    for (int i = 0; i < 3; ++i) CHECK(got(i) == doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-12));

    Eigen::VectorXd x6 = random_matrix(6, 1, rng);
    Eigen::VectorXd a4 = random_matrix(4, 1, rng);
    std::vector<double> x6s(x6.data(), x6.data() + 6);
    std::vector<double> a4s(a4.data(), a4.data() + 4);
    const auto want_c = naive_forward(critic, x6s, a4s);
    const Eigen::VectorXd got_c = critic.forward_vec(x6, &a4);
    CHECK(got_c(0) == doctest::Approx(want_c[0]).epsilon(1e-12));
  }
}

TEST_CASE("forward: batched evaluation equals per-column evaluation") {
  Rng rng(77);
  Mlp critic({6, 10, 9, 1}, OutputActivation::kLinear, 1.0, 4);
  critic.init_params(rng);
  Eigen::MatrixXd xs = random_matrix(6, 9, rng);
  Eigen::MatrixXd as = random_matrix(4, 9, rng);
  Eigen::MatrixXd batch = critic.forward(xs, &as);
  for (int c = 0; c < 9; ++c) {
    Eigen::VectorXd x = xs.col(c);
    Eigen::VectorXd a = as.col(c);
    CHECK(batch(0, c) == doctest::Approx(critic.forward_vec(x, &a)(0)).epsilon(1e-14));
  }
}

TEST_CASE("forward: shape errors") {
  Mlp critic({6, 10, 9, 1}, OutputActivation::kLinear, 1.0, 4);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 2);
  Eigen::MatrixXd bad_aux = Eigen::MatrixXd::Zero(3, 2);
  CHECK_THROWS_AS(critic.forward(x), ConfigError);           // aux missing
  CHECK_THROWS_AS(critic.forward(x, &bad_aux), ConfigError); // aux wrong dim
  Mlp plain({4, 3}, OutputActivation::kLinear);
  Eigen::MatrixXd wrong = Eigen::MatrixXd::Zero(5, 2);
  CHECK_THROWS_AS(plain.forward(wrong), ConfigError);
}

TEST_CASE("backward: linear 1->1 gradients in closed form") {
  Mlp net({1, 1}, OutputActivation::kLinear);
  net.weights()[0](0, 0) = -1.3;
  net.biases()[0](0) = 0.4;
  Eigen::MatrixXd x(1, 1);
  x << 3.5;
  ForwardCache cache;
  net.forward(x, nullptr, &cache);
  const auto grads = net.backward(cache, Eigen::MatrixXd::Ones(1, 1));
  CHECK(grads.weights[0](0, 0) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(grads.biases[0](0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(grads.input(0, 0) == doctest::Approx(-1.3).epsilon(1e-15));
}

TEST_CASE("backward: zero output gradient gives zero parameter gradients") {
  Rng rng(12);
  Mlp net({5, 8, 7, 3}, OutputActivation::kTanhScaled, 2.0);
  net.init_params(rng);
  Eigen::MatrixXd x = random_matrix(5, 4, rng);
  ForwardCache cache;
  net.forward(x, nullptr, &cache);
  const auto grads = net.backward(cache, Eigen::MatrixXd::Zero(3, 4));
  for (const auto& g : grads.weights) CHECK(g.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& g : grads.biases) CHECK(g.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.input.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward matches central finite differences on random nets") {
  Rng rng(2024);
  double worst = 0.0;
  for (int draw = 0; draw < 10; ++draw) {
    Mlp plain({5, 8, 7, 3}, OutputActivation::kTanhScaled, 2.0);
    plain.init_params(rng);
    Eigen::MatrixXd x = random_matrix(5, 3, rng);
    Eigen::MatrixXd coeff = random_matrix(3, 3, rng);
    worst = std::max(worst, finite_difference_check(plain, x, nullptr, coeff).max_rel_err);

    Mlp critic({6, 10, 9, 1}, OutputActivation::kLinear, 1.0, 4);
    critic.init_params(rng);
    Eigen::MatrixXd xs = random_matrix(6, 3, rng);
    Eigen::MatrixXd as = random_matrix(4, 3, rng);
    Eigen::MatrixXd c1 = random_matrix(1, 3, rng);
    worst = std::max(worst, finite_difference_check(critic, xs, &as, c1).max_rel_err);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("backward: cache/shape mismatch is rejected") {
  Rng rng(5);
  Mlp net({4, 6, 2}, OutputActivation::kLinear);
  net.init_params(rng);
  Eigen::MatrixXd x = random_matrix(4, 2, rng);
  ForwardCache cache;
  net.forward(x, nullptr, &cache);
  CHECK_THROWS_AS(net.backward(cache, Eigen::MatrixXd::Zero(2, 5)), ConfigError);
  CHECK_THROWS_AS(net.backward(ForwardCache{}, Eigen::MatrixXd::Zero(2, 2)), ConfigError);
}

TEST_CASE("adam: zero gradient from fresh state leaves parameters unchanged") {
  Rng rng(9);
  Mlp net({3, 5, 2}, OutputActivation::kLinear);
  net.init_params(rng);
  const Mlp before = net;
  AdamState st(net, 1e-3);
  adam_step(st, net, net.zero_gradients());
  CHECK(mlp_equal(net, before));
  CHECK(st.step_count == 1);
}

TEST_CASE("adam: first step has closed form -lr*g/(|g|+eps)") {
  Mlp net({1, 1}, OutputActivation::kLinear);
  net.weights()[0](0, 0) = 0.7;
  net.biases()[0](0) = -0.2;
  AdamState st(net, 1e-2);
  MlpGradients g = net.zero_gradients();
  g.weights[0](0, 0) = 3.0;
  g.biases[0](0) = -0.5;
  adam_step(st, net, g);
  // Bias correction cancels on step one: m_hat = g, v_hat = g^2.
  CHECK(net.weights()[0](0, 0) ==
        doctest::Approx(0.7 - 1e-2 * 3.0 / (3.0 + 1e-8)).epsilon(1e-14));
  CHECK(net.biases()[0](0) ==
        doctest::Approx(-0.2 + 1e-2 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
}

TEST_CASE("adam: identical state and gradients give identical updates") {
  Rng rng(31);
  Mlp net_a({4, 6, 2}, OutputActivation::kTanhScaled, 1.5);
  net_a.init_params(rng);
  Mlp net_b = net_a;
  AdamState st_a(net_a, 1e-3);
  AdamState st_b(net_b, 1e-3);
  Eigen::MatrixXd x = random_matrix(4, 5, rng);
  Eigen::MatrixXd coeff = random_matrix(2, 5, rng);
  for (int k = 0; k < 7; ++k) {
    ForwardCache ca, cb;
    net_a.forward(x, nullptr, &ca);
    net_b.forward(x, nullptr, &cb);
    adam_step(st_a, net_a, net_a.backward(ca, coeff));
    adam_step(st_b, net_b, net_b.backward(cb, coeff));
  }
  CHECK(mlp_equal(net_a, net_b));
}

TEST_CASE("soft_update: single entries and fixed points") {
  Mlp target({1, 1}, OutputActivation::kLinear);
  Mlp online({1, 1}, OutputActivation::kLinear);
  online.weights()[0](0, 0) = 1.0;
  soft_update(target, online, 0.001);
  CHECK(target.weights()[0](0, 0) == doctest::Approx(0.001).epsilon(1e-15));

  Mlp same = online;
  soft_update(same, online, 0.37);
  CHECK(mlp_equal(same, online));

  Mlp copy({1, 1}, OutputActivation::kLinear);
  soft_update(copy, online, 1.0);
  CHECK(mlp_equal(copy, online));
}

TEST_CASE("soft_update: every entry stays between target and online values") {
  Rng rng(64);
  Mlp target({3, 7, 2}, OutputActivation::kLinear);
  Mlp online({3, 7, 2}, OutputActivation::kLinear);
  target.init_params(rng);
  online.init_params(rng);
  Mlp updated = target;
  soft_update(updated, online, 0.25);
  for (int l = 0; l < target.num_layers(); ++l) {
    for (int i = 0; i < target.weights()[l].size(); ++i) {
      const double lo = std::min(target.weights()[l].data()[i], online.weights()[l].data()[i]);
      const double hi = std::max(target.weights()[l].data()[i], online.weights()[l].data()[i]);
      const double v = updated.weights()[l].data()[i];
      CHECK(v >= lo - 1e-15);
      CHECK(v <= hi + 1e-15);
    }
  }
}

TEST_CASE("soft_update: k updates against frozen online decay geometrically") {
  Rng rng(99);
  Mlp online({3, 6, 2}, OutputActivation::kLinear);
  Mlp target({3, 6, 2}, OutputActivation::kLinear);
  online.init_params(rng);
  target.init_params(rng);
  const double tau = 0.001;

  auto dist = [&](const Mlp& a, const Mlp& b) {
    double s = 0.0;
    for (int l = 0; l < a.num_layers(); ++l) {
      s += (a.weights()[l] - b.weights()[l]).squaredNorm();
      s += (a.biases()[l] - b.biases()[l]).squaredNorm();
    }
    return std::sqrt(s);
  };

  const double d0 = dist(target, online);
  Mlp t = target;
  for (int k = 1; k <= 50; ++k) {
    soft_update(t, online, tau);
    const double want = std::pow(1.0 - tau, k) * d0;
    CHECK(dist(t, online) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("init_params: hidden layers bounded by 1/sqrt(fan_in), final by 3e-3") {
  Rng rng(123);
  Mlp critic({9, 400, 300, 1}, OutputActivation::kLinear, 1.0, 8);
  critic.init_params(rng);
  CHECK(critic.weights()[0].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(9.0));
  CHECK(critic.weights()[1].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(408.0));
  CHECK(critic.weights()[1].cols() == 408);  // 400 features + 8 action dims
  CHECK(critic.weights()[2].cwiseAbs().maxCoeff() <= 3e-3);
  CHECK(critic.biases()[2].cwiseAbs().maxCoeff() <= 3e-3);
  // Bounds are actually exercised, not vacuous.
  CHECK(critic.weights()[0].cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("checkpoint: mlp and optimizer state round-trip bitwise") {
  Rng rng(555);
  Mlp net({6, 10, 9, 1}, OutputActivation::kTanhScaled, 0.75, 4);
  net.init_params(rng);
  AdamState st(net, 2.5e-4);
  // Take a couple of real steps so the moments are non-trivial.
  Eigen::MatrixXd x = random_matrix(6, 3, rng);
  Eigen::MatrixXd a = random_matrix(4, 3, rng);
  Eigen::MatrixXd coeff = random_matrix(1, 3, rng);
  for (int k = 0; k < 3; ++k) {
    ForwardCache cache;
    net.forward(x, &a, &cache);
    adam_step(st, net, net.backward(cache, coeff));
  }

  std::stringstream buf;
  write_checkpoint_header(buf);
  save_mlp(buf, net);
  save_adam_state(buf, st);

  CHECK(read_checkpoint_header(buf) == kCheckpointVersion);
  const Mlp loaded = load_mlp(buf);
  const AdamState st2 = load_adam_state(buf);
  CHECK(mlp_equal(loaded, net));
  CHECK(st2.step_count == st.step_count);
  CHECK(st2.learning_rate == st.learning_rate);
  for (std::size_t l = 0; l < st.m_weights.size(); ++l) {
    CHECK(st2.m_weights[l] == st.m_weights[l]);
    CHECK(st2.v_weights[l] == st.v_weights[l]);
    CHECK(st2.m_biases[l] == st.m_biases[l]);
    CHECK(st2.v_biases[l] == st.v_biases[l]);
  }
}

TEST_CASE("checkpoint: malformed input is rejected") {
  std::stringstream bad("not a checkpoint at all");
  CHECK_THROWS_AS(read_checkpoint_header(bad), ConfigError);

  std::stringstream truncated;
  write_checkpoint_header(truncated);
  Mlp net({2, 3, 1}, OutputActivation::kLinear);
  save_mlp(truncated, net);
  std::string payload = truncated.str();
  payload.resize(payload.size() / 2);
  std::stringstream half(payload);
  read_checkpoint_header(half);
  CHECK_THROWS_AS(load_mlp(half), ConfigError);
}
