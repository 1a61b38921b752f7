// Copyright 2026 The HamFlow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "doctest.h"
#include "hamflow/dynamics/state.hpp"
#include "hamflow/neural/adam.hpp"
#include "hamflow/neural/gradient_check.hpp"

using namespace hamflow::neural;

namespace {

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double a = 1.0) {
  std::uniform_real_distribution<double> u(-a, a);
  MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
  return m;
}

Sequence random_sequence(std::mt19937_64& rng, std::size_t steps, Eigen::Index rows, Eigen::Index batch) {
  Sequence s(steps);
  for (auto& x : s) x = random_matrix(rng, rows, batch);
  return s;
}

ModelConfig small_config(Direction d) {
  ModelConfig c;
  c.direction = d;
  c.input_width = d == Direction::Dynamics ? 2 : 5;
  c.output_width = d == Direction::Dynamics ? 4 : 1;
  c.o0_width = 3;
  c.hidden = 6;
  c.layers = 2;
  c.encoder_layers = 3;
  c.encoder_width = 5;
  return c;
}

}  // namespace

TEST_CASE("LSTM cell with zero parameters halves the cell state") {
  const MatrixXd w = MatrixXd::Zero(12, 5);
  const VectorXd b = VectorXd::Zero(12);
  const VectorXd v = (VectorXd(3) << 0.3, -1.2, 2.0).finished();
  const auto c = lstm_cell_forward(w, b, VectorXd::Constant(2, 0.7), VectorXd::Zero(3), v);
  for (int k = 0; k < 3; ++k) {
    CHECK(c.c[k] == doctest::Approx(0.5 * v[k]).epsilon(1e-15));
    CHECK(c.h[k] == doctest::Approx(0.5 * std::tanh(0.5 * v[k])).epsilon(1e-15));
  }
  const auto zero = lstm_cell_forward(w, b, VectorXd::Constant(2, 0.7), VectorXd::Zero(3), VectorXd::Zero(3));
  CHECK(zero.c.norm() == 0.0);
  CHECK(zero.h.norm() == 0.0);
  CHECK_THROWS_AS(lstm_cell_forward(w, b, VectorXd::Zero(3), VectorXd::Zero(3), v), std::invalid_argument);
}

TEST_CASE("LSTM cell matches a scalar evaluation of the gate equations") {
  std::mt19937_64 rng(3);
  const int h = 3, n = 2;
  const MatrixXd w = random_matrix(rng, 4 * h, h + n);
  const VectorXd b = random_matrix(rng, 4 * h, 1);
  const VectorXd x = random_matrix(rng, n, 1);
  const VectorXd hp = random_matrix(rng, h, 1);
  const VectorXd cp = random_matrix(rng, h, 1);
  const auto c = lstm_cell_forward(w, b, x, hp, cp);
  for (int k = 0; k < h; ++k) {
    double z[4];
    for (int g = 0; g < 4; ++g) {
      z[g] = b[g * h + k];
      for (int j = 0; j < h; ++j) z[g] += w(g * h + k, j) * hp[j];
      for (int j = 0; j < n; ++j) z[g] += w(g * h + k, h + j) * x[j];
    }
    const double f = sig(z[0]), i = sig(z[1]), ct = std::tanh(z[2]), o = sig(z[3]);
    const double cn = f * cp[k] + i * ct;
    CHECK(std::abs(c.c[k] - cn) < 1e-14);
    CHECK(std::abs(c.h[k] - o * std::tanh(cn)) < 1e-14);
  }
}

TEST_CASE("encoder") {
  const auto cfg = small_config(Direction::Dynamics);
  const SequenceModel zero(cfg);
  const MatrixXd o0 = (MatrixXd(3, 1) << 0.1, 0.2, 0.9).finished();
  auto [h0, c0] = encode_initial_state(zero, o0);
  CHECK(h0.norm() == 0.0);
  CHECK(c0.norm() == 0.0);

  const auto m = SequenceModel::initialized(cfg, 5);
  MatrixXd pair(3, 2);
  pair << o0, o0;
  auto [h, c] = encode_initial_state(m, pair);
  CHECK(h.rows() == cfg.hidden);
  CHECK(h.col(0) == h.col(1));
  CHECK(c.col(0) == c.col(1));

  const hamflow::dynamics::BlochVector up{0, 0, 1};
  const auto state = hamflow::dynamics::product_state(std::span(&up, 1));
  using hamflow::dynamics::PauliString;
  CHECK(hamflow::dynamics::expectation(state, PauliString::parse("X0", 1)) == 0.0);
  CHECK(hamflow::dynamics::expectation(state, PauliString::parse("Y0", 1)) == 0.0);
  CHECK(hamflow::dynamics::expectation(state, PauliString::parse("Z0", 1)) == 1.0);
}

TEST_CASE("model forward shapes and composition") {
  auto cfg = small_config(Direction::Dynamics);
  std::mt19937_64 rng(8);
  const MatrixXd in = random_matrix(rng, 9, cfg.input_width);
  const VectorXd o0 = random_matrix(rng, 3, 1);
  const SequenceModel zero(cfg);
  const MatrixXd out = model_forward(zero, in, o0);
  CHECK(out.rows() == 9);
  CHECK(out.cols() == cfg.output_width);
  CHECK(out.norm() == 0.0);

  const auto m = SequenceModel::initialized(cfg, 9);
  const MatrixXd one = model_forward(m, in.topRows(1), o0);
  auto [h0, c0] = encode_initial_state(m, o0);
  VectorXd x = in.row(0).transpose();
  for (std::size_t l = 0; l < m.layout().lstm.size(); ++l) {
    const auto& blk = m.layout().lstm[l];
    const auto c = lstm_cell_forward(weight(m.params(), blk), bias(m.params(), blk), x, h0, c0);
    x = c.h;
  }
  const VectorXd y = weight(m.params(), m.layout().head) * x + bias(m.params(), m.layout().head);
  CHECK((one.row(0).transpose() - y).cwiseAbs().maxCoeff() < 1e-14);

  const MatrixXd full = model_forward(m, in, o0);
  CHECK((full.row(0) - one.row(0)).norm() == 0.0);
  CHECK_THROWS_AS(model_forward(m, MatrixXd::Zero(3, 7), o0), std::invalid_argument);
}

TEST_CASE("mse loss") {
  const MatrixXd a = MatrixXd::Random(4, 3);
  CHECK(mse_loss(a, a) == 0.0);
  CHECK(mse_loss(MatrixXd(a.array() + 0.1), a) == doctest::Approx(0.01).epsilon(1e-12));
  const MatrixXd p = MatrixXd::Zero(1, 2);
  const MatrixXd t = (MatrixXd(1, 2) << 1, 3).finished();
  CHECK(mse_loss(p, t) == 5.0);
  CHECK_THROWS_AS(mse_loss(p, a), std::invalid_argument);
}

TEST_CASE("zero upstream gradient gives zero parameter gradient") {
  const auto m = SequenceModel::initialized(small_config(Direction::Dynamics), 1);
  std::mt19937_64 rng(1);
  const auto in = random_sequence(rng, 5, 2, 3);
  const auto cache = forward(m, in, random_matrix(rng, 3, 3));
  Sequence dy(5, MatrixXd::Zero(4, 3));
  CHECK(backward(m, cache, dy).norm() == 0.0);
  ForwardCache empty;
  CHECK_THROWS_AS(backward(m, empty, dy), std::invalid_argument);
}

TEST_CASE("width-one single-step model matches the hand-derived chain rule") {
  ModelConfig cfg;
  cfg.input_width = 1;
  cfg.output_width = 1;
  cfg.o0_width = 1;
  cfg.hidden = 1;
  cfg.layers = 1;
  cfg.encoder_layers = 1;
  cfg.encoder_width = 1;
  auto m = SequenceModel::initialized(cfg, 4);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (Eigen::Index k = 0; k < m.params().size(); ++k) m.params()[k] = u(rng);
  const double x = 0.4, o0 = -0.7, target = 0.25;
  const auto& lay = m.layout();
  const auto& p = m.params();
  auto wv = [&](const DenseBlock& b, int r, int c) { return weight(p, b)(r, c); };
  auto bv = [&](const DenseBlock& b, int r) { return bias(p, b)(r); };
  const double h0 = wv(lay.encoder_h[0], 0, 0) * o0 + bv(lay.encoder_h[0], 0);
  const double c0 = wv(lay.encoder_c[0], 0, 0) * o0 + bv(lay.encoder_c[0], 0);
  const auto& L = lay.lstm[0];
  double z[4], a[4];
  for (int g = 0; g < 4; ++g) z[g] = wv(L, g, 0) * h0 + wv(L, g, 1) * x + bv(L, g);
  a[0] = sig(z[0]); a[1] = sig(z[1]); a[2] = std::tanh(z[2]); a[3] = sig(z[3]);
  const double c = a[0] * c0 + a[1] * a[2];
  const double h = a[3] * std::tanh(c);
  const double y = wv(lay.head, 0, 0) * h + bv(lay.head, 0);
  const double dy = 2 * (y - target);
  const double dh = dy * wv(lay.head, 0, 0);
  const double dc = dh * a[3] * (1 - std::tanh(c) * std::tanh(c));
  const double dz[4] = {dc * c0 * a[0] * (1 - a[0]), dc * a[2] * a[1] * (1 - a[1]),
                        dc * a[1] * (1 - a[2] * a[2]), dh * std::tanh(c) * a[3] * (1 - a[3])};
  double dh0 = 0;
  for (int g = 0; g < 4; ++g) dh0 += wv(L, g, 0) * dz[g];
  const double dc0 = dc * a[0];

  const auto cache = forward(m, Sequence{MatrixXd::Constant(1, 1, x)}, MatrixXd::Constant(1, 1, o0));
  CHECK(std::abs(cache.outputs[0](0, 0) - y) < 1e-15);
  const VectorXd grad = backward(m, cache, mse_gradient(cache.outputs, Sequence{MatrixXd::Constant(1, 1, target)}));
  auto gw = [&](const DenseBlock& b, int r, int col) { return weight(grad, b)(r, col); };
  auto gb = [&](const DenseBlock& b, int r) { return bias(grad, b)(r); };
  CHECK(gw(lay.head, 0, 0) == doctest::Approx(dy * h).epsilon(1e-13));
  CHECK(gb(lay.head, 0) == doctest::Approx(dy).epsilon(1e-13));
  for (int g = 0; g < 4; ++g) {
    CHECK(gw(L, g, 0) == doctest::Approx(dz[g] * h0).epsilon(1e-12));
    CHECK(gw(L, g, 1) == doctest::Approx(dz[g] * x).epsilon(1e-12));
    CHECK(gb(L, g) == doctest::Approx(dz[g]).epsilon(1e-12));
  }
  CHECK(gw(lay.encoder_h[0], 0, 0) == doctest::Approx(dh0 * o0).epsilon(1e-12));
  CHECK(gb(lay.encoder_h[0], 0) == doctest::Approx(dh0).epsilon(1e-12));
  CHECK(gw(lay.encoder_c[0], 0, 0) == doctest::Approx(dc0 * o0).epsilon(1e-12));
  CHECK(gb(lay.encoder_c[0], 0) == doctest::Approx(dc0).epsilon(1e-12));
}

TEST_CASE("backpropagation through time agrees with central differences") {
  for (auto d : {Direction::Dynamics, Direction::Hamiltonian}) {
    const auto cfg = small_config(d);
    const auto m = SequenceModel::initialized(cfg, 17);
    std::mt19937_64 rng(17);
    const auto in = random_sequence(rng, 8, cfg.input_width, 3);
    const auto target = random_sequence(rng, 8, cfg.output_width, 3);
    const auto r = gradient_check(m, in, random_matrix(rng, 3, 3), target, 100, 1e-5, 99);
    CAPTURE(r.max_absolute_error);
    CAPTURE(r.min_gradient);
    CHECK(r.probes == 100);
    CHECK(r.max_relative_error <= 1e-5);
  }
}

TEST_CASE("Adam") {
  VectorXd p = VectorXd::LinSpaced(5, -1, 1);
  const VectorXd start = p;
  auto st = AdamState::zeros(5);
  adam_step(p, VectorXd::Zero(5), st, 1e-3);
  CHECK(p == start);
  CHECK(st.step == 1);

  const VectorXd g = (VectorXd(5) << 0.5, -2.0, 1e-3, -7.0, 3.0).finished();
  VectorXd before;
  for (int k = 0; k < 20000; ++k) {
    before = p;
    adam_step(p, g, st, 1e-3);
  }
  const VectorXd delta = p - before;
  for (int k = 0; k < 5; ++k) CHECK(delta[k] == doctest::Approx(-1e-3 * (g[k] > 0 ? 1 : -1)).epsilon(1e-4));

  VectorXd q1 = start, q2 = start;
  auto s1 = AdamState::zeros(5), s2 = AdamState::zeros(5);
  std::mt19937_64 r1(2), r2(2);
  for (int k = 0; k < 100; ++k) {
    adam_step(q1, random_matrix(r1, 5, 1), s1, 1e-2);
    adam_step(q2, random_matrix(r2, 5, 1), s2, 1e-2);
  }
  CHECK(q1 == q2);

  VectorXd bad = g;
  bad[2] = NAN;
  CHECK_THROWS_AS(adam_step(p, bad, st, 1e-3), hamflow::NumericalError);
  CHECK_THROWS_AS(adam_step(p, VectorXd::Zero(3), st, 1e-3), std::invalid_argument);
}

namespace {

// Bloch vectors under H = B X, sampled with the field and time as inputs.
struct RabiData {
  Sequence inputs, targets;
  MatrixXd o0;
};

RabiData rabi_data(int samples, int steps, double dt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  RabiData d;
  d.o0.resize(3, samples);
  VectorXd field(samples);
  for (int s = 0; s < samples; ++s) {
    const auto v = hamflow::dynamics::uniform_bloch_vector(u(rng), u(rng));
    d.o0.col(s) << v[0], v[1], v[2];
    field[s] = 0.2 + 0.8 * u(rng);
  }
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    MatrixXd in(2, samples), out(3, samples);
    for (int s = 0; s < samples; ++s) {
      const double a = 2 * field[s] * t;
      const double y = d.o0(1, s), z = d.o0(2, s);
      in.col(s) << field[s], t;
      out.col(s) << d.o0(0, s), y * std::cos(a) - z * std::sin(a), z * std::cos(a) + y * std::sin(a);
    }
    d.inputs.push_back(in);
    d.targets.push_back(out);
  }
  return d;
}

std::vector<double> train_toy(const RabiData& d, int steps, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.input_width = 2;
  cfg.output_width = 3;
  cfg.hidden = 24;
  cfg.layers = 1;
  cfg.encoder_layers = 2;
  cfg.encoder_width = 16;
  auto m = SequenceModel::initialized(cfg, seed);
  auto st = AdamState::zeros(m.layout().size);
  std::vector<double> losses;
  for (int k = 0; k < steps; ++k) {
    const auto cache = forward(m, d.inputs, d.o0);
    losses.push_back(mse_loss(cache.outputs, d.targets));
    adam_step(m.params(), backward(m, cache, mse_gradient(cache.outputs, d.targets)), st, 1e-2);
  }
  return losses;
}

}  // namespace

TEST_CASE("Adam reduces the Rabi toy loss tenfold in 500 steps and is deterministic") {
  const auto data = rabi_data(50, 20, 0.1, 6);
  const auto a = train_toy(data, 500, 3);
  CAPTURE(a.front());
  CAPTURE(a.back());
  CHECK(a.back() * 10 <= a.front());
  const auto b = train_toy(data, 500, 3);
  CHECK(a == b);
}

TEST_CASE("the encoder conditions the output") {
  const auto m = SequenceModel::initialized(small_config(Direction::Dynamics), 21);
  std::mt19937_64 rng(21);
  const MatrixXd in = random_matrix(rng, 6, 2);
  const VectorXd a = (VectorXd(3) << 0, 0, 1).finished();
  const VectorXd b = (VectorXd(3) << 1, 0, 0).finished();
  CHECK((model_forward(m, in, a) - model_forward(m, in, b)).cwiseAbs().minCoeff() > 0.0);
}

TEST_CASE("checkpoint round trip is bit-identical") {
  auto m = SequenceModel::initialized(small_config(Direction::Hamiltonian), 33);
  m.config_hash = "abc";
  const auto path = std::filesystem::temp_directory_path() / "hamflow_ckpt_test" / "m.json";
  m.save(path);
  const auto back = SequenceModel::load(path);
  CHECK(back.params() == m.params());
  CHECK(back.config_hash == "abc");
  CHECK(back.config().direction == Direction::Hamiltonian);
  std::mt19937_64 rng(1);
  const MatrixXd in = random_matrix(rng, 4, 5);
  const VectorXd o0 = random_matrix(rng, 3, 1);
  CHECK(model_forward(back, in, o0) == model_forward(m, in, o0));
  std::filesystem::remove_all(path.parent_path());
}
