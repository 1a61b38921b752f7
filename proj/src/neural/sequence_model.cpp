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

#include "hamflow/neural/sequence_model.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace hamflow::neural {

namespace {

MatrixXd sigmoid(const MatrixXd& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

DenseBlock take(Eigen::Index& cursor, Eigen::Index rows, Eigen::Index cols) {
  DenseBlock b{cursor, cursor + rows * cols, rows, cols};
  cursor += rows * cols + rows;
  return b;
}

std::vector<DenseBlock> encoder_blocks(const ModelConfig& c, Eigen::Index& cursor) {
  std::vector<DenseBlock> out;
  Eigen::Index in = c.o0_width;
  for (int k = 0; k < c.encoder_layers; ++k) {
    const Eigen::Index rows = (k + 1 == c.encoder_layers) ? c.hidden : c.encoder_width;
    out.push_back(take(cursor, rows, in));
    in = rows;
  }
  return out;
}

MatrixXd apply_encoder(const VectorXd& p, const std::vector<DenseBlock>& blocks, const MatrixXd& o0,
                       std::vector<MatrixXd>* acts) {
  MatrixXd a = o0;
  if (acts) acts->assign(1, a);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    MatrixXd z = weight(p, blocks[k]) * a;
    z.colwise() += bias(p, blocks[k]);
    if (k + 1 < blocks.size()) z = z.array().tanh().matrix();
    a = std::move(z);
    if (acts) acts->push_back(a);
  }
  return a;
}

void encoder_backward(const VectorXd& p, const std::vector<DenseBlock>& blocks,
                      const std::vector<MatrixXd>& acts, MatrixXd delta, VectorXd& grad) {
  for (std::size_t kk = blocks.size(); kk-- > 0;) {
    if (kk + 1 < blocks.size()) {
      delta = (delta.array() * (1.0 - acts[kk + 1].array().square())).matrix();
    }
    weight(grad, blocks[kk]).noalias() += delta * acts[kk].transpose();
    bias(grad, blocks[kk]) += delta.rowwise().sum();
    if (kk > 0) delta = weight(p, blocks[kk]).transpose() * delta;
  }
}

}  // namespace

std::string to_string(Direction d) {
  return d == Direction::Dynamics ? "dynamics" : "hamiltonian";
}

Direction direction_from_string(const std::string& s) {
  if (s == "dynamics") return Direction::Dynamics;
  if (s == "hamiltonian") return Direction::Hamiltonian;
  throw std::invalid_argument("unknown direction '" + s + "' (expected dynamics or hamiltonian)");
}

void ModelConfig::validate() const {
  require(input_width >= 1 && output_width >= 1 && o0_width >= 1, "ModelConfig: widths must be positive");
  require(hidden >= 1 && layers >= 1, "ModelConfig: hidden and layers must be positive");
  require(encoder_layers >= 1 && encoder_width >= 1, "ModelConfig: encoder shape must be positive");
  require(field_scale > 0 && time_scale > 0, "ModelConfig: scales must be positive");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"direction", to_string(c.direction)},
       {"input_width", c.input_width},
       {"output_width", c.output_width},
       {"o0_width", c.o0_width},
       {"hidden", c.hidden},
       {"layers", c.layers},
       {"encoder_layers", c.encoder_layers},
       {"encoder_width", c.encoder_width},
       {"field_scale", c.field_scale},
       {"time_scale", c.time_scale}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.direction = direction_from_string(j.at("direction").get<std::string>());
  j.at("input_width").get_to(c.input_width);
  j.at("output_width").get_to(c.output_width);
  j.at("o0_width").get_to(c.o0_width);
  j.at("hidden").get_to(c.hidden);
  j.at("layers").get_to(c.layers);
  j.at("encoder_layers").get_to(c.encoder_layers);
  j.at("encoder_width").get_to(c.encoder_width);
  j.at("field_scale").get_to(c.field_scale);
  j.at("time_scale").get_to(c.time_scale);
}

ParamLayout ParamLayout::build(const ModelConfig& c) {
  c.validate();
  ParamLayout l;
  Eigen::Index cursor = 0;
  l.encoder_h = encoder_blocks(c, cursor);
  l.encoder_c = encoder_blocks(c, cursor);
  for (int k = 0; k < c.layers; ++k) {
    const Eigen::Index in = k == 0 ? c.input_width : c.hidden;
    l.lstm.push_back(take(cursor, 4 * Eigen::Index{c.hidden}, c.hidden + in));
  }
  l.head = take(cursor, c.output_width, c.hidden);
  l.size = cursor;
  return l;
}

SequenceModel::SequenceModel(const ModelConfig& config)
    : config_(config), layout_(ParamLayout::build(config)), params_(VectorXd::Zero(layout_.size)) {}

SequenceModel SequenceModel::initialized(const ModelConfig& config, std::uint64_t seed) {
  SequenceModel m(config);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x6e6eu};
  std::mt19937_64 rng(seq);
  auto fill = [&](const DenseBlock& b) {
    const double a = 1.0 / std::sqrt(static_cast<double>(b.cols));
    std::uniform_real_distribution<double> u(-a, a);
    auto w = weight(m.params_, b);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = u(rng);
  };
  for (const auto& b : m.layout_.encoder_h) fill(b);
  for (const auto& b : m.layout_.encoder_c) fill(b);
  for (const auto& b : m.layout_.lstm) {
    fill(b);
    bias(m.params_, b).segment(0, config.hidden).setOnes();
  }
  fill(m.layout_.head);
  return m;
}

void to_json(nlohmann::json& j, const SequenceModel& m) {
  j = {{"format", "hamflow-sequence-model"},
       {"version", 1},
       {"config", m.config_},
       {"config_hash", m.config_hash},
       {"parameter_count", m.params_.size()},
       {"parameters", std::vector<double>(m.params_.data(), m.params_.data() + m.params_.size())}};
}

void from_json(const nlohmann::json& j, SequenceModel& m) {
  if (j.value("format", "") != "hamflow-sequence-model") {
    throw std::invalid_argument("not a sequence model checkpoint");
  }
  SequenceModel out(j.at("config").get<ModelConfig>());
  out.config_hash = j.value("config_hash", "");
  const auto values = j.at("parameters").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != out.layout_.size) {
    throw std::invalid_argument("checkpoint parameter count does not match its config");
  }
  out.params_ = Eigen::Map<const VectorXd>(values.data(), out.layout_.size);
  m = std::move(out);
}

void SequenceModel::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << nlohmann::json(*this).dump() << '\n';
}

SequenceModel SequenceModel::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(f).get<SequenceModel>();
}

CellCache lstm_cell_forward(const MatrixXd& w, const VectorXd& b, const VectorXd& x,
                            const VectorXd& h_prev, const VectorXd& c_prev) {
  const Eigen::Index h = h_prev.size();
  require(c_prev.size() == h && w.rows() == 4 * h && b.size() == 4 * h &&
              w.cols() == h + x.size(),
          "lstm_cell_forward: width mismatch");
  const VectorXd z = w.leftCols(h) * h_prev + w.rightCols(x.size()) * x + b;
  CellCache c;
  c.f = sigmoid(z.segment(0, h));
  c.i = sigmoid(z.segment(h, h));
  c.g = z.segment(2 * h, h).array().tanh().matrix();
  c.o = sigmoid(z.segment(3 * h, h));
  c.c = (c.f.array() * c_prev.array() + c.i.array() * c.g.array()).matrix();
  c.tanh_c = c.c.array().tanh().matrix();
  c.h = (c.o.array() * c.tanh_c.array()).matrix();
  return c;
}

std::pair<MatrixXd, MatrixXd> encode_initial_state(const SequenceModel& m, const MatrixXd& o0) {
  require(o0.rows() == m.config().o0_width, "encode_initial_state: o0 width mismatch");
  return {apply_encoder(m.params(), m.layout().encoder_h, o0, nullptr),
          apply_encoder(m.params(), m.layout().encoder_c, o0, nullptr)};
}

ForwardCache forward(const SequenceModel& m, const Sequence& inputs, const MatrixXd& o0) {
  const auto& cfg = m.config();
  const auto& p = m.params();
  const Eigen::Index hid = cfg.hidden;
  require(o0.rows() == cfg.o0_width, "forward: o0 width mismatch");
  ForwardCache fc;
  fc.batch = static_cast<int>(o0.cols());
  for (const auto& x : inputs) {
    require(x.rows() == cfg.input_width && x.cols() == o0.cols(), "forward: input shape mismatch");
  }
  apply_encoder(p, m.layout().encoder_h, o0, &fc.enc_h);
  apply_encoder(p, m.layout().encoder_c, o0, &fc.enc_c);
  fc.inputs = inputs;
  const std::size_t steps = inputs.size();
  const auto layers = static_cast<std::size_t>(cfg.layers);
  fc.gates.assign(layers, Sequence(steps));
  fc.cell.assign(layers, Sequence(steps));
  fc.tanh_cell.assign(layers, Sequence(steps));
  fc.hidden.assign(layers, Sequence(steps));
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& blk = m.layout().lstm[l];
    const auto w = weight(p, blk);
    const auto b = bias(p, blk);
    const Sequence& below = l == 0 ? fc.inputs : fc.hidden[l - 1];
    const Eigen::Index in = below.empty() ? 0 : below.front().rows();
    for (std::size_t t = 0; t < steps; ++t) {
      const MatrixXd& h_prev = t == 0 ? fc.h0() : fc.hidden[l][t - 1];
      const MatrixXd& c_prev = t == 0 ? fc.c0() : fc.cell[l][t - 1];
      MatrixXd z = w.rightCols(in) * below[t];
      z.noalias() += w.leftCols(hid) * h_prev;
      z.colwise() += b;
      MatrixXd& g = fc.gates[l][t];
      g.resize(z.rows(), z.cols());
      g.topRows(2 * hid) = sigmoid(z.topRows(2 * hid));
      g.middleRows(2 * hid, hid) = z.middleRows(2 * hid, hid).array().tanh().matrix();
      g.bottomRows(hid) = sigmoid(z.bottomRows(hid));
      fc.cell[l][t] = (g.topRows(hid).array() * c_prev.array() +
                       g.middleRows(hid, hid).array() * g.middleRows(2 * hid, hid).array())
                          .matrix();
      fc.tanh_cell[l][t] = fc.cell[l][t].array().tanh().matrix();
      fc.hidden[l][t] = (g.bottomRows(hid).array() * fc.tanh_cell[l][t].array()).matrix();
    }
  }
  const auto wo = weight(p, m.layout().head);
  const auto bo = bias(p, m.layout().head);
  fc.outputs.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    fc.outputs[t] = wo * fc.hidden[layers - 1][t];
    fc.outputs[t].colwise() += bo;
  }
  return fc;
}

MatrixXd model_forward(const SequenceModel& m, const MatrixXd& inputs, const VectorXd& o0) {
  require(inputs.cols() == m.config().input_width, "model_forward: input width mismatch");
  Sequence seq(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index t = 0; t < inputs.rows(); ++t) seq[static_cast<std::size_t>(t)] = inputs.row(t).transpose();
  const auto fc = forward(m, seq, o0);
  MatrixXd out(inputs.rows(), m.config().output_width);
  for (Eigen::Index t = 0; t < inputs.rows(); ++t) {
    out.row(t) = fc.outputs[static_cast<std::size_t>(t)].col(0).transpose();
  }
  return out;
}

void backward(const SequenceModel& m, const ForwardCache& cache, const Sequence& d_outputs,
              VectorXd& grad) {
  const auto& cfg = m.config();
  const auto& p = m.params();
  const auto& lay = m.layout();
  const Eigen::Index hid = cfg.hidden;
  const std::size_t steps = cache.inputs.size();
  if (cache.hidden.size() != static_cast<std::size_t>(cfg.layers) || cache.outputs.size() != steps) {
    throw std::invalid_argument("backward: forward cache missing or inconsistent");
  }
  require(d_outputs.size() == steps, "backward: gradient length mismatch");
  require(grad.size() == lay.size, "backward: gradient vector size mismatch");
  const auto layers = static_cast<std::size_t>(cfg.layers);

  Sequence dh_ext(steps);
  const auto wo = weight(p, lay.head);
  for (std::size_t t = 0; t < steps; ++t) {
    require(d_outputs[t].rows() == cfg.output_width && d_outputs[t].cols() == cache.batch,
            "backward: gradient shape mismatch");
    weight(grad, lay.head).noalias() += d_outputs[t] * cache.hidden[layers - 1][t].transpose();
    bias(grad, lay.head) += d_outputs[t].rowwise().sum();
    dh_ext[t].noalias() = wo.transpose() * d_outputs[t];
  }

  MatrixXd dh0 = MatrixXd::Zero(hid, cache.batch);
  MatrixXd dc0 = MatrixXd::Zero(hid, cache.batch);
  MatrixXd dz(4 * hid, cache.batch);
  for (std::size_t l = layers; l-- > 0;) {
    const auto& blk = lay.lstm[l];
    const auto w = weight(p, blk);
    auto dw = weight(grad, blk);
    auto db = bias(grad, blk);
    const Sequence& below = l == 0 ? cache.inputs : cache.hidden[l - 1];
    const Eigen::Index in = blk.cols - hid;
    MatrixXd dh_next = MatrixXd::Zero(hid, cache.batch);
    MatrixXd dc_next = MatrixXd::Zero(hid, cache.batch);
    Sequence dx(l > 0 ? steps : 0);
    for (std::size_t t = steps; t-- > 0;) {
      const MatrixXd& g = cache.gates[l][t];
      const MatrixXd& h_prev = t == 0 ? cache.h0() : cache.hidden[l][t - 1];
      const MatrixXd& c_prev = t == 0 ? cache.c0() : cache.cell[l][t - 1];
      const auto f = g.topRows(hid).array();
      const auto i = g.middleRows(hid, hid).array();
      const auto gc = g.middleRows(2 * hid, hid).array();
      const auto o = g.bottomRows(hid).array();
      const auto tc = cache.tanh_cell[l][t].array();
      const MatrixXd dh = dh_ext[t] + dh_next;
      const MatrixXd dc = (dc_next.array() + dh.array() * o * (1.0 - tc.square())).matrix();
      dz.topRows(hid) = (dc.array() * c_prev.array() * f * (1.0 - f)).matrix();
      dz.middleRows(hid, hid) = (dc.array() * gc * i * (1.0 - i)).matrix();
      dz.middleRows(2 * hid, hid) = (dc.array() * i * (1.0 - gc.square())).matrix();
      dz.bottomRows(hid) = (dh.array() * tc * o * (1.0 - o)).matrix();
      dw.leftCols(hid).noalias() += dz * h_prev.transpose();
      dw.rightCols(in).noalias() += dz * below[t].transpose();
      db += dz.rowwise().sum();
      dh_next.noalias() = w.leftCols(hid).transpose() * dz;
      if (l > 0) dx[t].noalias() = w.rightCols(in).transpose() * dz;
      dc_next = (dc.array() * f).matrix();
    }
    dh0 += dh_next;
    dc0 += dc_next;
    if (l > 0) dh_ext = std::move(dx);
  }
  encoder_backward(p, lay.encoder_h, cache.enc_h, std::move(dh0), grad);
  encoder_backward(p, lay.encoder_c, cache.enc_c, std::move(dc0), grad);
}

VectorXd backward(const SequenceModel& m, const ForwardCache& cache, const Sequence& d_outputs) {
  VectorXd grad = VectorXd::Zero(m.layout().size);
  backward(m, cache, d_outputs, grad);
  return grad;
}

double mse_loss(const MatrixXd& pred, const MatrixXd& truth) {
  require(pred.rows() == truth.rows() && pred.cols() == truth.cols(), "mse_loss: shape mismatch");
  if (pred.size() == 0) return 0.0;
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

double mse_loss(const Sequence& pred, const Sequence& truth) {
  require(pred.size() == truth.size(), "mse_loss: length mismatch");
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    require(pred[t].rows() == truth[t].rows() && pred[t].cols() == truth[t].cols(),
            "mse_loss: shape mismatch");
    sum += (pred[t] - truth[t]).squaredNorm();
    count += static_cast<double>(pred[t].size());
  }
  return count > 0 ? sum / count : 0.0;
}

Sequence mse_gradient(const Sequence& pred, const Sequence& truth) {
  require(pred.size() == truth.size(), "mse_gradient: length mismatch");
  double count = 0.0;
  for (const auto& x : pred) count += static_cast<double>(x.size());
  Sequence g(pred.size());
  for (std::size_t t = 0; t < pred.size(); ++t) g[t] = (2.0 / count) * (pred[t] - truth[t]);
  return g;
}

}  // namespace hamflow::neural
