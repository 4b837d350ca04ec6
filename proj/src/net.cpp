#include "aoisim/net.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace aoisim {

namespace {

MatX relu(const MatX& x) { return x.cwiseMax(0.0); }

MatX sigmoid(const MatX& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

MlpNet::MlpNet(const std::vector<int>& dims, OutputActivation out_act, Rng& rng)
    : out_act_(out_act) {
  if (dims.size() < 2) throw std::invalid_argument("MlpNet: need at least in/out dims");
  layers_.reserve(dims.size() - 1);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    Layer layer;
    layer.W.resize(dims[i + 1], dims[i]);
    layer.b = VecX::Zero(dims[i + 1]);
    const double s = 1.0 / std::sqrt(static_cast<double>(dims[i]));
    for (Index r = 0; r < layer.W.rows(); ++r)
      for (Index c = 0; c < layer.W.cols(); ++c) layer.W(r, c) = rng.uniform(-s, s);
    layers_.push_back(std::move(layer));
  }
}

Index MlpNet::param_count() const {
  Index n = 0;
  for (const Layer& l : layers_) n += l.W.size() + l.b.size();
  return n;
}

VecX MlpNet::forward(const VecX& x) const {
  return forward_batch(MatX(x)).col(0);
}

MatX MlpNet::forward_batch(const MatX& X) const {
  Cache cache;
  return forward_cached(X, cache);
}

MatX MlpNet::forward_cached(const MatX& X, Cache& cache) const {
  if (X.rows() != input_dim()) throw std::invalid_argument("MlpNet::forward: input dim mismatch");
  cache.input = X;
  cache.pre.clear();
  cache.post.clear();
  MatX a = X;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    MatX z = (layers_[i].W * a).colwise() + layers_[i].b;
    const bool last = i + 1 == layers_.size();
    MatX out;
    if (!last)
      out = relu(z);
    else
      out = out_act_ == OutputActivation::Sigmoid ? sigmoid(z) : z;
    cache.pre.push_back(std::move(z));
    cache.post.push_back(out);
    a = std::move(out);
  }
  return a;
}

MatX MlpNet::backward(const Cache& cache, const MatX& dY, VecX& grad) const {
  grad.resize(param_count());
  Index offset = param_count();
  MatX delta = dY;

  for (std::size_t idx = layers_.size(); idx-- > 0;) {
    const Layer& layer = layers_[idx];
    const MatX& z = cache.pre[idx];
    const bool last = idx + 1 == layers_.size();
    if (!last) {
      delta = delta.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    } else if (out_act_ == OutputActivation::Sigmoid) {
      const MatX& y = cache.post[idx];
      delta = delta.cwiseProduct(y.cwiseProduct(MatX::Ones(y.rows(), y.cols()) - y));
    }
    const MatX& a_prev = idx == 0 ? cache.input : cache.post[idx - 1];
    const MatX dW = delta * a_prev.transpose();
    const VecX db = delta.rowwise().sum();

    offset -= layer.b.size();
    grad.segment(offset, layer.b.size()) = db;
    offset -= layer.W.size();
    Eigen::Map<MatX>(grad.data() + offset, layer.W.rows(), layer.W.cols()) = dW;

    delta = layer.W.transpose() * delta;
  }
  return delta;  // dL/dX
}

ParamSet MlpNet::params() const {
  ParamSet p;
  for (const Layer& l : layers_)
    p.shapes.emplace_back(static_cast<int>(l.W.cols()), static_cast<int>(l.W.rows()));
  p.values = flat();
  return p;
}

void MlpNet::set_params(const ParamSet& p) {
  if (p.shapes.size() != layers_.size())
    throw std::invalid_argument("set_params: layer count mismatch");
  for (std::size_t i = 0; i < layers_.size(); ++i)
    if (p.shapes[i].first != layers_[i].W.cols() || p.shapes[i].second != layers_[i].W.rows())
      throw std::invalid_argument("set_params: shape mismatch");
  set_flat(p.values);
}

VecX MlpNet::flat() const {
  VecX v(param_count());
  Index offset = 0;
  for (const Layer& l : layers_) {
    Eigen::Map<MatX>(v.data() + offset, l.W.rows(), l.W.cols()) = l.W;
    offset += l.W.size();
    v.segment(offset, l.b.size()) = l.b;
    offset += l.b.size();
  }
  return v;
}

void MlpNet::set_flat(const VecX& values) {
  if (values.size() != param_count()) throw std::invalid_argument("set_flat: size mismatch");
  Index offset = 0;
  for (Layer& l : layers_) {
    l.W = Eigen::Map<const MatX>(values.data() + offset, l.W.rows(), l.W.cols());
    offset += l.W.size();
    l.b = values.segment(offset, l.b.size());
    offset += l.b.size();
  }
}

void MlpNet::soft_update(const MlpNet& live, MlpNet& target, double tau) {
  if (live.param_count() != target.param_count())
    throw std::invalid_argument("soft_update: parameter count mismatch");
  target.set_flat(tau * live.flat() + (1.0 - tau) * target.flat());
}

void AdamState::apply(MlpNet& net, const VecX& grad, double lr, bool plain_sgd) {
  if (!grad.allFinite()) throw std::runtime_error("optimizer: non-finite gradient");
  if (plain_sgd) {
    net.set_flat(net.flat() - lr * grad);
    return;
  }
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  if (m_.size() != grad.size()) {
    m_ = VecX::Zero(grad.size());
    v_ = VecX::Zero(grad.size());
    t_ = 0;
  }
  t_ += 1;
  m_ = beta1 * m_ + (1.0 - beta1) * grad;
  v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  const VecX mhat = m_ / bc1;
  const VecX vhat = v_ / bc2;
  net.set_flat(net.flat() -
               lr * mhat.cwiseQuotient(vhat.cwiseSqrt().array().matrix() + VecX::Constant(grad.size(), eps)));
}

namespace {

constexpr char kMagic[8] = {'A', 'P', 'S', 'F', '0', '0', '0', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void save_paramset(const ParamSet& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, static_cast<std::uint32_t>(p.shapes.size()));
  for (const auto& [in_dim, out_dim] : p.shapes) {
    write_u32(out, static_cast<std::uint32_t>(in_dim));
    write_u32(out, static_cast<std::uint32_t>(out_dim));
  }
  static_assert(std::endian::native == std::endian::little,
                "checkpoint writer assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(p.values.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(p.values.size())));
}

ParamSet load_paramset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("bad checkpoint magic: " + path);
  ParamSet p;
  const std::uint32_t layers = read_u32(in);
  Index total = 0;
  for (std::uint32_t i = 0; i < layers; ++i) {
    const int in_dim = static_cast<int>(read_u32(in));
    const int out_dim = static_cast<int>(read_u32(in));
    p.shapes.emplace_back(in_dim, out_dim);
    total += static_cast<Index>(in_dim) * out_dim + out_dim;
  }
  p.values.resize(total);
  in.read(reinterpret_cast<char*>(p.values.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(total)));
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  return p;
}

}  // namespace aoisim
