#include "adversarl/agents/mlp.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "adversarl/core/errors.hpp"

namespace adversarl {

void Mlp::Gradients::zero_like(const Mlp& net) {
  dw.clear();
  db.clear();
  for (const Layer& l : net.layers()) {
    dw.push_back(Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()));
    db.push_back(Eigen::VectorXd::Zero(l.b.size()));
  }
}

Mlp::Mlp(std::vector<int> sizes, Rng& rng, bool zero_output) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ContractViolation("mlp needs at least input and output sizes");
  for (int s : sizes_)
    if (s < 1) throw ContractViolation("mlp layer sizes must be positive");
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    const int in = sizes_[i];
    const int out = sizes_[i + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Layer l{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) l.w(r, c) = uniform(rng, -bound, bound);
    for (int r = 0; r < out; ++r) l.b(r) = uniform(rng, -bound, bound);
    layers_.push_back(std::move(l));
  }
  if (zero_output) {
    layers_.back().w.setZero();
    layers_.back().b.setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (x.rows() != sizes_.front()) throw ContractViolation("mlp input has the wrong number of features");
  if (cache) cache->inputs.clear();
  Eigen::MatrixXd a = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (cache) cache->inputs.push_back(a);
    Eigen::MatrixXd z = (layers_[i].w * a).colwise() + layers_[i].b;
    a = i + 1 < layers_.size() ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return a;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& grad_out, Gradients& grads) const {
  if (cache.inputs.size() != layers_.size()) throw ContractViolation("mlp backward without a matching forward");
  grads.zero_like(*this);
  Eigen::MatrixXd delta = grad_out;  // dL/dz of the current layer
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const Eigen::MatrixXd& in = cache.inputs[i];
    grads.dw[i] = delta * in.transpose();
    grads.db[i] = delta.rowwise().sum();
    Eigen::MatrixXd dx = layers_[i].w.transpose() * delta;
    if (i == 0) return dx;
    // `in` is the tanh output of layer i-1.
    delta = dx.array() * (1.0 - in.array().square());
  }
  return delta;
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += static_cast<std::size_t>(l.w.size() + l.b.size());
  return n;
}

std::vector<double> Mlp::flat_params() const {
  std::vector<double> p;
  p.reserve(param_count());
  for (const Layer& l : layers_) {
    p.insert(p.end(), l.w.data(), l.w.data() + l.w.size());
    p.insert(p.end(), l.b.data(), l.b.data() + l.b.size());
  }
  return p;
}

void Mlp::set_flat_params(const std::vector<double>& p) {
  if (p.size() != param_count()) throw ContractViolation("mlp parameter vector has the wrong length");
  std::size_t k = 0;
  for (Layer& l : layers_) {
    for (Eigen::Index i = 0; i < l.w.size(); ++i) l.w.data()[i] = p[k++];
    for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b.data()[i] = p[k++];
  }
}

std::vector<double> Mlp::flatten(const Gradients& g) {
  std::vector<double> p;
  for (std::size_t i = 0; i < g.dw.size(); ++i) {
    p.insert(p.end(), g.dw[i].data(), g.dw[i].data() + g.dw[i].size());
    p.insert(p.end(), g.db[i].data(), g.db[i].data() + g.db[i].size());
  }
  return p;
}

void Mlp::save(std::ostream& os) const {
  os << sizes_.size();
  for (int s : sizes_) os << ' ' << s;
  os << '\n';
  const std::vector<double> p = flat_params();
  os.precision(17);
  for (std::size_t i = 0; i < p.size(); ++i) os << p[i] << (i + 1 == p.size() ? '\n' : ' ');
}

void Mlp::load(std::istream& is) {
  std::size_t n = 0;
  if (!(is >> n) || n < 2 || n > 64) throw ConfigError("malformed network snapshot");
  std::vector<int> sizes(n);
  for (int& s : sizes)
    if (!(is >> s)) throw ConfigError("malformed network snapshot");
  if (sizes != sizes_) throw ConfigError("network snapshot does not match this network's shape");
  std::vector<double> p(param_count());
  for (double& v : p)
    if (!(is >> v)) throw ConfigError("truncated network snapshot");
  set_flat_params(p);
}

SgdMomentum::SgdMomentum(const Mlp& net, double lr, double momentum) : lr_(lr), momentum_(momentum) {
  velocity_.zero_like(net);
}

void SgdMomentum::step(Mlp& net, const Mlp::Gradients& g) {
  auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    velocity_.dw[i] = momentum_ * velocity_.dw[i] - lr_ * g.dw[i];
    velocity_.db[i] = momentum_ * velocity_.db[i] - lr_ * g.db[i];
    layers[i].w += velocity_.dw[i];
    layers[i].b += velocity_.db[i];
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  auto& t = target.layers();
  const auto& o = online.layers();
  if (t.size() != o.size()) throw ContractViolation("soft update between differently shaped networks");
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i].w = tau * o[i].w + (1.0 - tau) * t[i].w;
    t[i].b = tau * o[i].b + (1.0 - tau) * t[i].b;
  }
}

}  // namespace adversarl
