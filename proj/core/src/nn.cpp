#include "srcpool/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "srcpool/rng.hpp"

namespace srcpool {

void ParamSet::add(std::string name, Matrix value) {
  for (const auto& e : entries_)
    if (e.name == name) throw std::invalid_argument("duplicate parameter: " + name);
  entries_.push_back({std::move(name), std::move(value)});
}

Matrix& ParamSet::operator[](std::string_view name) {
  for (auto& e : entries_)
    if (e.name == name) return e.value;
  throw std::out_of_range("unknown parameter: " + std::string(name));
}

const Matrix& ParamSet::operator[](std::string_view name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e.value;
  throw std::out_of_range("unknown parameter: " + std::string(name));
}

Index ParamSet::num_scalars() const {
  Index total = 0;
  for (const auto& e : entries_) total += e.value.size();
  return total;
}

Vector ParamSet::flatten() const {
  Vector flat(num_scalars());
  Index offset = 0;
  for (const auto& e : entries_) {
    flat.segment(offset, e.value.size()) = e.value.reshaped();
    offset += e.value.size();
  }
  return flat;
}

void ParamSet::assign(const Vector& flat) {
  if (flat.size() != num_scalars()) throw std::invalid_argument("parameter vector size mismatch");
  Index offset = 0;
  for (auto& e : entries_) {
    e.value.reshaped() = flat.segment(offset, e.value.size());
    offset += e.value.size();
  }
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& e : entries_) out.add(e.name, Matrix::Zero(e.value.rows(), e.value.cols()));
  return out;
}

bool ParamSet::all_finite() const {
  for (const auto& e : entries_)
    if (!e.value.allFinite()) return false;
  return true;
}

Matrix glorot_uniform(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix w(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) w(i, j) = rng.uniform(-limit, limit);
  return w;
}

SparseMatrix propagation_matrix(const Graph& g) {
  const Index n = g.num_nodes();
  Vector deg = g.degrees().array() + 1.0;
  const Vector inv_sqrt = deg.array().rsqrt();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n + 2 * g.num_edges()));
  for (Index i = 0; i < n; ++i) trips.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);
  for (const Edge& e : g.edges()) {
    const double w = e.weight * inv_sqrt[e.i] * inv_sqrt[e.j];
    trips.emplace_back(e.i, e.j, w);
    trips.emplace_back(e.j, e.i, w);
  }
  SparseMatrix p(n, n);
  p.setFromTriplets(trips.begin(), trips.end());
  return p;
}

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

Matrix propagate(const SparseMatrix& p, const Matrix& x, const Matrix& w, Activation act) {
  if (x.cols() != w.rows()) throw std::invalid_argument("propagate: weight shape mismatch");
  const Matrix z = (p * x) * w;
  return act == Activation::Relu ? relu(z) : z;
}

Matrix propagate(const Graph& g, const Matrix& x, const Matrix& w, Activation act) {
  return propagate(propagation_matrix(g), x, w, act);
}

Matrix propagate_weight_grad(const Matrix& px, const Matrix& out, const Matrix& d_out,
                             Activation act) {
  if (act == Activation::Identity) return px.transpose() * d_out;
  const Matrix d_z = (out.array() > 0.0).select(d_out, 0.0);
  return px.transpose() * d_z;
}

Matrix softmax_rows(const Matrix& z) {
  Matrix s = z.colwise() - z.rowwise().maxCoeff();
  s = s.array().exp();
  s.array().colwise() /= s.rowwise().sum().array();
  return s;
}

Matrix softmax_rows_backward(const Matrix& s, const Matrix& d_s) {
  const Vector dot = (s.array() * d_s.array()).rowwise().sum();
  return s.array() * (d_s.colwise() - dot).array();
}

}  // namespace srcpool
