#include "ganlab/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ganlab {

namespace {
std::shared_ptr<const TensorData> make_data(int rows, int cols, std::vector<double> v) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("Tensor: extents must be positive, got " + std::to_string(rows) +
                                "x" + std::to_string(cols));
  if (v.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("Tensor: value count " + std::to_string(v.size()) +
                                " does not match shape " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  auto d = std::make_shared<TensorData>();
  d->rows = rows;
  d->cols = cols;
  d->v = std::move(v);
  return d;
}
}  // namespace

Tensor::Tensor(int rows, int cols)
    : data_(make_data(rows, cols,
                      std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0))) {}

Tensor::Tensor(int rows, int cols, std::vector<double> values)
    : data_(make_data(rows, cols, std::move(values))) {}

Tensor Tensor::scalar(double v) { return Tensor(1, 1, {v}); }

Tensor Tensor::row(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  return Tensor(1, n, std::move(values));
}

Tensor Tensor::filled(int rows, int cols, double value) {
  return Tensor(rows, cols,
                std::vector<double>(static_cast<std::size_t>(rows) * cols, value));
}

Tensor Tensor::wrap(std::shared_ptr<const TensorData> data) {
  if (!data) throw std::invalid_argument("Tensor::wrap: null data");
  return Tensor(std::move(data), nullptr, -1);
}

double Tensor::item() const {
  if (!is_scalar())
    throw std::invalid_argument("Tensor::item: tensor has shape " + shape_str());
  return data_->v[0];
}

bool Tensor::all_finite() const {
  for (double x : data_->v)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  if (!defined()) return "undefined";
  return std::to_string(rows()) + "x" + std::to_string(cols());
}

Tensor Tensor::detached() const { return Tensor(data_, nullptr, -1); }

}  // namespace ganlab
