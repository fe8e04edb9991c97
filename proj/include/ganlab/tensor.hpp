#pragma once

#include <memory>
#include <string>
#include <vector>

namespace ganlab {

class Graph;

struct TensorData {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;
};

// Dense row-major float64 matrix. A scalar is 1x1 and a vector is a single
// row. The buffer is immutable and shared, so copies are cheap. A tensor may
// additionally hold a handle (graph, node id) when it was produced while
// recording on a Graph; detached tensors are plain values.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols);  // zero filled
  Tensor(int rows, int cols, std::vector<double> values);

  static Tensor scalar(double v);
  static Tensor row(std::vector<double> values);
  static Tensor filled(int rows, int cols, double value);
  // Adopt an existing buffer without copying; the result is detached.
  static Tensor wrap(std::shared_ptr<const TensorData> data);

  bool defined() const { return data_ != nullptr; }
  int rows() const { return data_->rows; }
  int cols() const { return data_->cols; }
  std::size_t size() const { return data_->v.size(); }
  const std::vector<double>& values() const { return data_->v; }
  double at(int r, int c) const { return data_->v[static_cast<std::size_t>(r) * data_->cols + c]; }
  // Value of a single-element tensor.
  double item() const;
  bool is_scalar() const { return defined() && size() == 1; }
  bool all_finite() const;
  std::string shape_str() const;

  bool attached() const { return graph_ != nullptr; }
  const std::shared_ptr<Graph>& graph() const { return graph_; }
  int node() const { return node_; }
  // Same values, no graph handle.
  Tensor detached() const;

  const std::shared_ptr<const TensorData>& data() const { return data_; }

 private:
  friend class Graph;
  Tensor(std::shared_ptr<const TensorData> data, std::shared_ptr<Graph> graph, int node)
      : data_(std::move(data)), graph_(std::move(graph)), node_(node) {}

  std::shared_ptr<const TensorData> data_;
  std::shared_ptr<Graph> graph_;
  int node_ = -1;
};

}  // namespace ganlab
