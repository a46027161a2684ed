#pragma once

#include <cstddef>
#include <vector>

namespace cdt {

// Dense row-major containers for probability kernels. Alphabets are small
// enough that flat double arrays beat anything fancier.

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {}

  double& operator()(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return v_.empty(); }
  const std::vector<double>& data() const { return v_; }
  std::vector<double>& data() { return v_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2, double fill = 0.0)
      : d0_(d0), d1_(d1), d2_(d2),
        v_(static_cast<size_t>(d0) * d1 * d2, fill) {}

  double& operator()(int i, int j, int k) {
    return v_[(static_cast<size_t>(i) * d1_ + j) * d2_ + k];
  }
  double operator()(int i, int j, int k) const {
    return v_[(static_cast<size_t>(i) * d1_ + j) * d2_ + k];
  }

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  bool empty() const { return v_.empty(); }
  const std::vector<double>& data() const { return v_; }
  std::vector<double>& data() { return v_; }

 private:
  int d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<double> v_;
};

class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(int d0, int d1, int d2, int d3, double fill = 0.0)
      : d0_(d0), d1_(d1), d2_(d2), d3_(d3),
        v_((static_cast<size_t>(d0) * d1) * (static_cast<size_t>(d2) * d3), fill) {}

  double& operator()(int i, int j, int k, int l) {
    return v_[((static_cast<size_t>(i) * d1_ + j) * d2_ + k) * d3_ + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return v_[((static_cast<size_t>(i) * d1_ + j) * d2_ + k) * d3_ + l];
  }

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  int dim3() const { return d3_; }
  bool empty() const { return v_.empty(); }
  const std::vector<double>& data() const { return v_; }
  std::vector<double>& data() { return v_; }

 private:
  int d0_ = 0, d1_ = 0, d2_ = 0, d3_ = 0;
  std::vector<double> v_;
};

}  // namespace cdt
