#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tracegym/shape.hpp"

namespace tracegym {

using cplx = std::complex<double>;

/// Dense even-order tensor with entries stored row-major over
/// (row modes..., column modes...). All algebra is defined through the
/// matricization bijection: matricize(A *_N B) = matricize(A) * matricize(B).
class DenseTensor {
  public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape)
        : shape_(std::move(shape)),
          data_(static_cast<std::size_t>(shape_.row_size() * shape_.col_size())) {}

    static DenseTensor zero(Shape shape) { return DenseTensor(std::move(shape)); }

    /// Identity tensor prod_k delta_{i_k j_k} on a square shape.
    static DenseTensor identity(const Shape& shape);

    const Shape& shape() const { return shape_; }
    std::int64_t rows() const { return shape_.row_size(); }
    std::int64_t cols() const { return shape_.col_size(); }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

    cplx& operator[](std::int64_t flat) { return data_[static_cast<std::size_t>(flat)]; }
    const cplx& operator[](std::int64_t flat) const {
        return data_[static_cast<std::size_t>(flat)];
    }

    /// Entry addressed by multi-indices (bounds checked).
    cplx& at(const std::vector<std::int64_t>& row_idx,
             const std::vector<std::int64_t>& col_idx);
    const cplx& at(const std::vector<std::int64_t>& row_idx,
                   const std::vector<std::int64_t>& col_idx) const;

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    bool all_finite() const;

  private:
    Shape shape_;
    std::vector<cplx> data_;
};

/// Matricization: bijection onto row_size x col_size matrices. Round-trips
/// bit-exactly with dematricize.
Eigen::MatrixXcd matricize(const DenseTensor& a);
DenseTensor dematricize(const Eigen::MatrixXcd& m, const Shape& shape);

/// Einstein product A *_N B contracting A's column modes with B's row modes.
DenseTensor einstein_product(const DenseTensor& a, const DenseTensor& b);

/// Kronecker product: row modes (I...,K...), column modes (J...,L...), entries
/// a_{i,j} b_{k,l}; matricizes to the matrix Kronecker product.
DenseTensor kronecker_product(const DenseTensor& a, const DenseTensor& b);

/// Kronecker sum A (x) I + I (x) B of square tensors.
DenseTensor kronecker_sum(const DenseTensor& a, const DenseTensor& b);

DenseTensor conj_transpose(const DenseTensor& a);

cplx trace(const DenseTensor& a);

/// <A, B> = Tr(A^H *_N B) = entrywise sum conj(a) b.
cplx frobenius_inner(const DenseTensor& a, const DenseTensor& b);
double frobenius_norm(const DenseTensor& a);

DenseTensor operator+(const DenseTensor& a, const DenseTensor& b);
DenseTensor operator-(const DenseTensor& a, const DenseTensor& b);
DenseTensor operator*(cplx s, const DenseTensor& a);
DenseTensor operator*(double s, const DenseTensor& a);

/// Hermitian part (A + A^H)/2 of a square tensor.
DenseTensor hermitian_part(const DenseTensor& a);

bool approx_equal(const DenseTensor& a, const DenseTensor& b, double tol);

} // namespace tracegym
