#include "tracegym/tensor.hpp"

#include <cmath>
#include <sstream>

namespace tracegym {

std::string Shape::to_string() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < row_dims.size(); ++i)
        os << (i ? "," : "") << row_dims[i];
    os << ";";
    for (std::size_t i = 0; i < col_dims.size(); ++i)
        os << (i ? "," : "") << col_dims[i];
    os << ")";
    return os.str();
}

std::int64_t flatten_index(const std::vector<std::int64_t>& dims,
                           const std::vector<std::int64_t>& idx) {
    if (dims.size() != idx.size()) throw ShapeError("flatten_index: rank mismatch");
    std::int64_t flat = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= dims[k]) throw ShapeError("flatten_index: out of range");
        flat = flat * dims[k] + idx[k];
    }
    return flat;
}

std::vector<std::int64_t> unflatten_index(const std::vector<std::int64_t>& dims,
                                          std::int64_t flat) {
    std::vector<std::int64_t> idx(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        idx[k] = flat % dims[k];
        flat /= dims[k];
    }
    return idx;
}

DenseTensor DenseTensor::identity(const Shape& shape) {
    if (!shape.is_square()) throw ShapeError("identity: square shape required");
    DenseTensor id(shape);
    const std::int64_t n = shape.row_size();
    for (std::int64_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
    return id;
}

cplx& DenseTensor::at(const std::vector<std::int64_t>& row_idx,
                      const std::vector<std::int64_t>& col_idx) {
    const auto r = flatten_index(shape_.row_dims, row_idx);
    const auto c = flatten_index(shape_.col_dims, col_idx);
    return data_[static_cast<std::size_t>(r * shape_.col_size() + c)];
}

const cplx& DenseTensor::at(const std::vector<std::int64_t>& row_idx,
                            const std::vector<std::int64_t>& col_idx) const {
    return const_cast<DenseTensor&>(*this).at(row_idx, col_idx);
}

bool DenseTensor::all_finite() const {
    for (const auto& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

Eigen::MatrixXcd matricize(const DenseTensor& a) {
    const std::int64_t nr = a.rows(), nc = a.cols();
    Eigen::MatrixXcd m(nr, nc);
    for (std::int64_t r = 0; r < nr; ++r)
        for (std::int64_t c = 0; c < nc; ++c) m(r, c) = a[r * nc + c];
    return m;
}

DenseTensor dematricize(const Eigen::MatrixXcd& m, const Shape& shape) {
    if (m.rows() != shape.row_size() || m.cols() != shape.col_size())
        throw ShapeError("dematricize: matrix does not match shape " + shape.to_string());
    DenseTensor a(shape);
    const std::int64_t nc = shape.col_size();
    for (std::int64_t r = 0; r < m.rows(); ++r)
        for (std::int64_t c = 0; c < nc; ++c) a[r * nc + c] = m(r, c);
    return a;
}

DenseTensor einstein_product(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape().col_dims != b.shape().row_dims)
        throw ShapeError("einstein_product: contracted modes mismatch, " +
                         a.shape().to_string() + " vs " + b.shape().to_string());
    Shape out(a.shape().row_dims, b.shape().col_dims);
    return dematricize(matricize(a) * matricize(b), out);
}

DenseTensor kronecker_product(const DenseTensor& a, const DenseTensor& b) {
    std::vector<std::int64_t> rd = a.shape().row_dims, cd = a.shape().col_dims;
    rd.insert(rd.end(), b.shape().row_dims.begin(), b.shape().row_dims.end());
    cd.insert(cd.end(), b.shape().col_dims.begin(), b.shape().col_dims.end());
    Shape out(std::move(rd), std::move(cd));

    const std::int64_t br = b.rows(), bc = b.cols();
    DenseTensor k(out);
    const std::int64_t out_cols = out.col_size();
    for (std::int64_t ar = 0; ar < a.rows(); ++ar)
        for (std::int64_t ac = 0; ac < a.cols(); ++ac) {
            const cplx av = a[ar * a.cols() + ac];
            if (av == cplx{}) continue;
            for (std::int64_t r = 0; r < br; ++r)
                for (std::int64_t c = 0; c < bc; ++c)
                    k[(ar * br + r) * out_cols + (ac * bc + c)] = av * b[r * bc + c];
        }
    return k;
}

DenseTensor kronecker_sum(const DenseTensor& a, const DenseTensor& b) {
    if (!a.shape().is_square() || !b.shape().is_square())
        throw ShapeError("kronecker_sum: square tensors required");
    const auto ia = DenseTensor::identity(a.shape());
    const auto ib = DenseTensor::identity(b.shape());
    return kronecker_product(a, ib) + kronecker_product(ia, b);
}

DenseTensor conj_transpose(const DenseTensor& a) {
    Shape out(a.shape().col_dims, a.shape().row_dims);
    DenseTensor t(out);
    const std::int64_t nr = a.rows(), nc = a.cols();
    for (std::int64_t r = 0; r < nr; ++r)
        for (std::int64_t c = 0; c < nc; ++c)
            t[c * nr + r] = std::conj(a[r * nc + c]);
    return t;
}

cplx trace(const DenseTensor& a) {
    if (!a.shape().is_square()) throw ShapeError("trace: square tensor required");
    cplx t{};
    const std::int64_t n = a.rows();
    for (std::int64_t i = 0; i < n; ++i) t += a[i * n + i];
    return t;
}

cplx frobenius_inner(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("frobenius_inner: shape mismatch");
    cplx s{};
    for (std::size_t i = 0; i < a.data().size(); ++i)
        s += std::conj(a.data()[i]) * b.data()[i];
    return s;
}

double frobenius_norm(const DenseTensor& a) {
    double s = 0;
    for (const auto& v : a.data()) s += std::norm(v);
    return std::sqrt(s);
}

DenseTensor operator+(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("operator+: shape mismatch");
    DenseTensor c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

DenseTensor operator-(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("operator-: shape mismatch");
    DenseTensor c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

DenseTensor operator*(cplx s, const DenseTensor& a) {
    DenseTensor c = a;
    for (auto& v : c.data()) v *= s;
    return c;
}

DenseTensor operator*(double s, const DenseTensor& a) { return cplx(s, 0.0) * a; }

DenseTensor hermitian_part(const DenseTensor& a) {
    if (!a.shape().is_square()) throw ShapeError("hermitian_part: square tensor required");
    return 0.5 * (a + conj_transpose(a));
}

bool approx_equal(const DenseTensor& a, const DenseTensor& b, double tol) {
    return a.shape() == b.shape() && frobenius_norm(a - b) <= tol;
}

} // namespace tracegym
