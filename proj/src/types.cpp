#include "ssr/types.hpp"

#include <stdexcept>

namespace ssr {

SplitComplexVector::SplitComplexVector(Vec re_part, Vec im_part)
    : re(std::move(re_part)), im(std::move(im_part)) {
    if (re.size() != im.size()) {
        throw std::invalid_argument("SplitComplexVector: real/imaginary lengths differ");
    }
}

SplitComplexVector SplitComplexVector::zero(Eigen::Index n) {
    return {Vec::Zero(n), Vec::Zero(n)};
}

double SplitComplexVector::magnitude(Eigen::Index k) const {
    return std::sqrt(re[k] * re[k] + im[k] * im[k]);
}

CVec SplitComplexVector::to_complex() const {
    CVec v(re.size());
    for (Eigen::Index k = 0; k < re.size(); ++k) v[k] = {re[k], im[k]};
    return v;
}

SplitComplexVector SplitComplexVector::from_complex(const CVec& v) {
    SplitComplexVector out;
    out.re = v.real();
    out.im = v.imag();
    return out;
}

MeasurementMatrix::MeasurementMatrix(Mat re_part, Mat im_part)
    : re(std::move(re_part)), im(std::move(im_part)) {
    if (re.rows() != im.rows() || re.cols() != im.cols()) {
        throw std::invalid_argument("MeasurementMatrix: real/imaginary shapes differ");
    }
}

double MeasurementMatrix::column_norm(Eigen::Index n) const {
    return std::sqrt(re.col(n).squaredNorm() + im.col(n).squaredNorm());
}

CMat MeasurementMatrix::to_complex() const {
    CMat m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

MeasurementMatrix MeasurementMatrix::from_complex(const CMat& m) {
    MeasurementMatrix out;
    out.re = m.real();
    out.im = m.imag();
    return out;
}

SplitComplexVector complex_matvec(const MeasurementMatrix& A, const SplitComplexVector& x) {
    if (x.size() != A.cols()) {
        throw std::invalid_argument("complex_matvec: signal length does not match matrix columns");
    }
    SplitComplexVector y;
    y.re = A.re * x.re - A.im * x.im;
    y.im = A.im * x.re + A.re * x.im;
    return y;
}

BinaryVec support_of(const SplitComplexVector& x, double tol) {
    if (tol < 0.0) throw std::invalid_argument("support_of: negative tolerance");
    BinaryVec out(static_cast<std::size_t>(x.size()));
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        out[static_cast<std::size_t>(k)] = x.magnitude(k) > tol ? 1 : 0;
    }
    return out;
}

}  // namespace ssr
