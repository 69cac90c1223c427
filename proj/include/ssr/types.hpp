#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace ssr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using BinaryVec = std::vector<std::uint8_t>;

// Complex vector stored as (real, imaginary) pair of real vectors, the
// representation consumed by the real-valued encoder/decoder networks.
struct SplitComplexVector {
    Vec re;
    Vec im;

    SplitComplexVector() = default;
    SplitComplexVector(Vec re_part, Vec im_part);
    static SplitComplexVector zero(Eigen::Index n);

    Eigen::Index size() const { return re.size(); }
    double magnitude(Eigen::Index k) const;
    CVec to_complex() const;
    static SplitComplexVector from_complex(const CVec& v);
};

// Complex L x N measurement (pilot) matrix stored as two real matrices.
struct MeasurementMatrix {
    Mat re;
    Mat im;

    MeasurementMatrix() = default;
    MeasurementMatrix(Mat re_part, Mat im_part);

    Eigen::Index rows() const { return re.rows(); }  // L
    Eigen::Index cols() const { return re.cols(); }  // N
    double column_norm(Eigen::Index n) const;
    CMat to_complex() const;
    static MeasurementMatrix from_complex(const CMat& m);
};

// One (signal, support label) pair.
struct Sample {
    SplitComplexVector x;
    BinaryVec alpha;
};

enum class DatasetRole : std::uint32_t { Train = 0, Validation = 1, Test = 2 };

struct Dataset {
    std::vector<Sample> samples;
    DatasetRole role = DatasetRole::Train;

    std::size_t size() const { return samples.size(); }
    Eigen::Index signal_dim() const {
        return samples.empty() ? 0 : samples.front().x.size();
    }
};

// y = A x computed through the split real representation:
//   Re(y) = Re(A) Re(x) - Im(A) Im(x)
//   Im(y) = Im(A) Re(x) + Re(A) Im(x)
SplitComplexVector complex_matvec(const MeasurementMatrix& A, const SplitComplexVector& x);

// Binary support indicator: out[n] = 1 iff |x[n]| > tol.
BinaryVec support_of(const SplitComplexVector& x, double tol = 0.0);

}  // namespace ssr
