#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nct/tensor_poly.hpp"
#include "nct/trace_poly.hpp"

namespace nct {

using Matrix = Eigen::MatrixXcd;

// A d-tuple of N x N complex Hermitian matrices: one model state or sample.
struct HermTuple {
    std::vector<Matrix> mats;
    int N = 0;
    int d = 0;

    HermTuple() = default;
    HermTuple(int N_, int d_) : N(N_), d(d_) { mats.assign(d_, Matrix::Zero(N_, N_)); }

    Matrix& operator[](std::size_t i) { return mats[i]; }
    const Matrix& operator[](std::size_t i) const { return mats[i]; }

    void symmetrize() {
        for (auto& m : mats) m = 0.5 * (m + m.adjoint()).eval();
    }
    double herm_defect() const;

    HermTuple& operator+=(const HermTuple& o);
    HermTuple& operator*=(double s);
    friend HermTuple operator+(HermTuple a, const HermTuple& b) { return a += b; }
    friend HermTuple operator*(double s, HermTuple a) { return a *= s; }

    // Largest |eigenvalue| over the tuple, estimated by power iteration.
    double max_norm_estimate(int iters = 12) const;
    // Exact operator norm (Hermitian eigenvalues).
    double max_norm_exact() const;
};

double tr_n(const Matrix& m);          // normalized trace, real part
Complex tr_n_c(const Matrix& m);       // normalized trace, complex

// Shared word-product cache for repeated evaluations at one point.
class EvalContext {
  public:
    explicit EvalContext(const HermTuple& x) : x_(x) {}
    const HermTuple& point() const { return x_; }
    const Matrix& word(const Word& w);
    Complex trace_value(const std::vector<Word>& traces);

  private:
    const HermTuple& x_;
    std::map<Word, Matrix> cache_;
};

// Evaluation of a trace polynomial on a Hermitian tuple: trace factors go
// through tr_N, the outer word through matrix products.
Matrix eval(const TracePoly& p, EvalContext& ctx);
Matrix eval(const TracePoly& p, const HermTuple& x);

// Directional (Frechet) derivative of p at x in direction y:
//   Dp(x)[y] = dp(x,x) # y + tr (x) id ( td p # (y (x) 1) ).
Matrix frechet_dir(const TracePoly& p, EvalContext& ctx, const HermTuple& y);
Matrix frechet_dir(const TracePoly& p, const HermTuple& x, const HermTuple& y);

// Kron-space evaluation of a degree-1 tensor: per variable-index value i the
// matrix sum coeff * traces(x) * kron(A(x), B(x)^T). Tensor identities then
// become matrix identities in M_{N^2}; #1 products become matrix products.
std::map<int, Matrix> eval_kron1(const TensorPoly& t, EvalContext& ctx);

}  // namespace nct
