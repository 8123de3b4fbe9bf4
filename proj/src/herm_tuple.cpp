#include "nct/herm_tuple.hpp"
#include <limits>

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace nct {

double HermTuple::herm_defect() const {
    double m = 0.0;
    for (const auto& a : mats) m = std::max(m, (a - a.adjoint()).cwiseAbs().maxCoeff());
    return m;
}

HermTuple& HermTuple::operator+=(const HermTuple& o) {
    if (N != o.N || d != o.d) throw std::invalid_argument("HermTuple: shape mismatch");
    for (int i = 0; i < d; ++i) mats[i] += o.mats[i];
    return *this;
}

HermTuple& HermTuple::operator*=(double s) {
    for (auto& m : mats) m *= s;
    return *this;
}

double HermTuple::max_norm_estimate(int iters) const {
    double best = 0.0;
    for (const auto& a : mats) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Ones(N).normalized();
        double lam = 0.0;
        for (int it = 0; it < iters; ++it) {
            Eigen::VectorXcd w = a * v;
            lam = w.norm();
            if (!std::isfinite(lam)) return std::numeric_limits<double>::infinity();
            if (lam == 0.0) break;
            v = w / lam;
        }
        best = std::max(best, lam);
    }
    return best;
}

double HermTuple::max_norm_exact() const {
    double best = 0.0;
    for (const auto& a : mats) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()),
                                                 Eigen::EigenvaluesOnly);
        best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return best;
}

double tr_n(const Matrix& m) { return m.trace().real() / static_cast<double>(m.rows()); }
Complex tr_n_c(const Matrix& m) { return m.trace() / static_cast<double>(m.rows()); }

const Matrix& EvalContext::word(const Word& w) {
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    Matrix m;
    if (w.empty()) {
        m = Matrix::Identity(x_.N, x_.N);
    } else if (w.size() == 1) {
        m = x_[static_cast<std::size_t>(w.letters[0] - 1)];
    } else {
        // split in half so powers reuse cached halves
        std::size_t half = w.size() / 2;
        const Matrix& a = word(w.subword(0, half));
        const Matrix& b = word(w.subword(half, w.size()));
        m = a * b;
    }
    return cache_.emplace(w, std::move(m)).first->second;
}

Complex EvalContext::trace_value(const std::vector<Word>& traces) {
    Complex v = 1.0;
    for (const auto& t : traces) v *= tr_n_c(word(t));
    return v;
}

Matrix eval(const TracePoly& p, EvalContext& ctx) {
    const int N = ctx.point().N;
    if (p.dim() > ctx.point().d)
        throw std::invalid_argument("eval: alphabet larger than tuple");
    Matrix out = Matrix::Zero(N, N);
    for (const auto& [key, c] : p.terms())
        out += (c * ctx.trace_value(key.traces)) * ctx.word(key.word);
    return out;
}

Matrix eval(const TracePoly& p, const HermTuple& x) {
    EvalContext ctx(x);
    return eval(p, ctx);
}

Matrix frechet_dir(const TracePoly& p, EvalContext& ctx, const HermTuple& y) {
    const HermTuple& x = ctx.point();
    if (y.N != x.N || y.d != x.d) throw std::invalid_argument("frechet_dir: shape mismatch");
    const int N = x.N;
    Matrix out = Matrix::Zero(N, N);
    for (const auto& [key, c] : p.terms()) {
        const Complex tv = c * ctx.trace_value(key.traces);
        // product rule on the outer word: sum over word = A Xi B of A y_i B,
        // skipping multiplications by unit subwords
        const auto& ls = key.word.letters;
        if (tv != Complex(0.0)) {
            for (std::size_t t = 0; t < ls.size(); ++t) {
                const Matrix& yv = y[static_cast<std::size_t>(ls[t] - 1)];
                const bool no_pre = t == 0, no_suf = t + 1 == ls.size();
                if (no_pre && no_suf) {
                    out += tv * yv;
                } else if (no_pre) {
                    out += tv * (yv * ctx.word(key.word.subword(1, ls.size())));
                } else if (no_suf) {
                    out += tv * (ctx.word(key.word.subword(0, t)) * yv);
                } else {
                    out += tv * (ctx.word(key.word.subword(0, t)) * yv *
                                 ctx.word(key.word.subword(t + 1, ls.size())));
                }
            }
        }
        // trace factors: tr(R) differentiates to tr_N(D_i R(x) y_i)
        for (std::size_t k = 0; k < key.traces.size(); ++k) {
            Complex others = c;
            for (std::size_t j = 0; j < key.traces.size(); ++j)
                if (j != k) others *= tr_n_c(ctx.word(key.traces[j]));
            const Word& r = key.traces[k];
            Complex dtr = 0.0;
            for (std::size_t t = 0; t < r.size(); ++t) {
                const Matrix& yv = y[static_cast<std::size_t>(r.letters[t] - 1)];
                if (r.size() == 1) {
                    dtr += tr_n_c(yv);
                } else {
                    Word ba = r.subword(t + 1, r.size()).concat(r.subword(0, t));
                    dtr += tr_n_c(ctx.word(ba) * yv);
                }
            }
            out += (others * dtr) * ctx.word(key.word);
        }
    }
    return out;
}

Matrix frechet_dir(const TracePoly& p, const HermTuple& x, const HermTuple& y) {
    EvalContext ctx(x);
    return frechet_dir(p, ctx, y);
}

std::map<int, Matrix> eval_kron1(const TensorPoly& t, EvalContext& ctx) {
    if (t.arity() != 2) throw std::invalid_argument("eval_kron1: arity must be 2");
    const int N = ctx.point().N;
    std::map<int, Matrix> out;
    for (const auto& [key, c] : t.terms()) {
        int i = key.idx.empty() ? 0 : key.idx[0];
        auto [it, inserted] = out.try_emplace(i, Matrix::Zero(N * N, N * N));
        const Matrix& a = ctx.word(key.words[0]);
        Matrix bt = ctx.word(key.words[1]).transpose();
        Complex w = c * ctx.trace_value(key.traces);
        for (int r = 0; r < N; ++r)
            for (int s = 0; s < N; ++s)
                it->second.block(r * N, s * N, N, N) += (w * a(r, s)) * bt;
    }
    return out;
}

}  // namespace nct
