/**
 * @file graded_linalg.hpp
 * @brief Finite-type cochain complexes, graded endomorphisms and the quotient
 *        End^{-1}(V) / [d, End^{-2}(V)].
 *
 * A graded map of degree d is stored as one dense matrix on the total space
 * V = V^lo + ... + V^hi, with only the blocks V^k -> V^{k+d} populated.  All
 * products are then plain matrix products.
 */
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace holonomy {

using Mat = Eigen::MatrixXd;

/// Raised on complex mismatches, malformed blocks and degree errors.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CochainComplex;
using ComplexPtr = std::shared_ptr<const CochainComplex>;

/**
 * Cochain complex (V, d) with d of degree +1 and d o d = 0.
 */
class CochainComplex {
public:
    /**
     * @param lowest   Degree of dims[0].
     * @param dims     Dimensions of V^lowest, V^{lowest+1}, ...
     * @param blocks   blocks[i] is d: V^{lowest+i} -> V^{lowest+i+1}
     *                 (dims[i+1] x dims[i]); missing trailing blocks are zero.
     */
    static ComplexPtr create(int lowest, std::vector<int> dims, std::vector<Mat> blocks)
    {
        return ComplexPtr(new CochainComplex(lowest, std::move(dims), std::move(blocks)));
    }

    int lowest_degree() const { return lo_; }
    int highest_degree() const { return lo_ + static_cast<int>(dims_.size()) - 1; }
    int dim(int k) const
    {
        if (k < lo_ || k > highest_degree()) return 0;
        return dims_[k - lo_];
    }
    int total_dim() const { return n_; }
    int offset(int k) const { return offsets_[k - lo_]; }
    const std::vector<int>& dims() const { return dims_; }

    /// d: V^k -> V^{k+1} as a dims(k+1) x dims(k) matrix.
    Mat differential_block(int k) const
    {
        if (dim(k) == 0 || dim(k + 1) == 0) return Mat::Zero(dim(k + 1), dim(k));
        return D_.block(offset(k + 1), offset(k), dim(k + 1), dim(k));
    }

    /// Total differential on V.
    const Mat& D() const { return D_; }

    /// 0/1 pattern of the blocks a degree-d map may populate.
    Mat degree_mask(int d) const
    {
        Mat m = Mat::Zero(n_, n_);
        for (int k = lo_; k <= highest_degree(); ++k) {
            if (dim(k) > 0 && dim(k + d) > 0)
                m.block(offset(k + d), offset(k), dim(k + d), dim(k)).setOnes();
        }
        return m;
    }

    /**
     * Orthonormal basis (columns, vectorised column-major N*N) of the image of
     * h -> [d, h] on End^{-2}(V), plus witnesses h_j with [d, h_j] = basis_j.
     * Computed once and cached.
     */
    struct BoundaryData {
        Mat basis;                  // (N*N) x r
        std::vector<Mat> witness;   // r total matrices of degree -2
    };

    const BoundaryData& boundary_data() const
    {
        std::call_once(once_, [this] { compute_boundary(); });
        return boundary_;
    }

private:
    CochainComplex(int lowest, std::vector<int> dims, std::vector<Mat> blocks)
        : lo_(lowest), dims_(std::move(dims))
    {
        if (dims_.empty()) throw StructuralError("complex has no degrees");
        n_ = 0;
        for (int d : dims_) {
            if (d < 0) throw StructuralError("negative dimension");
            offsets_.push_back(n_);
            n_ += d;
        }
        if (n_ == 0) throw StructuralError("complex has total dimension 0");
        if (blocks.size() > dims_.size()) throw StructuralError("too many differential blocks");
        D_ = Mat::Zero(n_, n_);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            int k = lo_ + static_cast<int>(i);
            const Mat& b = blocks[i];
            if (b.size() == 0 && (dim(k) == 0 || dim(k + 1) == 0)) continue;
            if (b.rows() != dim(k + 1) || b.cols() != dim(k))
                throw StructuralError("differential block " + std::to_string(k) + " has shape " +
                                      std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                                      ", expected " + std::to_string(dim(k + 1)) + "x" +
                                      std::to_string(dim(k)));
            if (!b.allFinite()) throw StructuralError("differential block has non-finite entries");
            D_.block(offset(k + 1), offset(k), dim(k + 1), dim(k)) = b;
        }
        double sq = (D_ * D_).cwiseAbs().maxCoeff();
        if (sq > 1e-12)
            throw StructuralError("differential does not square to zero (max entry " + std::to_string(sq) + ")");
    }

    void compute_boundary() const
    {
        const Mat mask = degree_mask(-2);
        std::vector<std::pair<int, int>> entries;
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i)
                if (mask(i, j) != 0.0) entries.emplace_back(i, j);
        const int m = static_cast<int>(entries.size());
        boundary_.basis = Mat::Zero(n_ * n_, 0);
        if (m == 0) return;
        Mat images(n_ * n_, m);
        for (int c = 0; c < m; ++c) {
            Mat e = Mat::Zero(n_, n_);
            e(entries[c].first, entries[c].second) = 1.0;
            Mat img = D_ * e - e * D_;
            images.col(c) = Eigen::Map<const Eigen::VectorXd>(img.data(), n_ * n_);
        }
        Eigen::JacobiSVD<Mat> svd(images, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv.size() == 0 || sv(0) == 0.0) return;
        int r = 0;
        while (r < sv.size() && sv(r) > 1e-10 * sv(0)) ++r;
        boundary_.basis = svd.matrixU().leftCols(r);
        for (int j = 0; j < r; ++j) {
            Mat h = Mat::Zero(n_, n_);
            for (int c = 0; c < m; ++c)
                h(entries[c].first, entries[c].second) = svd.matrixV()(c, j) / sv(j);
            boundary_.witness.push_back(h);
        }
    }

    int lo_;
    std::vector<int> dims_;
    std::vector<int> offsets_;
    int n_ = 0;
    Mat D_;
    mutable std::once_flag once_;
    mutable BoundaryData boundary_;
};

/**
 * Degree-d linear map V -> V.
 */
class GradedMap {
public:
    GradedMap() = default;

    /// Zero map of degree d.
    GradedMap(ComplexPtr cx, int degree) : cx_(std::move(cx)), deg_(degree)
    {
        if (!cx_) throw StructuralError("null complex");
        m_ = Mat::Zero(cx_->total_dim(), cx_->total_dim());
    }

    /**
     * Wrap a total matrix.  Entries outside the degree-d blocks must vanish
     * (to @p tol); they are then cleared exactly.
     */
    GradedMap(ComplexPtr cx, int degree, const Mat& total, double tol = 1e-12)
        : cx_(std::move(cx)), deg_(degree)
    {
        if (!cx_) throw StructuralError("null complex");
        const int n = cx_->total_dim();
        if (total.rows() != n || total.cols() != n)
            throw StructuralError("total matrix has wrong shape");
        if (!total.allFinite()) throw StructuralError("graded map has non-finite entries");
        Mat mask = cx_->degree_mask(degree);
        Mat off = total.cwiseProduct(Mat::Ones(n, n) - mask);
        if (off.size() && off.cwiseAbs().maxCoeff() > tol)
            throw StructuralError("matrix has entries outside the degree " + std::to_string(degree) + " blocks");
        m_ = total.cwiseProduct(mask);
    }

    static GradedMap identity(const ComplexPtr& cx)
    {
        return GradedMap(cx, 0, Mat::Identity(cx->total_dim(), cx->total_dim()));
    }

    static GradedMap differential(const ComplexPtr& cx) { return GradedMap(cx, 1, cx->D()); }

    /// Build from blocks; blocks[k - lowest] maps V^k -> V^{k+d}.
    static GradedMap from_blocks(const ComplexPtr& cx, int degree, const std::vector<Mat>& blocks)
    {
        GradedMap g(cx, degree);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            int k = cx->lowest_degree() + static_cast<int>(i);
            if (blocks[i].size() == 0) continue;
            if (cx->dim(k) == 0 || cx->dim(k + degree) == 0)
                throw StructuralError("block for degree " + std::to_string(k) + " has no target");
            if (blocks[i].rows() != cx->dim(k + degree) || blocks[i].cols() != cx->dim(k))
                throw StructuralError("block " + std::to_string(k) + " has wrong shape");
            g.m_.block(cx->offset(k + degree), cx->offset(k), cx->dim(k + degree), cx->dim(k)) = blocks[i];
        }
        return g;
    }

    const ComplexPtr& complex() const { return cx_; }
    int degree() const { return deg_; }
    const Mat& matrix() const { return m_; }

    /// Block V^k -> V^{k+degree} (empty matrix when either side is zero).
    Mat block(int k) const
    {
        int r = cx_->dim(k + deg_), c = cx_->dim(k);
        if (r == 0 || c == 0) return Mat(r, c);
        return m_.block(cx_->offset(k + deg_), cx_->offset(k), r, c);
    }

    double norm() const { return m_.norm(); }

    GradedMap operator+(const GradedMap& o) const { check_same(o); return raw(m_ + o.m_); }
    GradedMap operator-(const GradedMap& o) const { check_same(o); return raw(m_ - o.m_); }
    GradedMap operator-() const { return raw(-m_); }
    GradedMap operator*(double c) const { return raw(c * m_); }
    friend GradedMap operator*(double c, const GradedMap& g) { return g * c; }

    /// Unchecked construction used internally once the block pattern is known.
    static GradedMap unchecked(ComplexPtr cx, int degree, Mat total)
    {
        GradedMap g;
        g.cx_ = std::move(cx);
        g.deg_ = degree;
        g.m_ = std::move(total);
        return g;
    }

private:
    void check_same(const GradedMap& o) const
    {
        if (cx_ != o.cx_) throw StructuralError("graded maps live on different complexes");
        if (deg_ != o.deg_) throw StructuralError("graded maps have different degrees");
    }
    GradedMap raw(Mat m) const { return unchecked(cx_, deg_, std::move(m)); }

    ComplexPtr cx_;
    int deg_ = 0;
    Mat m_;
};

/// f o g; degree deg f + deg g.
inline GradedMap compose(const GradedMap& f, const GradedMap& g)
{
    if (f.complex() != g.complex()) throw StructuralError("compose: complex mismatch");
    return GradedMap::unchecked(f.complex(), f.degree() + g.degree(), f.matrix() * g.matrix());
}

/// [d, f] = d f - (-1)^deg f d.
inline GradedMap graded_commutator_with_differential(const GradedMap& f)
{
    const Mat& D = f.complex()->D();
    double sign = (f.degree() % 2 == 0) ? 1.0 : -1.0;
    return GradedMap::unchecked(f.complex(), f.degree() + 1, D * f.matrix() - sign * f.matrix() * D);
}

/**
 * Orthonormal basis of [d, End^{-2}(V)] with stored witnesses.
 */
struct BoundaryImageSpace {
    ComplexPtr complex;
    std::vector<GradedMap> basis;
    std::vector<GradedMap> witness;   // [d, witness[j]] == basis[j]
};

inline BoundaryImageSpace boundary_image_basis(const ComplexPtr& V)
{
    const auto& bd = V->boundary_data();
    const int n = V->total_dim();
    BoundaryImageSpace out{V, {}, {}};
    for (int j = 0; j < bd.basis.cols(); ++j) {
        Mat b = Eigen::Map<const Mat>(bd.basis.col(j).data(), n, n);
        out.basis.push_back(GradedMap::unchecked(V, -1, b));
        out.witness.push_back(GradedMap::unchecked(V, -2, bd.witness[j]));
    }
    return out;
}

/// Component of f orthogonal (Frobenius) to the boundary image.
inline GradedMap quotient_project(const GradedMap& f)
{
    if (f.degree() != -1) throw StructuralError("quotient_project expects a degree -1 map");
    const auto& Q = f.complex()->boundary_data().basis;
    if (Q.cols() == 0) return f;
    const int n = f.complex()->total_dim();
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(f.matrix().data(), n * n);
    v -= Q * (Q.transpose() * v);
    return GradedMap::unchecked(f.complex(), -1, Eigen::Map<const Mat>(v.data(), n, n));
}

/// Norm of f - g in End^{-1}/[d, End^{-2}].
inline double quotient_distance(const GradedMap& f, const GradedMap& g)
{
    return quotient_project(f - g).norm();
}

inline bool quotient_equal(const GradedMap& f, const GradedMap& g, double tol)
{
    return quotient_distance(f, g) <= tol;
}

}  // namespace holonomy
