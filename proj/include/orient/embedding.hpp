#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "orient/config.hpp"
#include "orient/errors.hpp"
#include "orient/rng.hpp"
#include "orient/vectorize.hpp"

namespace orient {

struct SvdResult {
    RowMajorMatrix u;          // n x k
    Eigen::VectorXd s;         // k, descending
    Eigen::MatrixXd v;         // m x k
    int iterations = 0;
    double last_change = 0.0;  // final relative change of the Ritz values
};

namespace detail {

inline RowMajorMatrix thin_q(const RowMajorMatrix& y) {
    Eigen::HouseholderQR<RowMajorMatrix> qr(y);
    RowMajorMatrix q = RowMajorMatrix::Identity(y.rows(), y.cols());
    q.applyOnTheLeft(qr.householderQ());
    return q;
}

inline Eigen::VectorXd singular_values_of(const RowMajorMatrix& z) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(z);
    return svd.singularValues();
}

}  // namespace detail

// Rank-k truncated SVD of a sparse matrix via seeded randomized subspace
// iteration: a Gaussian sketch is refined with power iterations (QR
// re-orthonormalization each step) until the Ritz values of the working
// subspace stabilize to the configured tolerance, then the factorization is
// recovered from the small projected matrix. Deterministic given the seed.
inline SvdResult truncated_svd(const SparseMatrix& x, int k, std::uint64_t seed,
                               const SvdConfig& cfg = SvdConfig{}) {
    const int n = x.n_rows;
    const int m = x.n_cols;
    if (k < 1) throw ConfigError("truncated_svd: k must be >= 1");
    if (k > std::min(n, m))
        throw ConfigError("truncated_svd: k=" + std::to_string(k) + " exceeds min(" +
                          std::to_string(n) + "," + std::to_string(m) + ")");

    const int l = std::min(k + cfg.oversampling, std::min(n, m));

    Rng rng(mix_seed(seed, 0x5fd1));
    RowMajorMatrix sketch(m, l);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < l; ++j) sketch(i, j) = rng.normal();

    RowMajorMatrix y;
    x.multiply_dense(sketch, y);  // n x l
    RowMajorMatrix q = detail::thin_q(y);

    Eigen::VectorXd prev;
    double last_change = std::numeric_limits<double>::infinity();
    bool converged = false;
    int it = 0;
    RowMajorMatrix z;
    while (it < cfg.max_iters) {
        ++it;
        x.multiply_dense_transposed(q, z);  // m x l
        const Eigen::VectorXd sv = detail::singular_values_of(z);
        if (prev.size() == sv.size() && it > cfg.min_power_iters) {
            const double scale = std::max(sv(0), 1e-300);
            last_change = (sv - prev).cwiseAbs().maxCoeff() / scale;
            if (last_change < cfg.tolerance) {
                converged = true;
                break;
            }
        }
        prev = sv;
        RowMajorMatrix qz = detail::thin_q(z);
        x.multiply_dense(qz, y);
        q = detail::thin_q(y);
    }
    if (!converged)
        throw DegenerateError("truncated_svd: no convergence after " + std::to_string(it) +
                              " iterations (last relative change " +
                              std::to_string(last_change) + ", tolerance " +
                              std::to_string(cfg.tolerance) + ")");

    // Recover the factorization from B = Q^T X = Z^T.
    x.multiply_dense_transposed(q, z);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(z.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);

    SvdResult result;
    result.iterations = it;
    result.last_change = last_change;
    result.u = q * svd.matrixU().leftCols(k);
    result.s = svd.singularValues().head(k);
    result.v = svd.matrixV().leftCols(k);

    // Deterministic sign convention: the largest-magnitude entry of each left
    // singular vector is made positive.
    for (int j = 0; j < k; ++j) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            const double a = std::abs(result.u(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (result.u(arg, j) < 0.0) {
            result.u.col(j) = -result.u.col(j);
            result.v.col(j) = -result.v.col(j);
        }
    }
    return result;
}

// Latent representation of the client utterances: truncated left singular
// vectors after the optional first-dimension removal, rows renormalized to
// unit length. Rows whose remaining coordinates are (numerically) zero are
// flagged and excluded from downstream statistics.
struct LatentSpace {
    RowMajorMatrix row_embeddings;    // n x k, unit rows except flagged ones
    Eigen::VectorXd singular_values;  // k retained values, descending
    int k = 0;
    bool dropped_first = false;
    std::vector<std::uint8_t> zero_flags;  // per row

    bool is_zero_row(int i) const { return zero_flags[static_cast<std::size_t>(i)] != 0; }
    std::vector<int> zero_rows() const {
        std::vector<int> out;
        for (int i = 0; i < static_cast<int>(zero_flags.size()); ++i)
            if (zero_flags[static_cast<std::size_t>(i)]) out.push_back(i);
        return out;
    }
};

inline constexpr double kZeroRowNorm = 1e-12;

// Drops the first column of U and first singular value, keeps k_keep
// dimensions and renormalizes every row. known_zero_rows marks rows that were
// all-zero in the input matrix (their embeddings are noise and are zeroed).
inline LatentSpace strip_first_component(const RowMajorMatrix& u, const Eigen::VectorXd& s,
                                         int k_keep,
                                         const std::vector<int>& known_zero_rows = {}) {
    if (u.cols() < k_keep + 1)
        throw ConfigError("strip_first_component: need at least k_keep+1 columns");
    LatentSpace space;
    space.k = k_keep;
    space.dropped_first = true;
    space.row_embeddings = u.block(0, 1, u.rows(), k_keep);
    space.singular_values = s.segment(1, k_keep);
    for (int j = 0; j < k_keep; ++j)
        if (!(space.singular_values(j) > 0.0))
            throw DegenerateError("strip_first_component: non-positive singular value at " +
                                  std::to_string(j + 1));

    space.zero_flags.assign(static_cast<std::size_t>(u.rows()), 0);
    for (int r : known_zero_rows) {
        space.zero_flags[static_cast<std::size_t>(r)] = 1;
        space.row_embeddings.row(r).setZero();
    }
    for (int i = 0; i < space.row_embeddings.rows(); ++i) {
        if (space.is_zero_row(i)) continue;
        const double norm = space.row_embeddings.row(i).norm();
        if (norm < kZeroRowNorm) {
            space.zero_flags[static_cast<std::size_t>(i)] = 1;
            space.row_embeddings.row(i).setZero();
        } else {
            space.row_embeddings.row(i) /= norm;
        }
    }
    return space;
}

// As strip_first_component but keeping the first dimension (configuration
// alternative for counting latent dimensions before removal).
inline LatentSpace keep_all_components(const RowMajorMatrix& u, const Eigen::VectorXd& s,
                                       int k_keep, const std::vector<int>& known_zero_rows = {}) {
    if (u.cols() < k_keep)
        throw ConfigError("keep_all_components: need at least k_keep columns");
    LatentSpace space;
    space.k = k_keep;
    space.dropped_first = false;
    space.row_embeddings = u.leftCols(k_keep);
    space.singular_values = s.head(k_keep);
    for (int j = 0; j < k_keep; ++j)
        if (!(space.singular_values(j) > 0.0))
            throw DegenerateError("keep_all_components: non-positive singular value at " +
                                  std::to_string(j));
    space.zero_flags.assign(static_cast<std::size_t>(u.rows()), 0);
    for (int r : known_zero_rows) {
        space.zero_flags[static_cast<std::size_t>(r)] = 1;
        space.row_embeddings.row(r).setZero();
    }
    for (int i = 0; i < space.row_embeddings.rows(); ++i) {
        if (space.is_zero_row(i)) continue;
        const double norm = space.row_embeddings.row(i).norm();
        if (norm < kZeroRowNorm) {
            space.zero_flags[static_cast<std::size_t>(i)] = 1;
            space.row_embeddings.row(i).setZero();
        } else {
            space.row_embeddings.row(i) /= norm;
        }
    }
    return space;
}

inline LatentSpace make_latent_space(const SvdResult& svd, int k_keep, bool drop_first,
                                     const std::vector<int>& known_zero_rows = {}) {
    return drop_first ? strip_first_component(svd.u, svd.s, k_keep, known_zero_rows)
                      : keep_all_components(svd.u, svd.s, k_keep, known_zero_rows);
}

struct WeightedMember {
    int row = 0;
    double weight = 0.0;
};

// Maps a weighted bag of rows into the latent space: the weighted sum of row
// embeddings with each coordinate divided by the corresponding singular
// value. Flagged rows are skipped; a bag with no usable member is an error.
inline Eigen::VectorXd project_weighted_bag(const std::vector<WeightedMember>& members,
                                            const LatentSpace& space) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(space.k);
    bool any = false;
    for (const auto& m : members) {
        if (m.weight <= 0.0 || space.is_zero_row(m.row)) continue;
        sum += m.weight * space.row_embeddings.row(m.row).transpose();
        any = true;
    }
    if (!any) throw DegenerateError("project_weighted_bag: no usable member");
    return sum.cwiseQuotient(space.singular_values);
}

}  // namespace orient
