#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "orient/errors.hpp"
#include "orient/phrasing.hpp"

namespace orient {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A document as a bag of vocabulary ids with counts, sorted by id.
using Bag = std::vector<std::pair<int, int>>;

inline Bag make_bag(const std::vector<std::vector<std::string>>& sentences,
                    const Vocabulary& vocab) {
    std::vector<int> ids;
    for (const auto& sentence : sentences)
        for (const auto& p : sentence) {
            const int id = vocab.id_of(p);
            if (id >= 0) ids.push_back(id);
        }
    std::sort(ids.begin(), ids.end());
    Bag bag;
    for (std::size_t i = 0; i < ids.size();) {
        std::size_t j = i;
        while (j < ids.size() && ids[j] == ids[i]) ++j;
        bag.emplace_back(ids[i], static_cast<int>(j - i));
        i = j;
    }
    return bag;
}

// Compressed-row sparse matrix. Column indices are sorted within each row and
// explicit zeros are never stored; a row with no entries is an all-zero row.
struct SparseMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<std::int64_t> row_ptr;  // size n_rows + 1
    std::vector<int> col_idx;
    std::vector<double> values;

    std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }
    std::int64_t row_nnz(int i) const { return row_ptr[i + 1] - row_ptr[i]; }
    bool row_is_zero(int i) const { return row_nnz(i) == 0; }

    double row_norm(int i) const {
        double s = 0.0;
        for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * values[k];
        return std::sqrt(s);
    }

    // (row, col, value) triplets, one per line; for debugging and external
    // cross-checks.
    void dump_triplets(std::ostream& out) const {
        for (int i = 0; i < n_rows; ++i)
            for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                out << i << ' ' << col_idx[k] << ' ' << values[k] << '\n';
    }

    Eigen::VectorXd dense_row(int i) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n_cols);
        for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) v[col_idx[k]] = values[k];
        return v;
    }

    // out = X * D, D dense (n_cols x w)
    void multiply_dense(const RowMajorMatrix& d, RowMajorMatrix& out) const {
        out.setZero(n_rows, d.cols());
        for (int i = 0; i < n_rows; ++i) {
            auto row = out.row(i);
            for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                row += values[k] * d.row(col_idx[k]);
        }
    }

    // out = X^T * D, D dense (n_rows x w)
    void multiply_dense_transposed(const RowMajorMatrix& d, RowMajorMatrix& out) const {
        out.setZero(n_cols, d.cols());
        for (int i = 0; i < n_rows; ++i) {
            const auto row = d.row(i);
            for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                out.row(col_idx[k]) += values[k] * row;
        }
    }
};

struct TfIdfModel {
    Vocabulary vocabulary;
    std::vector<double> idf;  // by id; 0 marks a phrasing excluded for df = 0
    bool row_normalize = true;
    bool log_tf = false;
    long n_documents = 0;
    int zero_df_warnings = 0;
};

// idf(w) = 1 + ln(N / df(w)), df counted over the supplied documents.
// In-vocabulary phrasings that never occur get idf 0 and are excluded with a
// warning count (possible when the vocabulary was built on a superset).
inline TfIdfModel fit_tfidf(const std::vector<Bag>& documents, Vocabulary vocab,
                            bool row_normalize = true, bool log_tf = false) {
    if (documents.empty()) throw DataError("fit_tfidf: no documents");
    TfIdfModel model;
    model.row_normalize = row_normalize;
    model.log_tf = log_tf;
    model.n_documents = static_cast<long>(documents.size());

    std::vector<long> df(static_cast<std::size_t>(vocab.size()), 0);
    for (const auto& doc : documents)
        for (const auto& [id, count] : doc)
            if (id >= 0 && id < vocab.size()) ++df[static_cast<std::size_t>(id)];

    model.idf.assign(static_cast<std::size_t>(vocab.size()), 0.0);
    const double n = static_cast<double>(documents.size());
    for (int id = 0; id < vocab.size(); ++id) {
        if (df[static_cast<std::size_t>(id)] == 0) {
            ++model.zero_df_warnings;
            continue;
        }
        model.idf[static_cast<std::size_t>(id)] =
            1.0 + std::log(n / static_cast<double>(df[static_cast<std::size_t>(id)]));
    }
    model.vocabulary = std::move(vocab);
    return model;
}

// Entry (i, w) = tf(i, w) * idf(w); rows scaled to unit Euclidean norm when
// the model says so. All-zero rows are kept so row indices stay aligned with
// the document list; callers detect them via row_is_zero.
inline SparseMatrix transform_tfidf(const std::vector<Bag>& documents, const TfIdfModel& model) {
    SparseMatrix x;
    x.n_rows = static_cast<int>(documents.size());
    x.n_cols = model.vocabulary.size();
    x.row_ptr.assign(static_cast<std::size_t>(x.n_rows) + 1, 0);

    for (int i = 0; i < x.n_rows; ++i) {
        const Bag& doc = documents[static_cast<std::size_t>(i)];
        std::size_t row_start = x.values.size();
        for (const auto& [id, count] : doc) {
            if (id < 0 || id >= x.n_cols) continue;
            const double idf = model.idf[static_cast<std::size_t>(id)];
            if (idf == 0.0) continue;
            const double tf =
                model.log_tf ? 1.0 + std::log(static_cast<double>(count)) : static_cast<double>(count);
            x.col_idx.push_back(id);
            x.values.push_back(tf * idf);
        }
        if (model.row_normalize) {
            double s = 0.0;
            for (std::size_t k = row_start; k < x.values.size(); ++k) s += x.values[k] * x.values[k];
            if (s > 0.0) {
                const double inv = 1.0 / std::sqrt(s);
                for (std::size_t k = row_start; k < x.values.size(); ++k) x.values[k] *= inv;
            }
        }
        x.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<std::int64_t>(x.values.size());
    }
    return x;
}

// 1 - cos(u, v), in [0, 2]. Zero-norm inputs are an error; callers choose the
// skip policy for degenerate embeddings.
inline double cosine_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0)
        throw DegenerateError("cosine_distance: zero-norm vector");
    const double d = 1.0 - u.dot(v) / (nu * nv);
    return std::min(2.0, std::max(0.0, d));
}

// Cosine distance between two rows of a sparse matrix (sorted-index merge).
inline double cosine_distance_rows(const SparseMatrix& x, int i, int j) {
    const double ni = x.row_norm(i);
    const double nj = x.row_norm(j);
    if (ni == 0.0 || nj == 0.0)
        throw DegenerateError("cosine_distance_rows: zero-norm row");
    double dot = 0.0;
    std::int64_t a = x.row_ptr[i], a_end = x.row_ptr[i + 1];
    std::int64_t b = x.row_ptr[j], b_end = x.row_ptr[j + 1];
    while (a < a_end && b < b_end) {
        if (x.col_idx[a] == x.col_idx[b])
            dot += x.values[a++] * x.values[b++];
        else if (x.col_idx[a] < x.col_idx[b])
            ++a;
        else
            ++b;
    }
    const double d = 1.0 - dot / (ni * nj);
    return std::min(2.0, std::max(0.0, d));
}

}  // namespace orient
