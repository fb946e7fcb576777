#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace ridetect {

/// Dense row-major matrix of doubles. Sized for the small networks used here;
/// no view/expression machinery, just contiguous storage and index access.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return a[static_cast<std::size_t>(r) * cols + c];
    }
    double operator()(int r, int c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return a[static_cast<std::size_t>(r) * cols + c];
    }

    std::span<double> row(int r) {
        assert(r >= 0 && r < rows);
        return {a.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
    std::span<const double> row(int r) const {
        assert(r >= 0 && r < rows);
        return {a.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }

    void fill(double v) { a.assign(a.size(), v); }

    bool operator==(const Mat&) const = default;
};

using Vec = std::vector<double>;

/// y += W x  (W is rows x cols, x has cols entries, y has rows entries)
inline void matvec_acc(const Mat& w, std::span<const double> x, std::span<double> y) {
    assert(static_cast<int>(x.size()) == w.cols && static_cast<int>(y.size()) == w.rows);
    const double* wr = w.a.data();
    for (int r = 0; r < w.rows; ++r, wr += w.cols) {
        double acc = 0.0;
        for (int c = 0; c < w.cols; ++c) acc += wr[c] * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] += acc;
    }
}

/// y += W^T x  (x has rows entries, y has cols entries)
inline void matvec_transpose_acc(const Mat& w, std::span<const double> x, std::span<double> y) {
    assert(static_cast<int>(x.size()) == w.rows && static_cast<int>(y.size()) == w.cols);
    const double* wr = w.a.data();
    for (int r = 0; r < w.rows; ++r, wr += w.cols) {
        const double xr = x[static_cast<std::size_t>(r)];
        for (int c = 0; c < w.cols; ++c) y[static_cast<std::size_t>(c)] += wr[c] * xr;
    }
}

/// W += u v^T
inline void outer_acc(Mat& w, std::span<const double> u, std::span<const double> v) {
    assert(static_cast<int>(u.size()) == w.rows && static_cast<int>(v.size()) == w.cols);
    double* wr = w.a.data();
    for (int r = 0; r < w.rows; ++r, wr += w.cols) {
        const double ur = u[static_cast<std::size_t>(r)];
        for (int c = 0; c < w.cols; ++c) wr[c] += ur * v[static_cast<std::size_t>(c)];
    }
}

}  // namespace ridetect
