#pragma once

#include <Eigen/Core>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "ganbench/errors.hpp"

namespace ganbench {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense n-d array (row-major) with a dynamic shape. Batches are the leading
// dimension: {N, F} for flat data, {N, C, H, W} for feature maps.
struct Tensor {
    std::vector<int> shape;
    Eigen::ArrayXd data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data = Eigen::ArrayXd::Zero(count(shape));
    }

    static long count(const std::vector<int>& s) {
        long n = 1;
        for (int d : s) n *= d;
        return n;
    }

    long size() const { return data.size(); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    int rank() const { return static_cast<int>(shape.size()); }

    double& operator[](long i) { return data[i]; }
    double operator[](long i) const { return data[i]; }

    Tensor reshaped(std::vector<int> s) const {
        if (count(s) != size()) throw ShapeMismatch("reshape: element count mismatch");
        Tensor t;
        t.shape = std::move(s);
        t.data = data;
        return t;
    }

    // View the flattened tensor as a rows x cols row-major matrix.
    Eigen::Map<const MatrixRM> as_matrix(long rows, long cols) const {
        if (rows * cols != size()) throw ShapeMismatch("as_matrix: element count mismatch");
        return {data.data(), rows, cols};
    }
    Eigen::Map<MatrixRM> as_matrix(long rows, long cols) {
        if (rows * cols != size()) throw ShapeMismatch("as_matrix: element count mismatch");
        return {data.data(), rows, cols};
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

}  // namespace ganbench
