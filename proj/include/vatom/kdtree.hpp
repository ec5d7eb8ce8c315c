#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace vatom {

/// Static k-d tree over rows of a row-major point array, Euclidean metric.
/// Points are referred to by their row index.
class KdTree {
public:
    KdTree(const double* points, std::size_t rows, std::size_t dim, std::vector<std::size_t> ids);

    struct Hit {
        std::size_t id = 0;
        double dist2 = std::numeric_limits<double>::infinity();
        bool found() const noexcept { return dist2 < std::numeric_limits<double>::infinity(); }
    };

    /// Nearest stored point to `query` for which accept(id) holds.
    Hit nearest(const double* query, const std::function<bool(std::size_t)>& accept) const;

    std::size_t dim() const noexcept { return dim_; }

private:
    struct Node {
        std::size_t begin = 0;
        std::size_t end = 0;
        std::size_t axis = 0;
        double split = 0.0;
        int left = -1;
        int right = -1;
    };

    int build(std::size_t begin, std::size_t end, int depth);
    void search(int node, const double* query, const std::function<bool(std::size_t)>& accept, Hit& best) const;
    const double* row(std::size_t id) const noexcept { return points_ + id * dim_; }

    static constexpr std::size_t leaf_size = 16;

    const double* points_;
    std::size_t dim_;
    std::vector<std::size_t> ids_;
    std::vector<Node> nodes_;
};

}  // namespace vatom
