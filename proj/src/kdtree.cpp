#include "vatom/kdtree.hpp"

#include "vatom/errors.hpp"

#include <algorithm>

namespace vatom {

KdTree::KdTree(const double* points, std::size_t rows, std::size_t dim, std::vector<std::size_t> ids)
    : points_(points), dim_(dim), ids_(std::move(ids)) {
    if (dim_ == 0) throw InvalidInput("k-d tree needs dimension >= 1");
    for (std::size_t id : ids_) {
        if (id >= rows) throw InvalidInput("k-d tree id out of range");
    }
    if (!ids_.empty()) build(0, ids_.size(), 0);
}

int KdTree::build(std::size_t begin, std::size_t end, int depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{begin, end, 0, 0.0, -1, -1});
    if (end - begin <= leaf_size) return index;

    // Split on the widest axis at the median.
    std::size_t axis = static_cast<std::size_t>(depth) % dim_;
    double widest = -1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        double lo = row(ids_[begin])[a];
        double hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const double v = row(ids_[i])[a];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = a;
        }
    }
    if (widest <= 0.0) return index;

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(ids_.begin() + static_cast<std::ptrdiff_t>(begin), ids_.begin() + static_cast<std::ptrdiff_t>(mid),
                     ids_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                         const double va = row(a)[axis];
                         const double vb = row(b)[axis];
                         return va < vb || (va == vb && a < b);
                     });
    nodes_[static_cast<std::size_t>(index)].axis = axis;
    nodes_[static_cast<std::size_t>(index)].split = row(ids_[mid])[axis];
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
}

KdTree::Hit KdTree::nearest(const double* query, const std::function<bool(std::size_t)>& accept) const {
    Hit best;
    if (!nodes_.empty()) search(0, query, accept, best);
    return best;
}

void KdTree::search(int node_index, const double* query, const std::function<bool(std::size_t)>& accept,
                    Hit& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_index)];
    if (node.left < 0) {
        for (std::size_t i = node.begin; i < node.end; ++i) {
            const std::size_t id = ids_[i];
            const double* p = row(id);
            double d2 = 0.0;
            for (std::size_t a = 0; a < dim_ && d2 < best.dist2; ++a) {
                const double diff = p[a] - query[a];
                d2 += diff * diff;
            }
            // Ties go to the lower id so results do not depend on tree layout.
            if ((d2 < best.dist2 || (d2 == best.dist2 && id < best.id)) && accept(id)) {
                best.dist2 = d2;
                best.id = id;
            }
        }
        return;
    }
    const double delta = query[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, query, accept, best);
    if (delta * delta <= best.dist2) search(far, query, accept, best);
}

}  // namespace vatom
