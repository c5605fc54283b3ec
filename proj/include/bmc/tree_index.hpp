#ifndef BMC_TREE_INDEX_HPP
#define BMC_TREE_INDEX_HPP

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

namespace bmc {

/// Heap index of a node in the regular binary tree: root = 1, children of u
/// are 2u and 2u+1.  The word notation i in {0,1}^k maps to the heap index
/// whose binary expansion below the leading 1 is i.
using NodeId = std::uint64_t;

inline constexpr NodeId kRoot = 1;

/// Deepest generation for which the subtree node count still fits an
/// unsigned 64-bit value (tree_size(63) = 2^64 - 1 exactly).
inline constexpr int kMaxDepth = 63;

namespace detail {
inline void check_depth(int n) {
    if (n < 0) throw std::invalid_argument("tree depth must be nonnegative");
    if (n > kMaxDepth)
        throw std::overflow_error("tree depth exceeds 64-bit node capacity");
}
}  // namespace detail

/// Number of nodes in generation n, i.e. 2^n.
inline std::uint64_t generation_size(int n) {
    detail::check_depth(n);
    return std::uint64_t{1} << n;
}

/// Number of nodes in the subtree of depth n, i.e. 2^(n+1) - 1.
inline std::uint64_t tree_size(int n) {
    detail::check_depth(n);
    if (n == kMaxDepth) return std::numeric_limits<std::uint64_t>::max();
    return (std::uint64_t{1} << (n + 1)) - 1;
}

/// Generation (depth) of a node: floor(log2 u).
inline int generation_of(NodeId u) {
    if (u == 0) throw std::invalid_argument("node ids start at 1");
    return std::bit_width(u) - 1;
}

inline NodeId parent(NodeId u) {
    if (u <= kRoot) throw std::invalid_argument("the root has no parent");
    return u >> 1;
}

inline NodeId child0(NodeId u) {
    if (u == 0 || u > (std::numeric_limits<NodeId>::max() >> 1))
        throw std::overflow_error("child index exceeds 64-bit node capacity");
    return u << 1;
}

inline NodeId child1(NodeId u) { return child0(u) | 1; }

/// Half-open index range [first, last) of generation n.
inline std::pair<NodeId, NodeId> generation_range(int n) {
    detail::check_depth(n);
    if (n == kMaxDepth)
        return {std::uint64_t{1} << n, std::numeric_limits<NodeId>::max()};
    return {std::uint64_t{1} << n, std::uint64_t{1} << (n + 1)};
}

/// True when a is an ancestor of u (every node is its own ancestor).
inline bool is_ancestor(NodeId a, NodeId u) {
    if (a == 0 || u == 0) throw std::invalid_argument("node ids start at 1");
    int da = generation_of(a), du = generation_of(u);
    if (da > du) return false;
    return (u >> (du - da)) == a;
}

/// Most recent common ancestor: repeated halving of the deeper index.
inline NodeId mrca(NodeId i, NodeId j) {
    if (i == 0 || j == 0) throw std::invalid_argument("node ids start at 1");
    while (std::bit_width(i) > std::bit_width(j)) i >>= 1;
    while (std::bit_width(j) > std::bit_width(i)) j >>= 1;
    while (i != j) {
        i >>= 1;
        j >>= 1;
    }
    return i;
}

}  // namespace bmc

#endif  // BMC_TREE_INDEX_HPP
