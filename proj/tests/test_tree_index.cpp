#include <doctest.h>

#include <set>
#include <vector>

#include "bmc/rng.hpp"
#include "bmc/tree_index.hpp"

using namespace bmc;

TEST_CASE("generation_size matches repeated doubling") {
    CHECK(generation_size(0) == 1);
    CHECK(generation_size(5) == 32);
    std::uint64_t doubled = 1;
    for (int n = 1; n <= 20; ++n) doubled *= 2;
    CHECK(generation_size(20) == doubled);
    CHECK(generation_size(20) == 1048576);
    CHECK(generation_size(63) == std::uint64_t{1} << 63);
    CHECK_THROWS_AS(generation_size(64), std::overflow_error);
    CHECK_THROWS_AS(generation_size(-1), std::invalid_argument);
}

TEST_CASE("tree_size matches the sum of generation sizes") {
    CHECK(tree_size(0) == 1);
    CHECK(tree_size(5) == 63);
    std::uint64_t total = 0;
    for (int k = 0; k <= 10; ++k) total += generation_size(k);
    CHECK(tree_size(10) == total);
    CHECK(tree_size(10) == 2047);
    CHECK(tree_size(63) == std::numeric_limits<std::uint64_t>::max());
    CHECK_THROWS_AS(tree_size(64), std::overflow_error);
}

TEST_CASE("generation bounds and parent arithmetic") {
    for (int n = 1; n <= 12; ++n) {
        auto [first, last] = generation_range(n);
        CHECK(first == generation_size(n));
        CHECK(last - first == generation_size(n));
        for (NodeId u = first; u < last; ++u) {
            CHECK(generation_of(u) == n);
            CHECK(generation_of(parent(u)) == n - 1);
        }
    }
    CHECK(generation_of(1) == 0);
    CHECK(parent(child0(41)) == 41);
    CHECK(parent(child1(41)) == 41);
}

TEST_CASE("iterating children enumerates each generation exactly") {
    std::vector<NodeId> frontier{kRoot};
    for (int n = 1; n <= 8; ++n) {
        std::vector<NodeId> next;
        for (NodeId u : frontier) {
            next.push_back(child0(u));
            next.push_back(child1(u));
        }
        frontier = next;
        std::set<NodeId> unique(frontier.begin(), frontier.end());
        CHECK(unique.size() == generation_size(n));
        for (NodeId u : unique) CHECK(generation_of(u) == n);
    }
}

namespace {

// Independent oracle: intersect full ancestor sets, take the deepest.
NodeId mrca_by_ancestor_sets(NodeId i, NodeId j) {
    std::set<NodeId> anc;
    for (NodeId u = i;; u /= 2) {
        anc.insert(u);
        if (u == 1) break;
    }
    NodeId best = 1;
    for (NodeId u = j;; u /= 2) {
        if (anc.count(u)) {
            best = u;
            break;
        }
        if (u == 1) break;
    }
    return best;
}

}  // namespace

TEST_CASE("mrca examples and oracle agreement") {
    CHECK(mrca(1, 7) == 1);
    CHECK(mrca(4, 5) == 2);
    CHECK(mrca(12, 13) == 6);
    CHECK(mrca_by_ancestor_sets(12, 13) == 6);

    CounterRng rng(2024, 0);
    for (int trial = 0; trial < 500; ++trial) {
        NodeId i = 1 + rng.next_u64() % tree_size(12);
        NodeId j = 1 + rng.next_u64() % tree_size(12);
        NodeId m = mrca(i, j);
        CHECK(m == mrca_by_ancestor_sets(i, j));
        CHECK(m == mrca(j, i));
        CHECK(mrca(i, i) == i);
        CHECK(is_ancestor(m, i));
        CHECK(is_ancestor(m, j));
    }
}
