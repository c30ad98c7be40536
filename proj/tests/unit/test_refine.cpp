#include <gtest/gtest.h>

#include <algorithm>

#include "fuelclust/error.hpp"
#include "fuelclust/refine.hpp"
#include "support/synthetic.hpp"

using namespace fuelclust;

namespace {

// Labels clusters by value band; band index per value.
Assignment by_bands(const std::vector<double>& v, const std::vector<std::pair<double, std::size_t>>& upper_bounds,
                    std::size_t k) {
    Assignment a{{}, k};
    for (double x : v) {
        for (const auto& [hi, c] : upper_bounds) {
            if (x <= hi) {
                a.labels.push_back(c);
                break;
            }
        }
    }
    return a;
}

bool contiguous(const Samples& data, const Assignment& a) {
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return data.scalar(x) < data.scalar(y); });
    std::vector<bool> closed(a.k, false);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto c = a.labels[order[i]];
        if (closed[c]) {
            return false;
        }
        if (i + 1 < order.size() && a.labels[order[i + 1]] != c) {
            closed[c] = true;
        }
    }
    return true;
}

} // namespace

TEST(DetectSplit, ContiguousClusterHasNoCandidate) {
    const auto data = Samples::from_scalars({1, 2, 3, 10, 11, 12});
    EXPECT_TRUE(detect_split_candidates(data, {{0, 0, 0, 1, 1, 1}, 2}).empty());
}

TEST(DetectSplit, TwoSeparatedBlocks) {
    const auto data = Samples::from_scalars({1, 2, 3, 90, 95, 10, 40, 80});
    const Assignment a{{0, 0, 0, 0, 0, 1, 1, 2}, 3};
    const auto c = detect_split_candidates(data, a);
    ASSERT_EQ(c.size(), 1U);
    EXPECT_EQ(c[0].cluster_id, 0U);
    ASSERT_EQ(c[0].segments.size(), 2U);
    EXPECT_EQ(c[0].segments[0], (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(c[0].segments[1], (std::vector<std::size_t>{3, 4}));
    EXPECT_EQ(c[0].gap_clusters, (std::vector<std::size_t>{1, 2}));
}

TEST(DetectSplit, SingleStrayIsIgnoredByDefault) {
    const auto data = Samples::from_scalars({1, 2, 3, 50, 10, 11});
    const Assignment a{{0, 0, 0, 0, 1, 1}, 2};
    EXPECT_TRUE(detect_split_candidates(data, a).empty());
    EXPECT_EQ(detect_split_candidates(data, a, 1).size(), 1U);
}

TEST(DetectSplit, BiasClusterOfReferenceFleet) {
    const auto fleet = testsupport::reference_fleet(9);
    const auto v = fleet.table.efficiencies();
    const auto a = by_bands(v, {{27, 0}, {56.03, 1}, {77.2, 2}, {1e9, 0}}, 3);
    const auto data = Samples::from_scalars(v);
    const auto c = detect_split_candidates(data, a);
    ASSERT_EQ(c.size(), 1U);
    EXPECT_EQ(c[0].cluster_id, 0U);
    EXPECT_EQ(c[0].segments[0].size(), 11U);
    EXPECT_EQ(c[0].segments[1].size(), 230U);

    const auto split = split_cluster(data, a, c[0]);
    EXPECT_EQ(split.k, 4U);
    for (std::size_t n = 0; n < v.size(); ++n) {
        EXPECT_EQ(split.labels[n], fleet.truth[n] == 3 ? 3U : a.labels[n]);
    }
    EXPECT_TRUE(contiguous(data, split));
}

TEST(DetectSplit, InvariantUnderSampleOrder) {
    testsupport::Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = rng.between(5, 80);
        std::vector<double> v(n);
        Assignment a{{}, 3};
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = std::round(rng.uniform(0, 30));
            a.labels.push_back(i < 3 ? i : rng.index(3));
        }
        const auto base = detect_split_candidates(Samples::from_scalars(v), a);
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) {
            perm[i] = i;
        }
        rng.shuffle(perm);
        std::vector<double> pv(n);
        Assignment pa{std::vector<std::size_t>(n), 3};
        for (std::size_t i = 0; i < n; ++i) {
            pv[i] = v[perm[i]];
            pa.labels[i] = a.labels[perm[i]];
        }
        // Ties are ordered by index, so compare only when values are distinct.
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            continue;
        }
        const auto moved = detect_split_candidates(Samples::from_scalars(pv), pa);
        ASSERT_EQ(moved.size(), base.size());
        for (std::size_t c = 0; c < base.size(); ++c) {
            ASSERT_EQ(moved[c].cluster_id, base[c].cluster_id);
            ASSERT_EQ(moved[c].segments.size(), base[c].segments.size());
            for (std::size_t s = 0; s < base[c].segments.size(); ++s) {
                std::vector<double> a1, a2;
                for (auto i : base[c].segments[s]) {
                    a1.push_back(v[i]);
                }
                for (auto i : moved[c].segments[s]) {
                    a2.push_back(pv[i]);
                }
                std::sort(a1.begin(), a1.end());
                std::sort(a2.begin(), a2.end());
                ASSERT_EQ(a1, a2);
            }
        }
    }
}

TEST(SplitCluster, RejectsBadCandidates) {
    const auto data = Samples::from_scalars({1, 2, 3, 90, 95, 10, 40});
    const Assignment a{{0, 0, 0, 0, 0, 1, 1}, 2};
    auto c = detect_split_candidates(data, a).at(0);
    SplitCandidate one{0, {c.segments[0]}, {}};
    EXPECT_THROW(split_cluster(data, a, one), InvalidArgument);
    Assignment changed = a;
    changed.labels[0] = 1;
    EXPECT_THROW(split_cluster(data, changed, c), StaleCandidate);
    const auto s = split_cluster(data, a, c);
    EXPECT_EQ(s.labels, (std::vector<std::size_t>{0, 0, 0, 2, 2, 1, 1}));
}

TEST(RefineUntilStable, NoCandidatesIsFixedPoint) {
    const auto data = Samples::from_scalars({1, 2, 3, 10, 11});
    const Assignment a{{0, 0, 0, 1, 1}, 2};
    const auto r = refine_until_stable(data, a);
    EXPECT_EQ(r.assignment.labels, a.labels);
    EXPECT_TRUE(r.rounds.empty());
    EXPECT_TRUE(r.stable);
}

TEST(RefineUntilStable, ReferenceFleetSplitsOnce) {
    const auto fleet = testsupport::reference_fleet(4);
    const auto v = fleet.table.efficiencies();
    const auto data = Samples::from_scalars(v);
    const auto r = refine_until_stable(data, by_bands(v, {{27, 0}, {56.03, 1}, {77.2, 2}, {1e9, 0}}, 3));
    EXPECT_TRUE(r.stable);
    ASSERT_EQ(r.rounds.size(), 1U);
    ASSERT_EQ(r.rounds[0].splits.size(), 1U);
    EXPECT_EQ(r.assignment.k, 4U);
    EXPECT_TRUE(detect_split_candidates(data, r.assignment).empty());
    const auto j = to_json(r.rounds);
    EXPECT_EQ(j["rounds"][0]["splits"][0]["segments"][1]["id"], 3);
}

TEST(RefineUntilStable, OneRoundSplitsAllCandidates) {
    const auto data = Samples::from_scalars({1, 2, 50, 51, 10, 11, 60, 61, 30, 31});
    const Assignment a{{0, 0, 0, 0, 1, 1, 1, 1, 2, 2}, 3};
    const auto r = refine_until_stable(data, a, 1);
    ASSERT_EQ(r.rounds.size(), 1U);
    EXPECT_EQ(r.rounds[0].splits.size(), 2U);
    EXPECT_EQ(r.assignment.k, 5U);
    EXPECT_EQ(r.assignment.labels, (std::vector<std::size_t>{0, 0, 3, 3, 1, 1, 4, 4, 2, 2}));
}

TEST(RefineUntilStable, ConservesAndLeavesContiguousRuns) {
    testsupport::Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng.between(4, 100);
        std::vector<double> v(n);
        const std::size_t k = rng.between(2, 4);
        Assignment a{{}, k};
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = rng.uniform(0, 100);
            a.labels.push_back(i < k ? i : rng.index(k));
        }
        const auto data = Samples::from_scalars(v);
        const auto r = refine_until_stable(data, a, 1000, 1);
        ASSERT_TRUE(r.stable);
        ASSERT_EQ(r.assignment.size(), n);
        ASSERT_TRUE(contiguous(data, r.assignment));
        // Every split only subdivides an existing cluster.
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (r.assignment.labels[i] == r.assignment.labels[j]) {
                    ASSERT_EQ(a.labels[i], a.labels[j]);
                }
            }
        }
    }
}

TEST(SplitCluster, LeavesOtherClustersUntouched) {
    testsupport::Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = rng.between(6, 60);
        std::vector<double> v(n);
        Assignment a{{}, 3};
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = rng.uniform(0, 10);
            a.labels.push_back(i < 3 ? i : rng.index(3));
        }
        const auto data = Samples::from_scalars(v);
        for (const auto& c : detect_split_candidates(data, a)) {
            const auto s = split_cluster(data, a, c);
            for (std::size_t i = 0; i < n; ++i) {
                if (a.labels[i] != c.cluster_id) {
                    ASSERT_EQ(s.labels[i], a.labels[i]);
                }
            }
        }
    }
}

TEST(DetectSplit, RequiresOneDimension) {
    const Samples data(2, 2, {1, 2, 3, 4});
    EXPECT_THROW(detect_split_candidates(data, {{0, 1}, 2}), InvalidArgument);
}
