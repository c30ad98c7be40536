#include <gtest/gtest.h>

#include <cmath>

#include "fuelclust/error.hpp"
#include "fuelclust/model_select.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace fuelclust;

namespace {

ScoreRow row(std::size_t k, double si, double chi, double dbi) {
    ScoreRow r;
    r.scores.k = k;
    r.scores.silhouette = si;
    r.scores.calinski_harabasz = chi;
    r.scores.davies_bouldin = dbi;
    return r;
}

ScoreTable random_table(testsupport::Rng& rng, std::size_t n) {
    ScoreTable t;
    for (std::size_t i = 0; i < n; ++i) {
        t.rows.push_back(row(i + 2, rng.uniform(-1, 1), rng.uniform(0, 1000), rng.uniform(0, 3)));
    }
    return t;
}

} // namespace

TEST(KRange, Parse) {
    EXPECT_EQ(KRange::parse("2..9"), (KRange{2, 9}));
    EXPECT_EQ(KRange::parse("4"), (KRange{4, 4}));
    EXPECT_EQ(KRange::parse("2..9").count(), 8U);
    EXPECT_THROW(KRange::parse("9..2"), InvalidArgument);
    EXPECT_THROW(KRange::parse("a..b"), InvalidArgument);
}

TEST(RankScores, OrderAndDirection) {
    ScoreTable t{{row(2, 0.9, 10, 0.5), row(3, 0.5, 20, 0.2)}};
    const auto r = rank_scores(t);
    EXPECT_DOUBLE_EQ(r.rows[0].rank_si, 1.0);
    EXPECT_DOUBLE_EQ(r.rows[1].rank_si, 2.0);
    EXPECT_DOUBLE_EQ(r.rows[0].rank_chi, 2.0);
    EXPECT_DOUBLE_EQ(r.rows[1].rank_dbi, 1.0);
}

TEST(RankScores, TiesShareAveragePosition) {
    ScoreTable t{{row(2, 0.9, 50, 0.5), row(3, 0.5, 50, 0.2)}};
    const auto r = rank_scores(t);
    EXPECT_DOUBLE_EQ(r.rows[0].rank_chi, 1.5);
    EXPECT_DOUBLE_EQ(r.rows[1].rank_chi, 1.5);
}

TEST(RankScores, FailedRowsRankLast) {
    ScoreTable t{{row(2, 0.1, 1, 3), row(3, 0.0, 0, 0), row(4, 0.2, 2, 2)}};
    t.rows[1].failed = true;
    t.rows[1].scores.silhouette_degenerate = t.rows[1].scores.calinski_harabasz_degenerate =
        t.rows[1].scores.davies_bouldin_degenerate = true;
    const auto r = rank_scores(t);
    EXPECT_DOUBLE_EQ(r.rows[1].rank_si, 3.0);
    EXPECT_DOUBLE_EQ(r.rows[1].rank_chi, 3.0);
    EXPECT_DOUBLE_EQ(r.rows[1].rank_dbi, 3.0);
    EXPECT_EQ(r.selected_k, 4U);
}

TEST(RankScores, DegenerateDbiRanksLast) {
    ScoreTable t{{row(2, 0.1, 1, 3), row(3, 0.2, 2, std::numeric_limits<double>::infinity())}};
    t.rows[1].scores.davies_bouldin_degenerate = true;
    EXPECT_DOUBLE_EQ(rank_scores(t).rows[1].rank_dbi, 2.0);
}

TEST(RankScores, ReferenceTableAverages) {
    const std::vector<std::size_t> ks{2, 3, 4, 5, 6, 7, 8, 9};
    const auto r = aggregate_ranks(ks, {1, 2, 7, 5, 8, 3, 4, 6}, {2, 1, 3, 4, 6, 5, 8, 7}, {2, 1, 4, 3, 8, 6, 5, 7});
    const std::vector<std::string> want{"1.7", "1.3", "4.7", "4.0", "7.3", "4.7", "5.7", "6.7"};
    for (std::size_t i = 0; i < ks.size(); ++i) {
        EXPECT_EQ(display_rank(r.rows[i].average_rank), want[i]) << "k=" << ks[i];
    }
    EXPECT_EQ(r.selected_k, 3U);
    EXPECT_EQ(ranks_to_csv(r),
              "No. Clusters,2,3,4,5,6,7,8,9\nSI,1,2,7,5,8,3,4,6\nCHI,2,1,3,4,6,5,8,7\nDBI,2,1,4,3,8,6,5,7\n"
              "Avg.,1.7,1.3,4.7,4.0,7.3,4.7,5.7,6.7\n");
}

TEST(RankScores, PermutationOfOneToR) {
    testsupport::Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = random_table(rng, rng.between(2, 12));
        const auto r = rank_scores(t);
        std::vector<double> si;
        for (const auto& x : r.rows) {
            si.push_back(x.rank_si);
        }
        std::sort(si.begin(), si.end());
        for (std::size_t i = 0; i < si.size(); ++i) {
            ASSERT_DOUBLE_EQ(si[i], static_cast<double>(i + 1));
        }
    }
}

TEST(RankScores, InvariantToRowOrderAndMonotoneTransforms) {
    testsupport::Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        auto t = random_table(rng, rng.between(2, 10));
        const auto base = rank_scores(t);
        auto shuffled = t;
        rng.shuffle(shuffled.rows);
        const auto r2 = rank_scores(shuffled);
        for (const auto& x : r2.rows) {
            const auto& y = *std::find_if(base.rows.begin(), base.rows.end(), [&](const RankRow& b) { return b.k == x.k; });
            ASSERT_DOUBLE_EQ(x.average_rank, y.average_rank);
        }
        ASSERT_EQ(r2.selected_k, base.selected_k);

        auto transformed = t;
        for (auto& r : transformed.rows) {
            r.scores.silhouette = std::exp(3 * r.scores.silhouette);
            r.scores.calinski_harabasz = std::log1p(r.scores.calinski_harabasz);
            r.scores.davies_bouldin = r.scores.davies_bouldin * r.scores.davies_bouldin * r.scores.davies_bouldin;
        }
        const auto r3 = rank_scores(transformed);
        for (std::size_t i = 0; i < r3.rows.size(); ++i) {
            ASSERT_DOUBLE_EQ(r3.rows[i].average_rank, base.rows[i].average_rank);
        }
    }
}

TEST(SelectK, TieToSmallerK) {
    RankTable r;
    r.rows = {{2, 2, 2, 2, 2.0}, {3, 1, 2, 3, 2.0}, {4, 3, 3, 3, 3.0}};
    EXPECT_EQ(select_k(r), 2U);
    RankTable single;
    single.rows = {{5, 1, 1, 1, 1.0}};
    EXPECT_EQ(select_k(single), 5U);
}

TEST(Sweep, RowCountsAndRangeChecks) {
    const auto fleet = testsupport::separated_blobs(3, 40, 5);
    const auto data = Samples::from_scalars(fleet.table.efficiencies());
    EmConfig cfg;
    cfg.n_restarts = 1;
    EXPECT_EQ(sweep(data, {2, 9}, cfg).rows.size(), 8U);
    EXPECT_EQ(sweep(data, {2, 2}, cfg).rows.size(), 1U);
    EXPECT_THROW(sweep(data, {1, 3}, cfg), InvalidArgument);
    EXPECT_THROW(sweep(Samples::from_scalars({1, 2, 3}), {2, 3}, cfg), InvalidArgument);
}

TEST(Sweep, SeparatedBlobsFavourThree) {
    const auto fleet = testsupport::separated_blobs(3, 60, 12);
    const auto data = Samples::from_scalars(fleet.table.efficiencies());
    const auto table = sweep(data, {2, 6}, EmConfig{});
    const auto& best = table.rows[1];
    ASSERT_EQ(best.scores.k, 3U);
    for (const auto& r : table.rows) {
        if (r.scores.k == 3 || r.failed) {
            continue;
        }
        EXPECT_GT(best.scores.silhouette, r.scores.silhouette);
        EXPECT_GT(best.scores.calinski_harabasz, r.scores.calinski_harabasz);
        EXPECT_LT(best.scores.davies_bouldin, r.scores.davies_bouldin);
    }
    const Assignment truth{fleet.truth, 3};
    EXPECT_NEAR(best.scores.silhouette, testsupport::oracle::silhouette_mean_samples(data, truth), 1e-9);
    EXPECT_NEAR(best.scores.calinski_harabasz, testsupport::oracle::calinski_harabasz(data, truth),
                1e-9 * best.scores.calinski_harabasz);
    EXPECT_NEAR(best.scores.davies_bouldin, testsupport::oracle::davies_bouldin(data, truth), 1e-9);
    EXPECT_EQ(rank_scores(table).selected_k, 3U);
}

TEST(Output, ScoresCsvAndJson) {
    ScoreTable t{{row(2, 0.5, 10, 0.25)}};
    EXPECT_EQ(scores_to_csv(t), "k,si,chi,dbi\n2,0.5,10,0.25\n");
    const auto j = to_json(rank_scores(t));
    EXPECT_EQ(j["selected_k"], 2);
    EXPECT_EQ(j["rows"][0]["average_rank_display"], "1.0");
}
