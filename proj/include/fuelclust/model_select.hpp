#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuelclust/gmm.hpp"
#include "fuelclust/samples.hpp"
#include "fuelclust/validity.hpp"

namespace fuelclust {

/// Inclusive range of cluster counts.
struct KRange {
    std::size_t first = 2;
    std::size_t last = 9;

    /// Parses "A..B" (or a single "A").
    static KRange parse(const std::string& text);
    std::string to_string() const;
    std::size_t count() const noexcept { return last >= first ? last - first + 1 : 0; }

    bool operator==(const KRange&) const = default;
};

struct ScoreRow {
    ValidityScores scores;
    std::uint64_t seed = 0;
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
    /// Every restart collapsed or the hard assignment left a cluster empty; all three scores are sentinels.
    bool failed = false;
    std::string failure;
};

struct ScoreTable {
    std::vector<ScoreRow> rows;  ///< ascending k
};

struct RankRow {
    std::size_t k = 0;
    double rank_si = 0.0;
    double rank_chi = 0.0;
    double rank_dbi = 0.0;
    double average_rank = 0.0;
};

struct RankTable {
    std::vector<RankRow> rows;  ///< same order as the score table
    std::size_t selected_k = 0;
};

/// Fits one mixture per k, assigns, and scores the hard clustering with all three indices.
ScoreTable sweep(const Samples& data, KRange range, const EmConfig& config,
                 SilhouetteMode mode = SilhouetteMode::mean_samples);

/**
 * Ranks each index over the sweep (1 = best): SI and CHI descending, DBI ascending.
 * Ties share the mean of their positions; sentinel entries rank after every real one.
 */
RankTable rank_scores(const ScoreTable& table);

/// k with the smallest average rank, the smaller k on ties.
std::size_t select_k(const RankTable& ranks);

/// Average ranks of per-index rank vectors already computed elsewhere.
RankTable aggregate_ranks(const std::vector<std::size_t>& ks, const std::vector<double>& si_ranks,
                          const std::vector<double>& chi_ranks, const std::vector<double>& dbi_ranks);

/// Average rank rounded to one decimal for display.
std::string display_rank(double rank);

/// Per-k scores as CSV with columns k,si,chi,dbi.
std::string scores_to_csv(const ScoreTable& table);
nlohmann::ordered_json to_json(const ScoreTable& table);

/// Rank table laid out with one column per k and rows SI, CHI, DBI, Avg.
std::string ranks_to_csv(const RankTable& ranks);
nlohmann::ordered_json to_json(const RankTable& ranks);

} // namespace fuelclust
