#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuelclust/samples.hpp"

namespace fuelclust {

/// A cluster whose members fall into several separated blocks of the value-sorted data.
struct SplitCandidate {
    std::size_t cluster_id = 0;
    /// Member indices per segment, lowest-valued segment first. Runs shorter than the
    /// minimum run size are folded into the preceding segment (the first one if none precedes).
    std::vector<std::vector<std::size_t>> segments;
    /// Other clusters with members lying between the segments, ascending.
    std::vector<std::size_t> gap_clusters;
};

/// Finds every cluster with at least two runs of >= min_run_size members in value-sorted
/// order (ties ordered by sample index). Requires one-dimensional samples.
std::vector<SplitCandidate> detect_split_candidates(const Samples& data, const Assignment& assignment,
                                                    std::size_t min_run_size = 2);

/// Gives every segment after the first a fresh id appended after the existing ones.
/// Throws StaleCandidate when the candidate's members no longer equal the cluster.
Assignment split_cluster(const Samples& data, const Assignment& assignment, const SplitCandidate& candidate);

struct SegmentRecord {
    std::size_t id = 0;
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
};

struct SplitRecord {
    std::size_t cluster_id = 0;
    std::vector<std::size_t> gap_clusters;
    std::vector<SegmentRecord> segments;
};

struct SplitRound {
    std::size_t round = 0;
    std::vector<SplitRecord> splits;
};

struct RefineResult {
    Assignment assignment;
    std::vector<SplitRound> rounds;  ///< only rounds that split something
    bool stable = false;             ///< no candidates remain
};

/// Detect-and-split until no candidate is left or max_rounds rounds have run. Each round
/// splits every candidate found at its start, in ascending cluster id.
RefineResult refine_until_stable(const Samples& data, const Assignment& assignment, std::size_t max_rounds = 3,
                                 std::size_t min_run_size = 2);

nlohmann::ordered_json to_json(const std::vector<SplitRound>& log);

} // namespace fuelclust
