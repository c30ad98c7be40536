#include "fuelclust/refine.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "fuelclust/error.hpp"

namespace fuelclust {

namespace {

struct Run {
    std::size_t label = 0;
    std::size_t begin = 0;  // positions in sorted order
    std::size_t end = 0;
};

std::vector<std::size_t> value_order(const Samples& data) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = data.scalar(a);
        const double vb = data.scalar(b);
        return va < vb || (va == vb && a < b);
    });
    return order;
}

std::vector<Run> label_runs(const std::vector<std::size_t>& order, const Assignment& assignment) {
    std::vector<Run> runs;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const auto label = assignment.labels[order[pos]];
        if (runs.empty() || runs.back().label != label) {
            runs.push_back({label, pos, pos + 1});
        } else {
            runs.back().end = pos + 1;
        }
    }
    return runs;
}

} // namespace

std::vector<SplitCandidate> detect_split_candidates(const Samples& data, const Assignment& assignment,
                                                    std::size_t min_run_size) {
    if (data.dim() != 1) {
        throw InvalidArgument("split detection is defined for one-dimensional samples only");
    }
    if (assignment.size() != data.size()) {
        throw InvalidArgument("assignment does not match the number of samples");
    }
    assignment.check();
    min_run_size = std::max<std::size_t>(min_run_size, 1);

    const auto order = value_order(data);
    const auto runs = label_runs(order, assignment);

    std::vector<std::vector<std::size_t>> runs_of(assignment.k);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        runs_of[runs[r].label].push_back(r);
    }

    std::vector<SplitCandidate> out;
    for (std::size_t cluster = 0; cluster < assignment.k; ++cluster) {
        const auto& own = runs_of[cluster];
        std::vector<std::size_t> major;
        for (auto r : own) {
            if (runs[r].end - runs[r].begin >= min_run_size) {
                major.push_back(r);
            }
        }
        if (major.size() < 2) {
            continue;
        }

        SplitCandidate cand;
        cand.cluster_id = cluster;
        cand.segments.resize(major.size());
        std::size_t seg = 0;
        for (auto r : own) {
            while (seg + 1 < major.size() && r >= major[seg + 1]) {
                ++seg;
            }
            for (std::size_t pos = runs[r].begin; pos < runs[r].end; ++pos) {
                cand.segments[seg].push_back(order[pos]);
            }
        }
        std::set<std::size_t> gaps;
        for (std::size_t r = major.front() + 1; r < major.back(); ++r) {
            if (runs[r].label != cluster) {
                gaps.insert(runs[r].label);
            }
        }
        cand.gap_clusters.assign(gaps.begin(), gaps.end());
        out.push_back(std::move(cand));
    }
    return out;
}

Assignment split_cluster(const Samples& data, const Assignment& assignment, const SplitCandidate& candidate) {
    if (assignment.size() != data.size()) {
        throw InvalidArgument("assignment does not match the number of samples");
    }
    if (candidate.segments.size() < 2) {
        throw InvalidArgument("a split candidate needs at least two segments");
    }
    if (candidate.cluster_id >= assignment.k) {
        throw StaleCandidate("candidate cluster id is not part of the assignment");
    }
    std::size_t members = 0;
    for (const auto& segment : candidate.segments) {
        for (auto n : segment) {
            if (n >= assignment.size() || assignment.labels[n] != candidate.cluster_id) {
                throw StaleCandidate("candidate member no longer belongs to cluster " +
                                     std::to_string(candidate.cluster_id));
            }
        }
        members += segment.size();
    }
    if (members != assignment.sizes()[candidate.cluster_id]) {
        throw StaleCandidate("cluster " + std::to_string(candidate.cluster_id) +
                             " gained members since the candidate was detected");
    }

    Assignment out = assignment;
    for (std::size_t s = 1; s < candidate.segments.size(); ++s) {
        const std::size_t id = out.k++;
        for (auto n : candidate.segments[s]) {
            out.labels[n] = id;
        }
    }
    return out;
}

RefineResult refine_until_stable(const Samples& data, const Assignment& assignment, std::size_t max_rounds,
                                 std::size_t min_run_size) {
    RefineResult result;
    result.assignment = assignment;
    for (std::size_t round = 1; round <= max_rounds; ++round) {
        const auto candidates = detect_split_candidates(data, result.assignment, min_run_size);
        if (candidates.empty()) {
            result.stable = true;
            return result;
        }
        SplitRound log;
        log.round = round;
        for (const auto& cand : candidates) {
            const std::size_t next_id = result.assignment.k;
            result.assignment = split_cluster(data, result.assignment, cand);

            SplitRecord record;
            record.cluster_id = cand.cluster_id;
            record.gap_clusters = cand.gap_clusters;
            for (std::size_t s = 0; s < cand.segments.size(); ++s) {
                SegmentRecord seg;
                seg.id = s == 0 ? cand.cluster_id : next_id + s - 1;
                seg.count = cand.segments[s].size();
                seg.min = data.scalar(cand.segments[s].front());
                seg.max = seg.min;
                for (auto n : cand.segments[s]) {
                    seg.min = std::min(seg.min, data.scalar(n));
                    seg.max = std::max(seg.max, data.scalar(n));
                }
                record.segments.push_back(seg);
            }
            log.splits.push_back(std::move(record));
        }
        result.rounds.push_back(std::move(log));
    }
    result.stable = detect_split_candidates(data, result.assignment, min_run_size).empty();
    return result;
}

nlohmann::ordered_json to_json(const std::vector<SplitRound>& log) {
    nlohmann::ordered_json j;
    auto rounds = nlohmann::ordered_json::array();
    for (const auto& round : log) {
        nlohmann::ordered_json r;
        r["round"] = round.round;
        auto splits = nlohmann::ordered_json::array();
        for (const auto& split : round.splits) {
            nlohmann::ordered_json s;
            s["cluster_id"] = split.cluster_id;
            s["gap_clusters"] = split.gap_clusters;
            auto segs = nlohmann::ordered_json::array();
            for (const auto& seg : split.segments) {
                nlohmann::ordered_json g;
                g["id"] = seg.id;
                g["count"] = seg.count;
                g["min"] = seg.min;
                g["max"] = seg.max;
                segs.push_back(std::move(g));
            }
            s["segments"] = std::move(segs);
            splits.push_back(std::move(s));
        }
        r["splits"] = std::move(splits);
        rounds.push_back(std::move(r));
    }
    j["rounds"] = std::move(rounds);
    return j;
}

} // namespace fuelclust
