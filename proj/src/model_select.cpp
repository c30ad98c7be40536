#include "fuelclust/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fuelclust/error.hpp"
#include "fuelclust/format.hpp"

namespace fuelclust {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

// Ranks with average positions for ties. Entries flagged invalid rank after all valid
// ones (and tie among themselves).
std::vector<double> fractional_ranks(const std::vector<double>& values, const std::vector<bool>& invalid,
                                     bool higher_is_better) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto key_less = [&](std::size_t a, std::size_t b) {
        if (invalid[a] != invalid[b]) {
            return !invalid[a];
        }
        if (invalid[a]) {
            return false;
        }
        return higher_is_better ? values[a] > values[b] : values[a] < values[b];
    };
    std::stable_sort(order.begin(), order.end(), key_less);

    std::vector<double> ranks(n);
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end = pos + 1;
        while (end < n && !key_less(order[pos], order[end]) && !key_less(order[end], order[pos])) {
            ++end;
        }
        // Positions pos+1 .. end share their mean.
        const double shared = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t i = pos; i < end; ++i) {
            ranks[order[i]] = shared;
        }
        pos = end;
    }
    return ranks;
}

std::string rank_cell(double rank) {
    return fmt::shortest(rank);
}

} // namespace

KRange KRange::parse(const std::string& text) {
    auto parse_count = [&](const std::string& part) {
        std::size_t used = 0;
        unsigned long value = 0;
        try {
            value = std::stoul(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != part.size()) {
            throw InvalidArgument("cannot parse k range '" + text + "' (expected A..B)");
        }
        return static_cast<std::size_t>(value);
    };
    KRange r;
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        r.first = r.last = parse_count(text);
    } else {
        r.first = parse_count(text.substr(0, dots));
        r.last = parse_count(text.substr(dots + 2));
    }
    if (r.last < r.first) {
        throw InvalidArgument("k range '" + text + "' is empty");
    }
    return r;
}

std::string KRange::to_string() const {
    return std::to_string(first) + ".." + std::to_string(last);
}

ScoreTable sweep(const Samples& data, KRange range, const EmConfig& config, SilhouetteMode mode) {
    if (range.first < 2 || range.last + 1 > data.size() || range.last < range.first) {
        throw InvalidArgument("k range " + range.to_string() + " must lie within [2, N - 1] with N = " +
                              std::to_string(data.size()));
    }
    ScoreTable table;
    for (std::size_t k = range.first; k <= range.last; ++k) {
        ScoreRow row;
        row.scores.k = k;
        row.seed = config.seed;
        try {
            const auto fit = fit_em(data, k, config);
            row.converged = fit.converged;
            row.iterations = fit.iterations;
            row.log_likelihood = fit.log_likelihood();
            const auto labels = assign(data, fit.model);
            const auto sizes = labels.sizes();
            if (std::find(sizes.begin(), sizes.end(), 0U) != sizes.end()) {
                row.failed = true;
                row.failure = "hard assignment left a cluster empty";
            } else {
                row.scores = score_clustering(data, labels, mode);
            }
        } catch (const FitFailure& e) {
            row.failed = true;
            row.failure = e.what();
        }
        if (row.failed) {
            row.scores.silhouette = -infinity;
            row.scores.calinski_harabasz = infinity;
            row.scores.davies_bouldin = infinity;
            row.scores.silhouette_degenerate = true;
            row.scores.calinski_harabasz_degenerate = true;
            row.scores.davies_bouldin_degenerate = true;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

RankTable rank_scores(const ScoreTable& table) {
    if (table.rows.empty()) {
        throw InvalidArgument("cannot rank an empty score table");
    }
    const std::size_t n = table.rows.size();
    std::vector<std::size_t> ks(n);
    std::vector<double> si(n), chi(n), dbi(n);
    std::vector<bool> si_bad(n), chi_bad(n), dbi_bad(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = table.rows[i].scores;
        ks[i] = s.k;
        si[i] = s.silhouette;
        chi[i] = s.calinski_harabasz;
        dbi[i] = s.davies_bouldin;
        si_bad[i] = table.rows[i].failed || s.silhouette_degenerate || std::isnan(s.silhouette);
        chi_bad[i] = table.rows[i].failed || s.calinski_harabasz_degenerate || std::isnan(s.calinski_harabasz);
        dbi_bad[i] = table.rows[i].failed || s.davies_bouldin_degenerate || std::isnan(s.davies_bouldin);
    }
    return aggregate_ranks(ks, fractional_ranks(si, si_bad, true), fractional_ranks(chi, chi_bad, true),
                           fractional_ranks(dbi, dbi_bad, false));
}

RankTable aggregate_ranks(const std::vector<std::size_t>& ks, const std::vector<double>& si_ranks,
                          const std::vector<double>& chi_ranks, const std::vector<double>& dbi_ranks) {
    const std::size_t n = ks.size();
    if (n == 0 || si_ranks.size() != n || chi_ranks.size() != n || dbi_ranks.size() != n) {
        throw InvalidArgument("rank vectors must be non-empty and of equal length");
    }
    RankTable out;
    out.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = out.rows[i];
        row.k = ks[i];
        row.rank_si = si_ranks[i];
        row.rank_chi = chi_ranks[i];
        row.rank_dbi = dbi_ranks[i];
        row.average_rank = (row.rank_si + row.rank_chi + row.rank_dbi) / 3.0;
    }
    out.selected_k = select_k(out);
    return out;
}

std::size_t select_k(const RankTable& ranks) {
    if (ranks.rows.empty()) {
        throw InvalidArgument("cannot select k from an empty rank table");
    }
    // Compare the rank sums exactly: averages of half-integers are not exact in binary.
    const RankRow* best = nullptr;
    for (const auto& row : ranks.rows) {
        const double sum = row.rank_si + row.rank_chi + row.rank_dbi;
        if (best == nullptr) {
            best = &row;
            continue;
        }
        const double best_sum = best->rank_si + best->rank_chi + best->rank_dbi;
        if (sum < best_sum || (sum == best_sum && row.k < best->k)) {
            best = &row;
        }
    }
    return best->k;
}

std::string display_rank(double rank) {
    return fmt::fixed(rank, 1);
}

std::string scores_to_csv(const ScoreTable& table) {
    std::string out = "k,si,chi,dbi\n";
    for (const auto& row : table.rows) {
        const auto& s = row.scores;
        out += std::to_string(s.k) + "," + fmt::shortest(s.silhouette) + "," + fmt::shortest(s.calinski_harabasz) +
               "," + fmt::shortest(s.davies_bouldin) + "\n";
    }
    return out;
}

nlohmann::ordered_json to_json(const ScoreTable& table) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        auto j = to_json(row.scores);
        j["seed"] = row.seed;
        j["converged"] = row.converged;
        j["iterations"] = row.iterations;
        if (row.failed) {
            j["log_likelihood"] = nullptr;
        } else {
            j["log_likelihood"] = row.log_likelihood;
        }
        j["failed"] = row.failed;
        if (row.failed) {
            j["failure"] = row.failure;
        }
        rows.push_back(std::move(j));
    }
    return rows;
}

std::string ranks_to_csv(const RankTable& ranks) {
    std::string header = "No. Clusters";
    std::string si = "SI";
    std::string chi = "CHI";
    std::string dbi = "DBI";
    std::string avg = "Avg.";
    for (const auto& row : ranks.rows) {
        header += "," + std::to_string(row.k);
        si += "," + rank_cell(row.rank_si);
        chi += "," + rank_cell(row.rank_chi);
        dbi += "," + rank_cell(row.rank_dbi);
        avg += "," + display_rank(row.average_rank);
    }
    return header + "\n" + si + "\n" + chi + "\n" + dbi + "\n" + avg + "\n";
}

nlohmann::ordered_json to_json(const RankTable& ranks) {
    nlohmann::ordered_json j;
    j["selected_k"] = ranks.selected_k;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : ranks.rows) {
        nlohmann::ordered_json r;
        r["k"] = row.k;
        r["rank_si"] = row.rank_si;
        r["rank_chi"] = row.rank_chi;
        r["rank_dbi"] = row.rank_dbi;
        r["average_rank"] = row.average_rank;
        r["average_rank_display"] = display_rank(row.average_rank);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

} // namespace fuelclust
