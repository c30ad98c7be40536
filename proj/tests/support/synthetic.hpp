#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fuelclust/format.hpp"
#include "fuelclust/ingest.hpp"
#include "fuelclust/samples.hpp"

namespace testsupport {

/// Portable generator: only mt19937_64 output is used, no std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

    std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    double normal(double mean, double sd) { return mean + sd * normal(); }

    double truncated_normal(double mean, double sd, double lo, double hi) {
        for (;;) {
            const double x = normal(mean, sd);
            if (x >= lo && x <= hi) {
                return x;
            }
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

struct Group {
    std::size_t count;
    double mean;
    double sd;
    double lo;
    double hi;
};

/// The four consumption groups of the reference fleet, lowest consumption first.
inline std::vector<Group> reference_groups() {
    return {
        {11, 21.73, 6.55, 4.84, 26.35},
        {2857, 46.03, 5.02, 29.16, 56.02},
        {908, 63.94, 5.61, 56.04, 77.01},
        {230, 95.05, 14.79, 77.44, 161.94},
    };
}

struct Fleet {
    fuelclust::TripTable table;
    std::vector<std::size_t> truth;  ///< generating group per record
};

/// Trips drawn from truncated normals per group, shuffled, with random drivers and routes.
inline Fleet make_fleet(const std::vector<Group>& groups, std::uint64_t seed, std::size_t drivers = 50,
                        std::size_t routes = 20) {
    Rng rng(seed);
    std::vector<std::pair<double, std::size_t>> draws;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t i = 0; i < groups[g].count; ++i) {
            draws.emplace_back(rng.truncated_normal(groups[g].mean, groups[g].sd, groups[g].lo, groups[g].hi), g);
        }
    }
    rng.shuffle(draws);
    Fleet fleet;
    for (std::size_t n = 0; n < draws.size(); ++n) {
        fleet.table.records.push_back({"T" + std::to_string(n + 1), "D" + std::to_string(rng.index(drivers) + 1),
                                       "R" + std::to_string(rng.index(routes) + 1), draws[n].first});
        fleet.truth.push_back(draws[n].second);
    }
    return fleet;
}

inline Fleet reference_fleet(std::uint64_t seed = 7) { return make_fleet(reference_groups(), seed); }

/// Well separated 1-D blobs: centers 20 sigma apart.
inline Fleet separated_blobs(std::size_t blobs, std::size_t per_blob, std::uint64_t seed) {
    std::vector<Group> groups;
    for (std::size_t b = 0; b < blobs; ++b) {
        const double mean = 30.0 + 20.0 * static_cast<double>(b);
        groups.push_back({per_blob, mean, 1.0, mean - 4.0, mean + 4.0});
    }
    return make_fleet(groups, seed, 10, 5);
}

/**
 * Drivers with a known cluster mix. The first `dominant` drivers put 19 of 20 trips in
 * one cluster; the rest spread 8/6/4/2 over four clusters.
 */
struct DriverFleet {
    fuelclust::TripTable table;
    fuelclust::Assignment assignment;
    std::vector<std::string> dominant_ids;
};

inline DriverFleet driver_fleet(std::size_t drivers, std::size_t dominant, std::uint64_t seed) {
    Rng rng(seed);
    DriverFleet f;
    f.assignment.k = 4;
    std::size_t trip = 0;
    std::vector<std::size_t> order(drivers);
    for (std::size_t i = 0; i < drivers; ++i) {
        order[i] = i;
    }
    rng.shuffle(order);
    for (std::size_t slot = 0; slot < drivers; ++slot) {
        const std::size_t d = order[slot];
        const std::string id = "D" + std::to_string(d + 1);
        std::vector<std::size_t> clusters;
        if (slot < dominant) {
            f.dominant_ids.push_back(id);
            const std::size_t main = rng.index(4);
            clusters.assign(19, main);
            clusters.push_back((main + 1 + rng.index(3)) % 4);
        } else {
            const std::size_t shift = rng.index(4);
            const std::size_t counts[4] = {8, 6, 4, 2};
            for (std::size_t c = 0; c < 4; ++c) {
                clusters.insert(clusters.end(), counts[c], (c + shift) % 4);
            }
        }
        for (auto c : clusters) {
            ++trip;
            f.table.records.push_back({"T" + std::to_string(trip), id, "R" + std::to_string(rng.index(5) + 1),
                                       20.0 + 20.0 * static_cast<double>(c) + rng.uniform()});
            f.assignment.labels.push_back(c);
        }
    }
    return f;
}

inline void write_trips(const fuelclust::TripTable& table, const std::filesystem::path& path) {
    fuelclust::fmt::write_file(path, fuelclust::trips_to_csv(table));
}

/// Random clustering instance with every cluster non-empty.
struct Instance {
    fuelclust::Samples data;
    fuelclust::Assignment assignment;
};

inline Instance random_instance(Rng& rng, std::size_t max_n = 200) {
    const std::size_t k = rng.between(2, 5);
    const std::size_t d = rng.between(1, 2);
    const std::size_t n = rng.between(k + 1, max_n);
    const bool coarse = rng.uniform() < 0.3;  // integer grid produces ties and duplicates
    std::vector<double> centers(k * d);
    for (auto& c : centers) {
        c = rng.uniform(-10.0, 10.0);
    }
    std::vector<double> values(n * d);
    fuelclust::Assignment a;
    a.k = k;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t label = i < k ? i : rng.index(k);
        a.labels.push_back(label);
        for (std::size_t j = 0; j < d; ++j) {
            double v = rng.normal(centers[label * d + j], rng.uniform(0.2, 3.0));
            values[i * d + j] = coarse ? std::round(v) : v;
        }
    }
    return {fuelclust::Samples(n, d, std::move(values)), std::move(a)};
}

} // namespace testsupport
