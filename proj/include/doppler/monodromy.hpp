#pragma once

// Start systems for the parameter homotopy: one generic complex instance of a
// family together with all of its isolated solutions, discovered by monodromy.

#include "doppler/linalg.hpp"
#include "doppler/model.hpp"
#include "doppler/tracker.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

namespace doppler {

struct StartPack {
    Family family;
    ParamVec start_params;
    std::vector<ComplexVec> solutions;
    std::uint64_t rng_seed = 0;
    // Only one of each (r, v, f) / (r, -v, f) pair is stored.
    bool halved = false;

    [[nodiscard]] int root_count() const noexcept { return static_cast<int>(solutions.size()); }
    [[nodiscard]] DopplerSystem system() const { return DopplerSystem(family, 1.0); }
};

// Generic root counts of the four family variants.
[[nodiscard]] int expected_root_count(const Family& family);

struct SeedPair {
    ParamVec params;
    ComplexVec solution;
};

// Draws random complex unknowns and receivers (zero receiver velocities for
// stationary families), then solves each equation for its measured frequency,
// a quadratic in f_i, taking one of its two roots at random.
[[nodiscard]] SeedPair seed_instance(const Family& family, std::mt19937_64& rng);

// Random complex parameter vector respecting the family's structural zeros.
[[nodiscard]] ParamVec random_parameters(const Family& family, std::mt19937_64& rng);

struct MonodromyConfig {
    int stabilization_rounds = 5;
    // NoProgress is raised after this many consecutive loops without growth
    // while the count is still below the expected one.
    int no_progress_loops = 20;
    int max_loops = 400;
    double dedup_tol = 1e-6;
    double residual_tol = 1e-9;
    // Overrides expected_root_count(); set enforce_expected=false for open-ended runs.
    std::optional<int> expected_count;
    bool enforce_expected = true;
};

struct MonodromyStats {
    int loops = 0;
    long paths_tracked = 0;
    long singular_endpoints = 0;
    long failed_paths = 0;
    std::vector<int> count_history;
};

// Runs triangle loops base -> p1 -> p2 -> base, each edge with a fresh gamma,
// until the solution count is unchanged for stabilization_rounds loops and
// reaches the expected count (when one applies).
[[nodiscard]] StartPack populate(const Family& family, const SeedPair& seed,
                                 const TrackerConfig& tracker, std::mt19937_64& rng,
                                 const MonodromyConfig& cfg = {},
                                 MonodromyStats* stats = nullptr);

// Keeps one representative of each velocity-negation pair. Throws NotSymmetric
// for non-stationary packs or when some mate is missing.
[[nodiscard]] StartPack halve_by_symmetry(const StartPack& pack, double tol = 1e-6);

// (r, v, f) -> (r, -v, f)
[[nodiscard]] ComplexVec velocity_mate(const ComplexVec& x);

// Index of a solution within tol (max-norm, relative to max(1, |x|_inf)), or -1.
[[nodiscard]] int find_solution(const std::vector<ComplexVec>& set, const ComplexVec& x,
                                double tol);

// Versioned, checksummed text format. Throws IoError, CorruptPack, and
// FamilyMismatch (when expected is given and differs).
void save_pack(const StartPack& pack, const std::filesystem::path& path);
[[nodiscard]] StartPack load_pack(const std::filesystem::path& path,
                                  std::optional<Family> expected = std::nullopt);

} // namespace doppler
