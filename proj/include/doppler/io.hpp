#pragma once

// Text file formats. Every file starts with a "DOPPLER-<KIND> <version>" line
// followed by "units SI"; doubles are written with 17 significant digits so
// that parse(serialize(x)) == x. Parsers throw Error(ParseError) with the
// line number; the file variants also name the path.

#include "doppler/montecarlo.hpp"
#include "doppler/scenario.hpp"
#include "doppler/solve.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace doppler::io {

struct ScenarioFile {
    Scenario scenario;
    std::optional<NoiseConfig> noise; // default noise model for the scenario

    friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

struct Solution {
    std::string scenario;
    std::string family;
    double c = 0.0;
    SolveStats stats;
    OffsetFrame frame;
    std::vector<Candidate> candidates;
    // Per candidate: one row per equation receiver, then the extra receiver.
    std::vector<std::vector<ResidualRow>> residuals;
    bool has_extra = false;

    friend bool operator==(const Solution&, const Solution&) = default;
};

[[nodiscard]] Solution make_solution(const Measurements& m, const SolveResult& result);

[[nodiscard]] std::string serialize(const ScenarioFile& s);
[[nodiscard]] std::string serialize(const Measurements& m);
[[nodiscard]] std::string serialize(const Solution& s);
[[nodiscard]] std::string serialize(const MonteCarloReport& r);

[[nodiscard]] ScenarioFile parse_scenario(const std::string& text);
[[nodiscard]] Measurements parse_measurements(const std::string& text);
[[nodiscard]] Solution parse_solution(const std::string& text);
[[nodiscard]] MonteCarloReport parse_report(const std::string& text);

// Plot-ready long format: "quantity,trial,error" with signed errors.
[[nodiscard]] std::string report_long_csv(const MonteCarloReport& r);

[[nodiscard]] ScenarioFile load_scenario(const std::filesystem::path& path);
[[nodiscard]] Measurements load_measurements(const std::filesystem::path& path);
[[nodiscard]] Solution load_solution(const std::filesystem::path& path);
[[nodiscard]] MonteCarloReport load_report(const std::filesystem::path& path);

} // namespace doppler::io
