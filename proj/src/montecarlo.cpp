#include "doppler/montecarlo.hpp"

#include "doppler/errors.hpp"
#include "doppler/orbit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace doppler {

void MonteCarloConfig::validate() const {
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
    if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
    if (!(gate_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "gate_factor must be > 0");
}

const SummaryRow* MonteCarloReport::find(const std::string& quantity) const {
    for (const auto& row : summary) {
        if (row.quantity == quantity) return &row;
    }
    return nullptr;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

TrialRecord run_trial(const Scenario& scenario, const NoiseConfig& noise, const StartPack& pack,
                      const MonteCarloConfig& cfg, int trial) {
    TrialRecord rec;
    rec.trial = trial;
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    try {
        const Measurements m = simulate_measurements(scenario, noise, rng);
        SolveOptions opts = cfg.solve;
        opts.tracker.threads = 1;
        const SolveResult res = solve(pack, m.request(), opts);
        const TransmitterState& est = res.candidates.front().state;
        rec.success = true;
        rec.candidates = static_cast<int>(res.candidates.size());
        rec.position_error = est.r - scenario.truth.r;
        rec.velocity_error = est.v - scenario.truth.v;
        rec.frequency_error = scenario.known_frequency ? 0.0 : est.f - scenario.truth.f;
        if (scenario.mu) {
            try {
                const OrbitalElements t =
                    cartesian_to_elements(scenario.truth.r, scenario.truth.v, *scenario.mu);
                const OrbitalElements e = cartesian_to_elements(est.r, est.v, *scenario.mu);
                rec.element_errors = std::array<double, 6>{
                    e.a - t.a,
                    e.e - t.e,
                    rad2deg(angle_difference(e.i, t.i)),
                    rad2deg(angle_difference(e.raan, t.raan)),
                    rad2deg(angle_difference(e.argp, t.argp)),
                    rad2deg(angle_difference(e.nu, t.nu)),
                };
            } catch (const Error&) {
                // Unbound or degenerate estimate: a gross failure.
                rec.success = false;
                rec.failure = "GrossError";
            }
        }
    } catch (const Error& e) {
        rec.success = false;
        rec.failure = to_string(e.code());
    }
    return rec;
}

} // namespace

void summarize(MonteCarloReport& report) {
    report.summary.clear();
    report.successes = 0;
    report.failures = 0;
    std::vector<double> pos, vel, freq;
    std::array<std::vector<double>, 6> elems;
    bool have_elements = false;
    for (const auto& rec : report.records) {
        if (!rec.success) {
            ++report.failures;
            continue;
        }
        ++report.successes;
        pos.push_back(rec.position_error.norm());
        vel.push_back(rec.velocity_error.norm());
        freq.push_back(std::abs(rec.frequency_error));
        if (rec.element_errors) {
            have_elements = true;
            for (std::size_t k = 0; k < 6; ++k) elems[k].push_back(std::abs((*rec.element_errors)[k]));
        }
    }
    report.trials = static_cast<int>(report.records.size());
    auto add = [&](const std::string& name, const std::vector<double>& v) {
        report.summary.push_back(SummaryRow{name, quantile(v, 0.5), quantile(v, 0.95)});
    };
    add("position", pos);
    add("velocity", vel);
    add("frequency", freq);
    if (have_elements) {
        for (std::size_t k = 0; k < 6; ++k) add(kElementNames[k], elems[k]);
    }
}

MonteCarloReport run_monte_carlo(const Scenario& scenario, const NoiseConfig& noise,
                                 const StartPack& pack, const MonteCarloConfig& cfg) {
    cfg.validate();
    scenario.validate();
    noise.validate();
    if (!(pack.family == scenario.family())) {
        throw Error(ErrorCode::PackMissing, "no start pack for family " + scenario.family().name() +
                                                " (got " + pack.family.name() + ")");
    }

    std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < cfg.trials; k = next++) {
            records[static_cast<std::size_t>(k)] = run_trial(scenario, noise, pack, cfg, k);
        }
    };
    if (cfg.threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < std::min(cfg.threads, cfg.trials); ++t) pool.emplace_back(worker);
    }

    // Gross-error gate, applied in trial order.
    std::vector<double> accepted;
    for (auto& rec : records) {
        if (!rec.success) continue;
        const double err = rec.position_error.norm();
        if (static_cast<int>(accepted.size()) >= cfg.gate_min_successes &&
            err > cfg.gate_factor * quantile(accepted, 0.95)) {
            rec.success = false;
            rec.failure = "GrossError";
            continue;
        }
        accepted.push_back(err);
    }

    MonteCarloReport report;
    report.scenario = scenario.name;
    report.family = scenario.family().name();
    report.seed = cfg.seed;
    report.records = std::move(records);
    summarize(report);
    return report;
}

} // namespace doppler
