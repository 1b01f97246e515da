// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [criterion numbers...]   (default: all nine)

#include "support.hpp"

#include "doppler/errors.hpp"
#include "doppler/filter.hpp"
#include "doppler/monodromy.hpp"
#include "doppler/montecarlo.hpp"
#include "doppler/orbit.hpp"
#include "doppler/scenario.hpp"
#include "doppler/solve.hpp"
#include "doppler/textio.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace doppler;
using namespace testsupport;

namespace {

// Pinned tolerances.
constexpr double kRecoveryTol = 1e-8;        // relative, criterion 2
constexpr double kSolveBudget = 10.0;        // seconds per solve, criterion 2
constexpr double kTruthMatchTol = 1e-6;      // relative, criterion 3
constexpr double kEquationFactor = 10.0;     // x corrector_tol, criterion 4
constexpr double kUnsquaredTruthTol = 1e-10; // relative, criterion 4
constexpr double kMateTol = 1e-6;            // criterion 5
constexpr double kJacobianTol = 1e-5;        // relative, criterion 6
constexpr double kFdStep = 1e-6;
constexpr int kMonteCarloTrials = 100;       // criterion 7
constexpr double kMaxFailureFraction = 0.10;
constexpr double kMonteCarloBudget = 1800.0; // seconds, criterion 7
constexpr double kOrbitTol = 1e-9;           // criterion 8
constexpr double kPeriapsisTol = 1e-12;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string& why) {
        pass = false;
        detail << " [" << why << "]";
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Target instance in the solver's offset units, with the truth in the same units.
struct OffsetInstance {
    DopplerSystem sys{Family{}};
    ParamVec params;
    ComplexVec truth;
};

OffsetInstance offset_instance(const Measurements& m, const TransmitterState& truth) {
    const SolveRequest req = m.request();
    const OffsetFrame frame = offset_frame(req.receivers, req.c, req.known_frequency);
    auto [sys, params] = offset_system(m.family(), req.receivers, frame);
    TransmitterState scaled = frame.scale(truth);
    return {sys, params, to_unknowns(scaled, m.family())};
}

std::vector<PathResult> track_pack(const StartPack& pack, const OffsetInstance& target,
                                   const TrackerConfig& cfg = {}) {
    ParamVec start = pack.start_params;
    std::vector<ComplexVec> sols = pack.solutions;
    if (target.sys.offset_form()) {
        start = lift_parameters(pack.system(), start);
        for (auto& x : sols) x = lift_solution(x);
    }
    return track_all(target.sys, start, target.params, sols, cfg);
}

// ---------------------------------------------------------------------------

void criterion_root_counts(Outcome& out) {
    const std::map<std::string, int> expected_halved = {{"stationary-unknown-f", 148},
                                                        {"stationary-known-f", 24}};
    for (const Family& family : all_families()) {
        const int expected = expected_root_count(family);
        for (std::uint64_t seed : {11u, 12u, 13u}) {
            const auto t0 = std::chrono::steady_clock::now();
            std::mt19937_64 rng(seed);
            const SeedPair pair = seed_instance(family, rng);
            StartPack pack;
            try {
                pack = populate(family, pair, TrackerConfig{}, rng);
            } catch (const Error& e) {
                out.fail(family.name() + " seed " + std::to_string(seed) + ": " + e.what());
                continue;
            }
            out.detail << " " << family.name() << "/" << seed << "=" << pack.root_count();
            if (pack.root_count() != expected) {
                out.fail(family.name() + " seed " + std::to_string(seed) + " gave " +
                         std::to_string(pack.root_count()));
            }
            if (family.stationary) {
                const StartPack half = halve_by_symmetry(pack);
                out.detail << "->" << half.root_count();
                if (half.root_count() != expected_halved.at(family.name())) {
                    out.fail(family.name() + " halved to " + std::to_string(half.root_count()));
                }
            }
            out.detail << " (" << fmt(seconds_since(t0)) << "s)";
        }
    }
}

void criterion_noise_free_recovery(Outcome& out) {
    for (const Scenario& sc : {dolphin_scenario(false), dolphin_scenario(true),
                               iod_scenario(false), iod_scenario(true)}) {
        const Measurements m = simulate_measurements(sc);
        const StartPack pack = load_pack(pack_path(sc.family()), sc.family());
        const auto t0 = std::chrono::steady_clock::now();
        SolveResult res;
        try {
            res = solve(pack, m.request());
        } catch (const Error& e) {
            out.fail(sc.name + ": " + e.what());
            continue;
        }
        const double secs = seconds_since(t0);
        const TransmitterState& est = res.candidates.front().state;
        const double er = relative_error(est.r, sc.truth.r);
        const double ev = relative_error(est.v, sc.truth.v);
        const double ef = std::abs(est.f - sc.truth.f) / sc.truth.f;
        out.detail << " " << sc.name << ": n=" << res.candidates.size() << " r " << fmt(er)
                   << " v " << fmt(ev) << " f " << fmt(ef) << " " << fmt(secs) << "s;";
        if (res.candidates.size() != 1) out.fail(sc.name + " candidate count");
        if (!(er <= kRecoveryTol && ev <= kRecoveryTol && ef <= kRecoveryTol)) {
            out.fail(sc.name + " error above tolerance");
        }
        if (!(secs <= kSolveBudget)) out.fail(sc.name + " over time budget");
    }
}

void criterion_filter_uniqueness(Outcome& out) {
    constexpr int kInstances = 100;
    for (const Family& family : all_families()) {
        const StartPack pack = load_pack(pack_path(family), family);
        std::mt19937_64 rng(2024 + static_cast<int>(family.known_frequency) +
                            2 * static_cast<int>(family.stationary));
        int unique = 0;
        int lost = 0;
        int exceptions = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (int k = 0; k < kInstances; ++k) {
            const Instance inst = random_instance(family, rng);
            try {
                const SolveResult res = solve(pack, inst.request());
                const TransmitterState& top = res.candidates.front().state;
                const bool match = relative_error(top.r, inst.truth.r) <= kTruthMatchTol &&
                                   relative_error(top.v, inst.truth.v) <= kTruthMatchTol;
                if (res.candidates.size() == 1 && match) ++unique;
                if (!match) ++lost;
                if (res.candidates.size() != 1 || !match) {
                    std::cerr << family.name() << " instance " << k << ": "
                              << res.candidates.size() << " candidates, truth "
                              << (match ? "on top" : "not on top") << "\n";
                }
            } catch (const Error& e) {
                ++exceptions;
                std::cerr << family.name() << " instance " << k << ": " << e.what() << "\n";
            }
        }
        out.detail << " " << family.name() << " " << unique << "/" << kInstances
                   << " unique, exceptions " << exceptions << " (" << fmt(seconds_since(t0))
                   << "s);";
        if (unique != kInstances || exceptions != 0 || lost != 0) {
            out.fail(family.name() + " not unique in every instance");
        }
    }
}

void criterion_equation_consistency(Outcome& out) {
    const TrackerConfig cfg;
    long checked = 0;
    double worst_endpoint = 0.0;
    double worst_truth = 0.0;
    std::vector<std::pair<Measurements, TransmitterState>> cases;
    for (const Scenario& sc : {dolphin_scenario(false), dolphin_scenario(true),
                               iod_scenario(false), iod_scenario(true)}) {
        cases.emplace_back(simulate_measurements(sc), sc.truth);
    }
    std::mt19937_64 rng(77);
    for (const Family& family : all_families()) {
        for (int k = 0; k < 5; ++k) {
            const Instance inst = random_instance(family, rng);
            Measurements m;
            m.receivers = inst.receivers;
            m.c = inst.c;
            m.stationary = family.stationary;
            if (family.known_frequency) m.known_frequency = inst.truth.f;
            cases.emplace_back(m, inst.truth);
        }
    }
    for (const auto& [m, truth] : cases) {
        const OffsetInstance target = offset_instance(m, truth);
        const StartPack pack = load_pack(pack_path(m.family()), m.family());
        for (const PathResult& r : track_pack(pack, target, cfg)) {
            if (r.status != PathStatus::Success) continue;
            ++checked;
            worst_endpoint =
                std::max(worst_endpoint, target.sys.relative_residual(target.params, r.endpoint));
        }
        // Each residual is measured against rho_i |v_i - v|, the largest value
        // its range-rate term can take.
        const ComplexVec unsq = target.sys.unsquared_residuals(target.params, target.truth);
        for (int i = 0; i < target.sys.n_obs(); ++i) {
            Vec3 d, w;
            for (int k = 0; k < 3; ++k) {
                d(k) = target.params(target.sys.position_index(i, k)).real() - target.truth(k).real();
                w(k) = target.params(target.sys.velocity_index(i, k)).real() -
                       target.truth(3 + k).real();
            }
            worst_truth = std::max(worst_truth, std::abs(unsq(i)) / (d.norm() * w.norm()));
        }
    }
    out.detail << " " << checked << " Success endpoints, worst Eq5 relative residual "
               << fmt(worst_endpoint) << " (limit " << fmt(kEquationFactor * cfg.corrector_tol)
               << "); worst relative Eq4 residual at truth " << fmt(worst_truth) << " over " << cases.size()
               << " instances";
    if (!(worst_endpoint <= kEquationFactor * cfg.corrector_tol)) out.fail("endpoint residual");
    if (!(worst_truth <= kUnsquaredTruthTol)) out.fail("truth residual");
}

void criterion_stationary_symmetry(Outcome& out) {
    for (bool known_f : {false, true}) {
        const Family family{known_f, true};
        const int full = expected_root_count(family);

        // Closure of an independently populated full start set.
        std::mt19937_64 rng(31);
        const StartPack fresh = populate(family, seed_instance(family, rng), TrackerConfig{}, rng);
        int unmatched = 0;
        for (const auto& x : fresh.solutions) {
            if (find_solution(fresh.solutions, velocity_mate(x), kMateTol) < 0) ++unmatched;
        }
        out.detail << " " << family.name() << ": start set " << fresh.root_count()
                   << " with " << unmatched << " unpaired;";
        if (fresh.root_count() != full || unmatched != 0) out.fail(family.name() + " closure");

        // Target solutions: halved shipped pack plus mates versus the fresh full set.
        const Scenario sc = dolphin_scenario(known_f);
        const OffsetInstance target = offset_instance(simulate_measurements(sc), sc.truth);
        const StartPack halved = load_pack(pack_path(family), family);
        std::vector<ComplexVec> rebuilt;
        std::vector<ComplexVec> direct;
        auto add = [](std::vector<ComplexVec>& set, const ComplexVec& x) {
            if (find_solution(set, x, kMateTol) < 0) set.push_back(x);
        };
        for (const PathResult& r : track_pack(halved, target)) {
            if (r.status != PathStatus::Success) continue;
            add(rebuilt, r.endpoint);
            add(rebuilt, velocity_mate(r.endpoint));
        }
        // Paths lost to a near-singular arc are retried with other gammas.
        for (int pass = 0; pass < 3 && static_cast<int>(direct.size()) < full; ++pass) {
            TrackerConfig cfg;
            cfg.gamma *= std::polar(1.0, 0.7 * (pass + 1));
            for (const PathResult& r : track_pack(fresh, target, cfg)) {
                if (r.status == PathStatus::Success) add(direct, r.endpoint);
            }
        }
        int missing = 0;
        for (const auto& x : direct) missing += find_solution(rebuilt, x, kMateTol) < 0;
        out.detail << " target: " << halved.root_count() << " halved paths rebuild "
                   << rebuilt.size() << ", full tracking finds " << direct.size() << ", "
                   << missing << " missing;";
        if (static_cast<int>(rebuilt.size()) != full || static_cast<int>(direct.size()) != full ||
            missing != 0) {
            out.fail(family.name() + " reconstruction");
        }
    }
}

double jacobian_error(const DopplerSystem& sys, const ParamVec& p, const ComplexVec& x) {
    const ComplexMat jx = sys.jacobian_unknowns(p, x);
    const ParamMat jp = sys.jacobian_parameters(p, x);
    double err = 0.0;
    for (int j = 0; j < x.size(); ++j) {
        ComplexVec xp = x;
        ComplexVec xm = x;
        const double h = kFdStep * std::max(1.0, std::abs(x(j)));
        xp(j) += h;
        xm(j) -= h;
        const ComplexVec fd = (sys.evaluate(p, xp) - sys.evaluate(p, xm)) / (2.0 * h);
        const double scale = std::max(jx.col(j).cwiseAbs().maxCoeff(), 1e-300);
        err = std::max(err, (fd - jx.col(j)).cwiseAbs().maxCoeff() / scale);
    }
    for (int j = 0; j < p.size(); ++j) {
        if (jp.col(j).cwiseAbs().maxCoeff() == 0.0) continue;
        ParamVec pp = p;
        ParamVec pm = p;
        const double h = kFdStep * std::max(1.0, std::abs(p(j)));
        pp(j) += h;
        pm(j) -= h;
        const ComplexVec fd = (sys.evaluate(pp, x) - sys.evaluate(pm, x)) / (2.0 * h);
        const double scale = jp.col(j).cwiseAbs().maxCoeff();
        err = std::max(err, (fd - jp.col(j)).cwiseAbs().maxCoeff() / scale);
    }
    return err;
}

void criterion_jacobians(Outcome& out) {
    constexpr int kInstances = 100;
    std::mt19937_64 rng(6);
    double worst = 0.0;
    int count = 0;
    for (int k = 0; k < kInstances; ++k) {
        for (const Family& family : all_families()) {
            // Real instances near a physical configuration and generic complex ones.
            const Instance inst = random_instance(family, rng);
            const DopplerSystem plain(family, inst.truth.f);
            const ParamVec p_real = make_parameters(plain, inst.receivers, inst.c);
            worst = std::max(worst, jacobian_error(plain, p_real, to_unknowns(inst.truth, family)));

            const DopplerSystem generic(family, 1.0);
            worst = std::max(worst, jacobian_error(generic, random_parameters(family, rng),
                                                   random_complex_vec(rng, family.num_unknowns())));
            count += 2;
            if (!family.known_frequency) {
                const DopplerSystem offset(family, 1.0, true);
                ParamVec p = random_parameters(family, rng);
                p.conservativeResize(offset.num_parameters());
                p(offset.lambda_index()) = random_complex(rng);
                worst = std::max(worst,
                                 jacobian_error(offset, p, random_complex_vec(rng, 7)));
                ++count;
            }
        }
    }
    out.detail << " " << count << " instances, worst relative deviation " << fmt(worst)
               << " (limit " << fmt(kJacobianTol) << ")";
    if (!(worst <= kJacobianTol)) out.fail("Jacobian mismatch");
}

// Signed samples are unimodal about zero when a Gaussian kernel density
// estimate has one significant peak and the sample median is within four
// standard errors of zero.
bool unimodal_about_zero(std::vector<double> xs, std::string& why) {
    if (xs.size() < 10) {
        why = "too few samples";
        return false;
    }
    std::sort(xs.begin(), xs.end());
    const double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
    const double robust_sd = iqr / 1.349;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(xs.size() - 1));
    const double bw = 0.9 * std::min(sd, robust_sd) * std::pow(static_cast<double>(xs.size()), -0.2);
    if (!(bw > 0.0)) {
        why = "degenerate spread";
        return false;
    }
    const double lo = quantile(xs, 0.01);
    const double hi = quantile(xs, 0.99);
    constexpr int kGrid = 200;
    std::vector<double> density(kGrid + 1, 0.0);
    for (int g = 0; g <= kGrid; ++g) {
        const double at = lo + (hi - lo) * g / kGrid;
        for (double x : xs) density[g] += std::exp(-0.5 * std::pow((at - x) / bw, 2));
    }
    const auto top = std::max_element(density.begin(), density.end());
    const double peak = *top;
    const int main_at = static_cast<int>(top - density.begin());
    // A secondary peak counts only if it reaches a quarter of the main peak
    // and the valley separating the two is deep.
    int peaks = 1;
    for (int g = 1; g < kGrid; ++g) {
        if (g == main_at || !(density[g] >= density[g - 1] && density[g] > density[g + 1])) continue;
        if (density[g] < 0.25 * peak) continue;
        const int a = std::min(g, main_at);
        const int b = std::max(g, main_at);
        const double valley = *std::min_element(density.begin() + a, density.begin() + b + 1);
        if (valley < 0.7 * density[g]) ++peaks;
    }
    if (peaks != 1) {
        why = std::to_string(peaks) + " peaks";
        return false;
    }
    const double median = quantile(xs, 0.5);
    const double median_se = 1.2533 * robust_sd / std::sqrt(static_cast<double>(xs.size()));
    if (std::abs(median) > 4.0 * median_se) {
        why = "median " + fmt(median) + " vs standard error " + fmt(median_se);
        return false;
    }
    return true;
}

void criterion_monte_carlo(Outcome& out) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Case {
        Scenario scenario;
        NoiseConfig noise;
    };
    const std::vector<Case> cases = {{dolphin_scenario(false), dolphin_noise()},
                                     {dolphin_scenario(true), dolphin_noise()},
                                     {iod_scenario(false), iod_noise()},
                                     {iod_scenario(true), iod_noise()}};
    for (const Case& c : cases) {
        const StartPack pack = load_pack(pack_path(c.scenario.family()), c.scenario.family());
        MonteCarloConfig cfg;
        cfg.trials = kMonteCarloTrials;
        cfg.seed = 99;
        const MonteCarloReport full = run_monte_carlo(c.scenario, c.noise, pack, cfg);
        const MonteCarloReport tenth = run_monte_carlo(c.scenario, c.noise.scaled(0.1), pack, cfg);
        out.detail << " " << c.scenario.name << ": failures " << full.failures << " and "
                   << tenth.failures << " of " << kMonteCarloTrials;

        for (const MonteCarloReport* rep : {&full, &tenth}) {
            if (rep->failure_fraction() > kMaxFailureFraction) {
                out.fail(c.scenario.name + " failure fraction " + fmt(rep->failure_fraction()));
            }
            // Signed error components over successes.
            std::map<std::string, std::vector<double>> signed_errors;
            for (const TrialRecord& t : rep->records) {
                if (!t.success) continue;
                for (int k = 0; k < 3; ++k) {
                    signed_errors["r" + std::to_string(k)].push_back(t.position_error(k));
                    signed_errors["v" + std::to_string(k)].push_back(t.velocity_error(k));
                }
                if (!c.scenario.known_frequency) signed_errors["f"].push_back(t.frequency_error);
                if (t.element_errors) {
                    for (std::size_t k = 0; k < 6; ++k) {
                        signed_errors[kElementNames[k]].push_back((*t.element_errors)[k]);
                    }
                }
            }
            for (const auto& [name, xs] : signed_errors) {
                for (double x : xs) {
                    if (!std::isfinite(x)) out.fail(c.scenario.name + " non-finite " + name);
                }
                std::string why;
                if (!unimodal_about_zero(xs, why)) {
                    out.fail(c.scenario.name + (rep == &tenth ? " x0.1 " : " ") + name + ": " + why);
                }
            }
        }
        for (const SummaryRow& row : full.summary) {
            const SummaryRow* small = tenth.find(row.quantity);
            if (row.quantity == "frequency" && c.scenario.known_frequency) continue;
            out.detail << " " << row.quantity << " " << fmt(row.median) << "->"
                       << fmt(small ? small->median : NAN);
            if (!small || !(small->median < row.median)) {
                out.fail(c.scenario.name + " median of " + row.quantity + " did not shrink");
            }
        }
        out.detail << ";";
    }
    const double secs = seconds_since(t0);
    out.detail << " " << fmt(secs) << "s";
    if (secs > kMonteCarloBudget) out.fail("over the runtime budget");
}

void criterion_orbits(Outcome& out) {
    constexpr int kOrbits = 1000;
    std::mt19937_64 rng(8);
    double worst_elements = 0.0;
    double worst_state = 0.0;
    for (int k = 0; k < kOrbits; ++k) {
        const OrbitalElements el = random_orbit(rng);
        const auto [r, v] = elements_to_cartesian(el, kEarthMu);
        const OrbitalElements back = cartesian_to_elements(r, v, kEarthMu);
        worst_elements = std::max({worst_elements, std::abs(back.a - el.a) / el.a,
                                   std::abs(back.e - el.e),
                                   std::abs(angle_difference(back.i, el.i)),
                                   std::abs(angle_difference(back.raan, el.raan)),
                                   std::abs(angle_difference(back.argp, el.argp)),
                                   std::abs(angle_difference(back.nu, el.nu))});
        const auto [r2, v2] = elements_to_cartesian(back, kEarthMu);
        worst_state = std::max({worst_state, (r2 - r).norm() / r.norm(), (v2 - v).norm() / v.norm()});
    }
    OrbitalElements paper;
    paper.a = 12000e3;
    paper.e = 0.1;
    paper.i = deg2rad(20.0);
    paper.raan = deg2rad(200.0);
    paper.argp = deg2rad(20.0);
    paper.nu = 0.0;
    const double periapsis = elements_to_cartesian(paper, kEarthMu).first.norm();
    const double periapsis_err = std::abs(periapsis - 10800e3) / 10800e3;
    out.detail << " " << kOrbits << " orbits: worst element error " << fmt(worst_elements)
               << ", worst state error " << fmt(worst_state) << "; periapsis " << periapsis
               << " m (relative error " << fmt(periapsis_err) << ")";
    if (!(worst_elements <= kOrbitTol && worst_state <= kOrbitTol)) out.fail("round trip");
    if (!(periapsis_err <= kPeriapsisTol)) out.fail("periapsis");
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DOPPLER_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_determinism(Outcome& out) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("doppler-accept-" + std::to_string(getpid()));
    fs::create_directories(dir);
    auto p = [&](const std::string& name) { return (dir / name).string(); };

    // Each command runs twice; the pairs of primary outputs must match byte for byte.
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
        {"scenario iod -o {}.scenario", {".scenario"}},
        {"simulate " + p("a.scenario") + " --noise --seed 42 -o {}.meas", {".meas"}},
        {"solve " + p("a.meas") + " --seed 42 -o {}.sol", {".sol"}},
        {"montecarlo " + p("d.scenario") + " --trials 6 --seed 5 -o {}.rep --csv {}.csv",
         {".rep", ".csv"}},
        {"montecarlo " + p("d.scenario") + " --trials 6 --seed 5 --threads 3 -o {}.rep",
         {".rep"}},
        {"seed-pack --stationary --known-f --seed 5 -o {}.pack", {".pack"}},
    };
    if (run_cli("scenario dolphin -o " + p("d.scenario")) != 0) out.fail("scenario setup");
    int compared = 0;
    int index = 0;
    for (const auto& [pattern, exts] : runs) {
        ++index;
        for (const char* tag : {"a", "b"}) {
            std::string args = pattern;
            const std::string stem = p("run" + std::to_string(index) + tag);
            for (std::size_t pos; (pos = args.find("{}")) != std::string::npos;) {
                args.replace(pos, 2, stem);
            }
            const int code = run_cli(args);
            if (code != 0) out.fail("exit " + std::to_string(code) + " from: " + args);
        }
        for (const std::string& ext : exts) {
            const std::string a = p("run" + std::to_string(index) + "a" + ext);
            const std::string b = p("run" + std::to_string(index) + "b" + ext);
            try {
                if (textio::read_file(a) != textio::read_file(b)) out.fail("outputs differ: " + a);
                ++compared;
            } catch (const Error& e) {
                out.fail(e.what());
            }
        }
        // Later commands read the first output of earlier ones.
        if (index == 1) fs::copy_file(p("run1a.scenario"), p("a.scenario"));
        if (index == 2) fs::copy_file(p("run2a.meas"), p("a.meas"));
    }
    // Thread count must not change the report either.
    try {
        if (textio::read_file(p("run4a.rep")) != textio::read_file(p("run5a.rep"))) {
            out.fail("report depends on --threads");
        }
        ++compared;
    } catch (const Error& e) {
        out.fail(e.what());
    }
    out.detail << " " << compared << " output pairs compared";
    fs::remove_all(dir);
}

struct Criterion {
    int number;
    const char* name;
    std::function<void(Outcome&)> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "root counts", criterion_root_counts},
        {2, "noise-free recovery", criterion_noise_free_recovery},
        {3, "filtering uniqueness", criterion_filter_uniqueness},
        {4, "equation consistency", criterion_equation_consistency},
        {5, "stationary symmetry", criterion_stationary_symmetry},
        {6, "Jacobian correctness", criterion_jacobians},
        {7, "Monte Carlo behaviour", criterion_monte_carlo},
        {8, "astrodynamics round trip", criterion_orbits},
        {9, "determinism", criterion_determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && !selected.count(c.number)) continue;
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.fail(std::string("exception: ") + e.what());
        }
        failures += out.pass ? 0 : 1;
        std::cout << "criterion " << c.number << " (" << c.name << "): "
                  << (out.pass ? "PASS" : "FAIL") << " [" << fmt(seconds_since(t0)) << "s]"
                  << out.detail.str() << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
