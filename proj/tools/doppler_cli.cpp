// doppler: simulate Doppler measurements, solve them with a start pack,
// run Monte Carlo studies and build start packs.
//
// Exit codes:
//   0 success
//   2 usage, parse or I/O error
//   3 physics error (coincident points, zero frequency, singular geometry...)
//   4 no candidate survived filtering / Monte Carlo failure fraction > 50%
//   5 family mismatch, corrupt or missing start pack
//   6 start pack root count differs from the expected one

#include "doppler/errors.hpp"
#include "doppler/io.hpp"
#include "doppler/monodromy.hpp"
#include "doppler/montecarlo.hpp"
#include "doppler/scenario.hpp"
#include "doppler/solve.hpp"
#include "doppler/textio.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifndef DOPPLER_PACK_DIR
#define DOPPLER_PACK_DIR "data/packs"
#endif
#ifndef DOPPLER_VERSION
#define DOPPLER_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace doppler;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitNoCandidates = 4;
constexpr int kExitPack = 5;
constexpr int kExitCount = 6;

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
    case ErrorCode::InvalidArgument:
        return kExitUsage;
    case ErrorCode::NoCandidates:
        return kExitNoCandidates;
    case ErrorCode::FamilyMismatch:
    case ErrorCode::CorruptPack:
    case ErrorCode::PackMissing:
        return kExitPack;
    default:
        return kExitPhysics;
    }
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string digest_of_file(const fs::path& path) {
    return "fnv1a64:" + textio::hex64(textio::fnv1a(textio::read_file(path)));
}

// Per-run provenance written next to the primary output as <out>.manifest.json.
class Manifest {
public:
    explicit Manifest(std::string command) : command_(std::move(command)), started_(utc_now()) {}

    void config(const json& cfg) { config_ = cfg; }
    void seed(std::uint64_t s) { seed_ = s; }
    void input(const fs::path& p) { inputs_[p.string()] = digest_of_file(p); }
    void output(const fs::path& p) { outputs_[p.string()] = digest_of_file(p); }

    void write(const fs::path& primary, int exit_code) const {
        json j;
        j["command"] = command_;
        j["tool_version"] = DOPPLER_VERSION;
        j["seed"] = seed_;
        j["config"] = config_;
        j["config_digest"] = "fnv1a64:" + textio::hex64(textio::fnv1a(config_.dump()));
        j["started_at"] = started_;
        j["finished_at"] = utc_now();
        j["exit_code"] = exit_code;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        textio::write_file(fs::path(primary.string() + ".manifest.json"), j.dump(2) + "\n");
    }

private:
    std::string command_;
    std::string started_;
    json config_ = json::object();
    std::uint64_t seed_ = 0;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> outputs_;
};

struct Common {
    std::optional<std::uint64_t> seed;
    int threads = 1;
    bool json_out = false;
};

// Emits the result either as JSON on stdout or as plain text lines.
void report(const Common& common, const json& j, const std::vector<std::string>& text) {
    if (common.json_out) {
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& line : text) std::cout << line << "\n";
    }
}

int report_error(const Common& common, const std::string& command, ErrorCode code,
                 const std::string& message, int exit_code) {
    if (common.json_out) {
        json j;
        j["command"] = command;
        j["exit_code"] = exit_code;
        j["error"] = to_string(code);
        j["message"] = message;
        std::cout << j.dump(2) << "\n";
    }
    std::cerr << "doppler " << command << ": " << message << "\n";
    return exit_code;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// ---- noise flags -------------------------------------------------------------

struct NoiseFlags {
    bool enable = false;
    std::optional<double> scale;
    std::optional<double> sigma_f;
    std::vector<std::string> sigma_r;
    std::vector<std::string> sigma_v;

    void add(CLI::App* app, bool with_enable) {
        if (with_enable) app->add_flag("--noise", enable, "Apply the scenario's noise model");
        app->add_option("--noise-scale", scale, "Multiply every sigma by this factor")
            ->check(CLI::NonNegativeNumber);
        app->add_option("--sigma-f", sigma_f, "Frequency noise sigma (Hz)")
            ->check(CLI::NonNegativeNumber);
        app->add_option("--sigma-r", sigma_r, "Position noise CLASS=SIGMA (m); CLASS '*' = default");
        app->add_option("--sigma-v", sigma_v, "Velocity noise CLASS=SIGMA (m/s); CLASS '*' = default");
    }

    [[nodiscard]] bool any_override() const {
        return scale || sigma_f || !sigma_r.empty() || !sigma_v.empty();
    }

    [[nodiscard]] NoiseConfig apply(std::optional<NoiseConfig> base) const {
        NoiseConfig n = base.value_or(NoiseConfig{});
        if (sigma_f) n.sigma_f = *sigma_f;
        auto assign = [&](const std::vector<std::string>& items, bool position) {
            for (const auto& item : items) {
                const auto eq = item.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw Error(ErrorCode::InvalidArgument, "expected CLASS=SIGMA, got '" + item + "'");
                }
                const std::string cls = item.substr(0, eq);
                const double value = textio::parse_double(item.substr(eq + 1));
                NoiseClass& target = cls == "*" ? n.fallback : n.classes[cls];
                (position ? target.sigma_r : target.sigma_v) = value;
            }
        };
        assign(sigma_r, true);
        assign(sigma_v, false);
        if (scale) n = n.scaled(*scale);
        n.validate();
        return n;
    }

    [[nodiscard]] json to_json(const NoiseConfig& n) const {
        json j;
        j["sigma_f"] = n.sigma_f;
        j["default"] = {n.fallback.sigma_r, n.fallback.sigma_v};
        json classes = json::object();
        for (const auto& [name, cls] : n.classes) classes[name] = {cls.sigma_r, cls.sigma_v};
        j["classes"] = classes;
        return j;
    }
};

fs::path default_pack(const Family& family) {
    return fs::path(DOPPLER_PACK_DIR) / (family.name() + ".pack");
}

StartPack load_pack_for(const std::optional<std::string>& pack_flag, const Family& family,
                        fs::path& used) {
    used = pack_flag ? fs::path(*pack_flag) : default_pack(family);
    if (!fs::exists(used)) {
        throw Error(ErrorCode::PackMissing, "start pack not found: " + used.string());
    }
    return load_pack(used, family);
}

// ---- commands ----------------------------------------------------------------

struct ScenarioArgs {
    std::string builtin;
    bool known_f = false;
    std::string out;
};

int cmd_scenario(const ScenarioArgs& a, const Common& common) {
    io::ScenarioFile file;
    if (a.builtin == "dolphin") {
        file.scenario = dolphin_scenario(a.known_f);
        file.noise = dolphin_noise(common.seed.value_or(0));
    } else {
        file.scenario = iod_scenario(a.known_f);
        file.noise = iod_noise(common.seed.value_or(0));
    }
    file.scenario.validate();
    textio::write_file(a.out, io::serialize(file));
    Manifest m("scenario");
    m.seed(common.seed.value_or(0));
    m.config({{"builtin", a.builtin}, {"known_f", a.known_f}});
    m.output(a.out);
    m.write(a.out, kExitOk);
    json j{{"command", "scenario"}, {"exit_code", 0}, {"scenario", file.scenario.name},
           {"family", file.scenario.family().name()}, {"receivers", file.scenario.receivers.size()},
           {"output", a.out}};
    report(common, j,
           {"wrote " + a.out + " (" + file.scenario.name + ", " +
            std::to_string(file.scenario.receivers.size()) + " receivers)"});
    return kExitOk;
}

struct SimulateArgs {
    std::string scenario;
    std::string out;
    NoiseFlags noise;
};

int cmd_simulate(const SimulateArgs& a, const Common& common) {
    const io::ScenarioFile file = io::load_scenario(a.scenario);
    std::optional<NoiseConfig> noise;
    if (a.noise.enable || a.noise.any_override()) {
        noise = a.noise.apply(a.noise.enable ? file.noise : std::nullopt);
        if (common.seed) noise->rng_seed = *common.seed;
    }
    const Measurements meas = simulate_measurements(file.scenario, noise);
    textio::write_file(a.out, io::serialize(meas));

    // Forward check: the noise-free truth must satisfy the squared system.
    double residual = 0.0;
    if (!noise) {
        const DopplerSystem sys(meas.family(), meas.known_frequency.value_or(1.0));
        residual = sys.relative_residual(meas.parameters(),
                                         to_unknowns(file.scenario.truth, meas.family()));
    }

    Manifest m("simulate");
    const std::uint64_t seed = noise ? noise->rng_seed : 0;
    m.seed(seed);
    m.config({{"noise", noise ? a.noise.to_json(*noise) : json(nullptr)}});
    m.input(a.scenario);
    m.output(a.out);
    m.write(a.out, kExitOk);

    json j{{"command", "simulate"}, {"exit_code", 0}, {"family", meas.family().name()},
           {"receivers", meas.receivers.size()}, {"extra_receiver", meas.extra_receiver.has_value()},
           {"noise", noise.has_value()}, {"seed", seed}, {"output", a.out}};
    std::vector<std::string> text{"wrote " + a.out + " (" + meas.family().name() + ", " +
                                  std::to_string(meas.receivers.size()) + " receivers" +
                                  (meas.extra_receiver ? " + extra" : "") + ")"};
    if (!noise) {
        j["truth_relative_residual"] = residual;
        text.push_back("truth residual " + textio::format_double(residual));
    }
    report(common, j, text);
    return kExitOk;
}

struct SolveArgs {
    std::string measurements;
    std::string out;
    std::optional<std::string> pack;
    std::optional<std::string> extra;
    bool no_extra = false;
    int max_passes = 3;
};

Receiver parse_receiver_flag(const std::string& text) {
    std::string spaced = text;
    for (char& ch : spaced) {
        if (ch == ',') ch = ' ';
    }
    const auto tok = textio::split_ws(spaced);
    if (tok.size() != 7) {
        throw Error(ErrorCode::InvalidArgument,
                    "--extra-receiver expects x,y,z,vx,vy,vz,f (7 numbers), got '" + text + "'");
    }
    Receiver rx;
    for (int k = 0; k < 3; ++k) rx.r(k) = textio::parse_double(tok[static_cast<std::size_t>(k)]);
    for (int k = 0; k < 3; ++k) rx.v(k) = textio::parse_double(tok[static_cast<std::size_t>(k + 3)]);
    rx.f = textio::parse_double(tok[6]);
    return rx;
}

int cmd_solve(const SolveArgs& a, const Common& common) {
    Measurements meas = io::load_measurements(a.measurements);
    if (a.extra) meas.extra_receiver = parse_receiver_flag(*a.extra);
    if (a.no_extra) meas.extra_receiver.reset();

    Manifest m("solve");
    m.seed(common.seed.value_or(0));
    m.input(a.measurements);
    fs::path pack_path;
    const StartPack pack = load_pack_for(a.pack, meas.family(), pack_path);
    m.input(pack_path);

    SolveOptions opts;
    opts.tracker.threads = common.threads;
    opts.max_passes = a.max_passes;
    m.config({{"pack", pack_path.string()},
              {"extra_receiver", meas.extra_receiver.has_value()},
              {"max_passes", opts.max_passes},
              {"realness_tol", opts.realness_tol},
              {"unsquared_tol", opts.unsquared_tol}});

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult result;
    try {
        result = solve(pack, meas.request(), opts);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoCandidates) m.write(a.out, kExitNoCandidates);
        throw;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const io::Solution sol = io::make_solution(meas, result);
    textio::write_file(a.out, io::serialize(sol));
    m.output(a.out);
    m.write(a.out, kExitOk);

    const SolveStats& st = result.stats;
    json j{{"command", "solve"}, {"exit_code", 0}, {"family", sol.family}, {"output", a.out}};
    j["stats"] = {{"paths_tracked", st.paths_tracked}, {"passes", st.passes},
                  {"succeeded", st.succeeded},         {"distinct", st.distinct},
                  {"expected", st.expected},           {"real", st.real},
                  {"positive", st.positive},           {"consistent", st.consistent},
                  {"candidates", st.candidates}};
    json cands = json::array();
    for (const auto& c : result.candidates) {
        json cj{{"position", vec_json(c.state.r)}, {"velocity", vec_json(c.state.v)},
                {"frequency", c.state.f}, {"squared_residual", c.squared_residual},
                {"max_unsquared_residual", c.max_unsquared_residual}};
        cj["extra_residual"] = c.extra_residual ? json(*c.extra_residual) : json(nullptr);
        cands.push_back(cj);
    }
    j["candidates"] = cands;

    std::vector<std::string> text{
        "tracked " + std::to_string(st.paths_tracked) + " paths in " + std::to_string(st.passes) +
            " pass(es): " + std::to_string(st.distinct) + "/" + std::to_string(st.expected) +
            " distinct endpoints, " + std::to_string(st.real) + " real, " +
            std::to_string(st.positive) + " f>0, " + std::to_string(st.consistent) +
            " sign-consistent, " + std::to_string(st.candidates) + " candidate(s)",
        "solve time " + textio::format_double(seconds) + " s"};
    for (std::size_t k = 0; k < result.candidates.size(); ++k) {
        const auto& s = result.candidates[k].state;
        text.push_back("#" + std::to_string(k + 1) + " r = [" + textio::format_double(s.r.x()) +
                       ", " + textio::format_double(s.r.y()) + ", " +
                       textio::format_double(s.r.z()) + "] v = [" + textio::format_double(s.v.x()) +
                       ", " + textio::format_double(s.v.y()) + ", " +
                       textio::format_double(s.v.z()) + "] f = " + textio::format_double(s.f));
    }
    text.push_back("wrote " + a.out);
    report(common, j, text);
    return kExitOk;
}

struct MonteCarloArgs {
    std::string scenario;
    std::string out;
    std::optional<std::string> csv;
    std::optional<std::string> pack;
    int trials = 100;
    NoiseFlags noise;
};

int cmd_montecarlo(const MonteCarloArgs& a, const Common& common) {
    const io::ScenarioFile file = io::load_scenario(a.scenario);
    const NoiseConfig noise = a.noise.apply(file.noise);

    Manifest m("montecarlo");
    m.input(a.scenario);
    fs::path pack_path;
    const StartPack pack = load_pack_for(a.pack, file.scenario.family(), pack_path);
    m.input(pack_path);

    MonteCarloConfig cfg;
    cfg.trials = a.trials;
    cfg.seed = common.seed.value_or(noise.rng_seed);
    cfg.threads = common.threads;
    m.seed(cfg.seed);
    m.config({{"trials", cfg.trials},
              {"pack", pack_path.string()},
              {"noise", a.noise.to_json(noise)},
              {"gate_factor", cfg.gate_factor},
              {"gate_min_successes", cfg.gate_min_successes}});

    const MonteCarloReport rep = run_monte_carlo(file.scenario, noise, pack, cfg);
    textio::write_file(a.out, io::serialize(rep));
    m.output(a.out);
    if (a.csv) {
        textio::write_file(*a.csv, io::report_long_csv(rep));
        m.output(*a.csv);
    }
    const int code = rep.failure_fraction() > 0.5 ? kExitNoCandidates : kExitOk;
    m.write(a.out, code);

    json j{{"command", "montecarlo"}, {"exit_code", code}, {"scenario", rep.scenario},
           {"family", rep.family}, {"trials", rep.trials}, {"successes", rep.successes},
           {"failures", rep.failures}, {"output", a.out}};
    json summary = json::object();
    std::vector<std::string> text{std::to_string(rep.trials) + " trials, " +
                                  std::to_string(rep.successes) + " successes, " +
                                  std::to_string(rep.failures) + " failures"};
    for (const auto& row : rep.summary) {
        summary[row.quantity] = {{"median", row.median}, {"p95", row.p95}};
        text.push_back(row.quantity + ": median " + textio::format_double(row.median) + ", p95 " +
                       textio::format_double(row.p95));
    }
    j["summary"] = summary;
    text.push_back("wrote " + a.out);
    report(common, j, text);
    if (code != kExitOk) std::cerr << "doppler montecarlo: failure fraction above 50%\n";
    return code;
}

struct SeedPackArgs {
    bool moving = false;
    bool stationary = false;
    bool known_f = false;
    bool unknown_f = false;
    bool halve = false;
    bool no_halve = false;
    bool allow_mismatch = false;
    std::string out;
};

int cmd_seed_pack(const SeedPackArgs& a, const Common& common) {
    if (a.moving == a.stationary) {
        throw Error(ErrorCode::InvalidArgument, "give exactly one of --moving / --stationary");
    }
    if (a.known_f == a.unknown_f) {
        throw Error(ErrorCode::InvalidArgument, "give exactly one of --known-f / --unknown-f");
    }
    const Family family{a.known_f, a.stationary};
    const bool halve = family.stationary && !a.no_halve;
    if (a.halve && !family.stationary) {
        throw Error(ErrorCode::InvalidArgument, "--halve applies to stationary families only");
    }

    const std::uint64_t seed = common.seed.value_or(1);
    std::mt19937_64 rng(seed);
    TrackerConfig tracker;
    tracker.threads = common.threads;
    MonodromyConfig mcfg;
    mcfg.enforce_expected = !a.allow_mismatch;
    const int full_expected = expected_root_count(family);

    Manifest m("seed-pack");
    m.seed(seed);
    m.config({{"family", family.name()}, {"halve", halve}, {"allow_count_mismatch", a.allow_mismatch}});

    const SeedPair seed_pair = seed_instance(family, rng);
    MonodromyStats stats;
    StartPack pack;
    try {
        pack = populate(family, seed_pair, tracker, rng, mcfg, &stats);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoProgress) throw;
        m.write(a.out, kExitCount);
        return report_error(common, "seed-pack", e.code(), e.detail(), kExitCount);
    }
    pack.rng_seed = seed;
    const int full_count = pack.root_count();
    if (halve) pack = halve_by_symmetry(pack);
    const int expected = halve ? full_expected / 2 : full_expected;

    const bool mismatch = pack.root_count() != expected;
    if (mismatch && !a.allow_mismatch) {
        m.write(a.out, kExitCount);
        return report_error(common, "seed-pack", ErrorCode::NoProgress,
                            "found " + std::to_string(pack.root_count()) + " solutions, expected " +
                                std::to_string(expected),
                            kExitCount);
    }
    save_pack(pack, a.out);
    m.output(a.out);
    m.write(a.out, kExitOk);

    json j{{"command", "seed-pack"}, {"exit_code", 0}, {"family", family.name()},
           {"root_count", pack.root_count()}, {"full_count", full_count}, {"expected", expected},
           {"halved", pack.halved}, {"loops", stats.loops}, {"paths_tracked", stats.paths_tracked},
           {"seed", seed}, {"output", a.out}};
    report(common, j,
           {family.name() + ": " + std::to_string(pack.root_count()) + " solutions" +
                (pack.halved ? " (halved from " + std::to_string(full_count) + ")" : "") + " after " +
                std::to_string(stats.loops) + " loops, " + std::to_string(stats.paths_tracked) +
                " paths",
            "wrote " + a.out});
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Doppler transmitter localisation by homotopy continuation"};
    app.set_version_flag("--version", DOPPLER_VERSION);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "RNG seed");
        sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--json", common.json_out, "Machine-readable output on stdout");
    };

    ScenarioArgs scenario_args;
    auto* scenario_cmd = app.add_subcommand("scenario", "Write a built-in scenario file");
    scenario_cmd->add_option("builtin", scenario_args.builtin, "dolphin | iod")
        ->required()
        ->check(CLI::IsMember({"dolphin", "iod"}));
    scenario_cmd->add_flag("--known-f", scenario_args.known_f, "Transmit frequency is known");
    scenario_cmd->add_option("-o,--out", scenario_args.out, "Scenario file")->required();
    add_common(scenario_cmd);

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate measurements for a scenario");
    sim_cmd->add_option("scenario", sim_args.scenario, "Scenario file")->required();
    sim_cmd->add_option("-o,--out", sim_args.out, "Measurement file")->required();
    sim_args.noise.add(sim_cmd, true);
    add_common(sim_cmd);

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a measurement file");
    solve_cmd->add_option("measurements", solve_args.measurements, "Measurement file")->required();
    solve_cmd->add_option("-o,--out", solve_args.out, "Solution file")->required();
    solve_cmd->add_option("--pack", solve_args.pack, "Start pack (default: bundled pack)");
    auto* extra_opt = solve_cmd->add_option("--extra-receiver", solve_args.extra,
                                            "Extra receiver x,y,z,vx,vy,vz,f (SI)");
    solve_cmd->add_flag("--no-extra", solve_args.no_extra, "Ignore the file's extra receiver")
        ->excludes(extra_opt);
    solve_cmd->add_option("--max-passes", solve_args.max_passes, "Tracking passes")
        ->check(CLI::PositiveNumber);
    add_common(solve_cmd);

    MonteCarloArgs mc_args;
    auto* mc_cmd = app.add_subcommand("montecarlo", "Monte Carlo error study of a scenario");
    mc_cmd->add_option("scenario", mc_args.scenario, "Scenario file")->required();
    mc_cmd->add_option("-o,--out", mc_args.out, "Report file")->required();
    mc_cmd->add_option("--csv", mc_args.csv, "Long-format CSV (quantity,trial,error)");
    mc_cmd->add_option("--pack", mc_args.pack, "Start pack (default: bundled pack)");
    mc_cmd->add_option("--trials", mc_args.trials, "Number of trials")->check(CLI::PositiveNumber);
    mc_args.noise.add(mc_cmd, false);
    add_common(mc_cmd);

    SeedPackArgs pack_args;
    auto* pack_cmd = app.add_subcommand("seed-pack", "Build a start pack by monodromy");
    pack_cmd->add_flag("--moving", pack_args.moving, "Moving receivers");
    pack_cmd->add_flag("--stationary", pack_args.stationary, "Stationary receivers");
    pack_cmd->add_flag("--known-f", pack_args.known_f, "Transmit frequency known");
    pack_cmd->add_flag("--unknown-f", pack_args.unknown_f, "Transmit frequency unknown");
    auto* halve_opt =
        pack_cmd->add_flag("--halve", pack_args.halve, "Store one of each v -> -v pair (default)");
    pack_cmd->add_flag("--no-halve", pack_args.no_halve, "Store the full solution set")
        ->excludes(halve_opt);
    pack_cmd->add_flag("--allow-count-mismatch", pack_args.allow_mismatch,
                       "Write the pack even if the root count is unexpected");
    pack_cmd->add_option("-o,--out", pack_args.out, "Pack file")->required();
    add_common(pack_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "scenario") return cmd_scenario(scenario_args, common);
        if (command == "simulate") return cmd_simulate(sim_args, common);
        if (command == "solve") return cmd_solve(solve_args, common);
        if (command == "montecarlo") return cmd_montecarlo(mc_args, common);
        return cmd_seed_pack(pack_args, common);
    } catch (const Error& e) {
        return report_error(common, command, e.code(), e.detail(), exit_code_for(e.code()));
    } catch (const std::exception& e) {
        return report_error(common, command, ErrorCode::InvalidArgument, e.what(), kExitUsage);
    }
}
