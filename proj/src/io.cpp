#include "doppler/io.hpp"

#include "doppler/errors.hpp"
#include "doppler/textio.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace doppler::io {

namespace {

using textio::format_double;

constexpr const char* kScenarioHeader = "DOPPLER-SCENARIO 1";
constexpr const char* kMeasurementsHeader = "DOPPLER-MEASUREMENTS 1";
constexpr const char* kSolutionHeader = "DOPPLER-SOLUTION 1";
constexpr const char* kReportHeader = "DOPPLER-MCREPORT 1";

// ---- writing ---------------------------------------------------------------

class Writer {
public:
    explicit Writer(const char* header) { out_ << header << "\nunits SI\n"; }

    Writer& key(const std::string& k) {
        out_ << k;
        return *this;
    }
    Writer& word(const std::string& w) {
        if (w.empty() || w.find_first_of(" \t\r\n") != std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, "'" + w + "' is not a single word");
        }
        out_ << ' ' << w;
        return *this;
    }
    Writer& num(double x) {
        out_ << ' ' << format_double(x);
        return *this;
    }
    Writer& integer(long long x) {
        out_ << ' ' << x;
        return *this;
    }
    Writer& vec(const Vec3& v) { return num(v.x()).num(v.y()).num(v.z()); }
    Writer& opt(const std::optional<double>& x) { return x ? num(*x) : word("none"); }
    void end() { out_ << '\n'; }

    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

// ---- reading ---------------------------------------------------------------

struct Line {
    int number = 0;
    std::vector<std::string> tok;
};

class Reader {
public:
    Reader(const std::string& text, const char* header) {
        std::istringstream in(text);
        std::string raw;
        int number = 0;
        bool first = true;
        while (std::getline(in, raw)) {
            ++number;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            if (first) {
                if (raw != header) {
                    throw Error(ErrorCode::ParseError,
                                "line 1: expected header '" + std::string(header) + "'");
                }
                first = false;
                continue;
            }
            auto tok = textio::split_ws(raw);
            if (tok.empty() || tok[0].starts_with('#')) continue;
            lines_.push_back(Line{number, std::move(tok)});
        }
        if (first) throw Error(ErrorCode::ParseError, "empty file");
    }

    [[nodiscard]] const std::vector<Line>& lines() const { return lines_; }

private:
    std::vector<Line> lines_;
};

[[noreturn]] void fail(const Line& line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line.number) + ": " + what);
}

void expect_size(const Line& line, std::size_t n) {
    if (line.tok.size() != n) {
        fail(line, "'" + line.tok[0] + "' expects " + std::to_string(n - 1) + " fields, got " +
                       std::to_string(line.tok.size() - 1));
    }
}

double num_at(const Line& line, std::size_t i) {
    try {
        return textio::parse_double(line.tok.at(i));
    } catch (const Error& e) {
        fail(line, e.detail());
    }
}

long long int_at(const Line& line, std::size_t i) {
    try {
        return textio::parse_int(line.tok.at(i));
    } catch (const Error& e) {
        fail(line, e.detail());
    }
}

bool bool_at(const Line& line, std::size_t i) {
    const long long v = int_at(line, i);
    if (v != 0 && v != 1) fail(line, "expected 0 or 1");
    return v == 1;
}

std::optional<double> opt_at(const Line& line, std::size_t i) {
    if (line.tok.at(i) == "none") return std::nullopt;
    return num_at(line, i);
}

Vec3 vec_at(const Line& line, std::size_t i) {
    return Vec3(num_at(line, i), num_at(line, i + 1), num_at(line, i + 2));
}

// Dispatches each line to its handler; unknown keys and missing required keys
// are errors.
using Handler = std::function<void(const Line&)>;

void dispatch(const Reader& reader, const std::map<std::string, Handler>& handlers,
              const std::vector<std::string>& required) {
    std::map<std::string, int> seen;
    for (const auto& line : reader.lines()) {
        const auto it = handlers.find(line.tok[0]);
        if (it == handlers.end()) fail(line, "unknown key '" + line.tok[0] + "'");
        it->second(line);
        ++seen[line.tok[0]];
    }
    for (const auto& key : required) {
        if (!seen.contains(key)) throw Error(ErrorCode::ParseError, "missing '" + key + "' line");
    }
}

void units_line(const Line& line) {
    expect_size(line, 2);
    if (line.tok[1] != "SI") fail(line, "unsupported units '" + line.tok[1] + "'");
}

template <typename T, typename Parse>
T load(const std::filesystem::path& path, Parse parse) {
    const std::string text = textio::read_file(path);
    try {
        return parse(text);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

} // namespace

// ---- scenario --------------------------------------------------------------

std::string serialize(const ScenarioFile& s) {
    const Scenario& sc = s.scenario;
    Writer w(kScenarioHeader);
    w.key("name").word(sc.name).end();
    w.key("medium").word(to_string(sc.medium)).end();
    w.key("c").num(sc.c).end();
    w.key("known_frequency").integer(sc.known_frequency).end();
    w.key("stationary").integer(sc.stationary).end();
    w.key("mu").opt(sc.mu).end();
    w.key("truth_position").vec(sc.truth.r).end();
    w.key("truth_velocity").vec(sc.truth.v).end();
    w.key("truth_frequency").num(sc.truth.f).end();
    for (const auto& rx : sc.receivers) {
        w.key("receiver").word(rx.label).word(rx.noise_class).vec(rx.r).vec(rx.v).end();
    }
    if (s.noise) {
        w.key("noise_seed").integer(static_cast<long long>(s.noise->rng_seed)).end();
        w.key("noise_sigma_f").num(s.noise->sigma_f).end();
        w.key("noise_default").num(s.noise->fallback.sigma_r).num(s.noise->fallback.sigma_v).end();
        for (const auto& [name, cls] : s.noise->classes) {
            w.key("noise_class").word(name).num(cls.sigma_r).num(cls.sigma_v).end();
        }
    }
    return w.str();
}

ScenarioFile parse_scenario(const std::string& text) {
    const Reader reader(text, kScenarioHeader);
    ScenarioFile out;
    Scenario& sc = out.scenario;
    auto noise = [&]() -> NoiseConfig& {
        if (!out.noise) out.noise = NoiseConfig{};
        return *out.noise;
    };
    std::map<std::string, Handler> h{
        {"units", units_line},
        {"name", [&](const Line& l) { expect_size(l, 2); sc.name = l.tok[1]; }},
        {"medium",
         [&](const Line& l) {
             expect_size(l, 2);
             try {
                 sc.medium = parse_medium(l.tok[1]);
             } catch (const Error& e) {
                 fail(l, e.detail());
             }
         }},
        {"c", [&](const Line& l) { expect_size(l, 2); sc.c = num_at(l, 1); }},
        {"known_frequency", [&](const Line& l) { expect_size(l, 2); sc.known_frequency = bool_at(l, 1); }},
        {"stationary", [&](const Line& l) { expect_size(l, 2); sc.stationary = bool_at(l, 1); }},
        {"mu", [&](const Line& l) { expect_size(l, 2); sc.mu = opt_at(l, 1); }},
        {"truth_position", [&](const Line& l) { expect_size(l, 4); sc.truth.r = vec_at(l, 1); }},
        {"truth_velocity", [&](const Line& l) { expect_size(l, 4); sc.truth.v = vec_at(l, 1); }},
        {"truth_frequency", [&](const Line& l) { expect_size(l, 2); sc.truth.f = num_at(l, 1); }},
        {"receiver",
         [&](const Line& l) {
             expect_size(l, 9);
             ScenarioReceiver rx;
             rx.label = l.tok[1];
             rx.noise_class = l.tok[2];
             rx.r = vec_at(l, 3);
             rx.v = vec_at(l, 6);
             sc.receivers.push_back(rx);
         }},
        {"noise_seed",
         [&](const Line& l) {
             expect_size(l, 2);
             noise().rng_seed = static_cast<std::uint64_t>(int_at(l, 1));
         }},
        {"noise_sigma_f", [&](const Line& l) { expect_size(l, 2); noise().sigma_f = num_at(l, 1); }},
        {"noise_default",
         [&](const Line& l) {
             expect_size(l, 3);
             noise().fallback = NoiseClass{num_at(l, 1), num_at(l, 2)};
         }},
        {"noise_class",
         [&](const Line& l) {
             expect_size(l, 4);
             noise().classes[l.tok[1]] = NoiseClass{num_at(l, 2), num_at(l, 3)};
         }},
    };
    dispatch(reader, h,
             {"units", "name", "medium", "c", "known_frequency", "stationary", "truth_position",
              "truth_velocity", "truth_frequency", "receiver"});
    return out;
}

// ---- measurements ----------------------------------------------------------

namespace {

void write_receiver(Writer& w, const char* key, const Receiver& rx) {
    w.key(key).vec(rx.r).vec(rx.v).num(rx.f).end();
}

Receiver receiver_at(const Line& l) {
    expect_size(l, 8);
    Receiver rx;
    rx.r = vec_at(l, 1);
    rx.v = vec_at(l, 4);
    rx.f = num_at(l, 7);
    return rx;
}

} // namespace

std::string serialize(const Measurements& m) {
    Writer w(kMeasurementsHeader);
    w.key("scenario").word(m.scenario.empty() ? "-" : m.scenario).end();
    w.key("family").word(m.family().name()).end();
    w.key("c").num(m.c).end();
    w.key("known_frequency").opt(m.known_frequency).end();
    w.key("stationary").integer(m.stationary).end();
    w.key("sigma_f").opt(m.sigma_f).end();
    for (const auto& rx : m.receivers) write_receiver(w, "receiver", rx);
    if (m.extra_receiver) write_receiver(w, "extra", *m.extra_receiver);
    return w.str();
}

Measurements parse_measurements(const std::string& text) {
    const Reader reader(text, kMeasurementsHeader);
    Measurements m;
    std::string family;
    std::map<std::string, Handler> h{
        {"units", units_line},
        {"scenario",
         [&](const Line& l) {
             expect_size(l, 2);
             m.scenario = l.tok[1] == "-" ? "" : l.tok[1];
         }},
        {"family", [&](const Line& l) { expect_size(l, 2); family = l.tok[1]; }},
        {"c", [&](const Line& l) { expect_size(l, 2); m.c = num_at(l, 1); }},
        {"known_frequency", [&](const Line& l) { expect_size(l, 2); m.known_frequency = opt_at(l, 1); }},
        {"stationary", [&](const Line& l) { expect_size(l, 2); m.stationary = bool_at(l, 1); }},
        {"sigma_f", [&](const Line& l) { expect_size(l, 2); m.sigma_f = opt_at(l, 1); }},
        {"receiver", [&](const Line& l) { m.receivers.push_back(receiver_at(l)); }},
        {"extra",
         [&](const Line& l) {
             if (m.extra_receiver) fail(l, "more than one extra receiver");
             m.extra_receiver = receiver_at(l);
         }},
    };
    dispatch(reader, h, {"units", "family", "c", "known_frequency", "stationary", "receiver"});
    if (family != m.family().name()) {
        throw Error(ErrorCode::ParseError, "family line '" + family +
                                               "' disagrees with the flags (" + m.family().name() + ")");
    }
    if (static_cast<int>(m.receivers.size()) != m.family().n_obs()) {
        throw Error(ErrorCode::ParseError, "family " + family + " needs " +
                                               std::to_string(m.family().n_obs()) +
                                               " receivers, file has " +
                                               std::to_string(m.receivers.size()));
    }
    return m;
}

// ---- solution --------------------------------------------------------------

Solution make_solution(const Measurements& m, const SolveResult& result) {
    Solution s;
    s.scenario = m.scenario;
    s.family = m.family().name();
    s.c = m.c;
    s.stats = result.stats;
    s.frame = result.frame;
    s.candidates = result.candidates;
    s.has_extra = m.extra_receiver.has_value();
    std::vector<Receiver> all = m.receivers;
    if (m.extra_receiver) all.push_back(*m.extra_receiver);
    for (const auto& cand : result.candidates) s.residuals.push_back(residual_report(cand.state, all, m.c));
    return s;
}

std::string serialize(const Solution& s) {
    Writer w(kSolutionHeader);
    w.key("scenario").word(s.scenario.empty() ? "-" : s.scenario).end();
    w.key("family").word(s.family).end();
    w.key("c").num(s.c).end();
    w.key("frame").num(s.frame.length).num(s.frame.speed).num(s.frame.frequency)
        .num(s.frame.epsilon).end();
    const SolveStats& st = s.stats;
    w.key("paths").integer(st.paths_tracked).integer(st.passes).integer(st.succeeded)
        .integer(st.distinct).integer(st.expected).end();
    w.key("filter").integer(st.real).integer(st.positive).integer(st.consistent)
        .integer(st.candidates).end();
    w.key("has_extra").integer(s.has_extra).end();
    for (std::size_t k = 0; k < s.candidates.size(); ++k) {
        const Candidate& c = s.candidates[k];
        w.key("candidate").integer(static_cast<long long>(k + 1)).vec(c.state.r).vec(c.state.v)
            .num(c.state.f).num(c.squared_residual).num(c.max_unsquared_residual)
            .opt(c.extra_residual).end();
        if (k < s.residuals.size()) {
            for (std::size_t i = 0; i < s.residuals[k].size(); ++i) {
                const ResidualRow& row = s.residuals[k][i];
                w.key("residual").integer(static_cast<long long>(k + 1))
                    .integer(static_cast<long long>(i + 1)).num(row.range).num(row.range_rate)
                    .num(row.predicted_frequency).num(row.measured_frequency).num(row.unsquared)
                    .word(row.error.value_or("-")).end();
            }
        }
    }
    return w.str();
}

Solution parse_solution(const std::string& text) {
    const Reader reader(text, kSolutionHeader);
    Solution s;
    std::map<std::string, Handler> h{
        {"units", units_line},
        {"scenario",
         [&](const Line& l) {
             expect_size(l, 2);
             s.scenario = l.tok[1] == "-" ? "" : l.tok[1];
         }},
        {"family", [&](const Line& l) { expect_size(l, 2); s.family = l.tok[1]; }},
        {"c", [&](const Line& l) { expect_size(l, 2); s.c = num_at(l, 1); }},
        {"frame",
         [&](const Line& l) {
             expect_size(l, 5);
             s.frame = OffsetFrame{num_at(l, 1), num_at(l, 2), num_at(l, 3), num_at(l, 4)};
         }},
        {"paths",
         [&](const Line& l) {
             expect_size(l, 6);
             s.stats.paths_tracked = static_cast<int>(int_at(l, 1));
             s.stats.passes = static_cast<int>(int_at(l, 2));
             s.stats.succeeded = static_cast<int>(int_at(l, 3));
             s.stats.distinct = static_cast<int>(int_at(l, 4));
             s.stats.expected = static_cast<int>(int_at(l, 5));
         }},
        {"filter",
         [&](const Line& l) {
             expect_size(l, 5);
             s.stats.real = static_cast<int>(int_at(l, 1));
             s.stats.positive = static_cast<int>(int_at(l, 2));
             s.stats.consistent = static_cast<int>(int_at(l, 3));
             s.stats.candidates = static_cast<int>(int_at(l, 4));
         }},
        {"has_extra", [&](const Line& l) { expect_size(l, 2); s.has_extra = bool_at(l, 1); }},
        {"candidate",
         [&](const Line& l) {
             expect_size(l, 12);
             if (int_at(l, 1) != static_cast<long long>(s.candidates.size() + 1)) {
                 fail(l, "candidates out of order");
             }
             Candidate c;
             c.state.r = vec_at(l, 2);
             c.state.v = vec_at(l, 5);
             c.state.f = num_at(l, 8);
             c.squared_residual = num_at(l, 9);
             c.max_unsquared_residual = num_at(l, 10);
             c.extra_residual = opt_at(l, 11);
             s.candidates.push_back(c);
             s.residuals.emplace_back();
         }},
        {"residual",
         [&](const Line& l) {
             expect_size(l, 9);
             if (int_at(l, 1) != static_cast<long long>(s.candidates.size())) {
                 fail(l, "residual row does not follow its candidate");
             }
             ResidualRow row;
             row.range = num_at(l, 3);
             row.range_rate = num_at(l, 4);
             row.predicted_frequency = num_at(l, 5);
             row.measured_frequency = num_at(l, 6);
             row.unsquared = num_at(l, 7);
             if (l.tok[8] != "-") row.error = l.tok[8];
             s.residuals.back().push_back(row);
         }},
    };
    dispatch(reader, h, {"units", "family", "c", "frame", "paths", "filter"});
    return s;
}

// ---- Monte Carlo report ----------------------------------------------------

std::string serialize(const MonteCarloReport& r) {
    Writer w(kReportHeader);
    w.key("angles").word("degrees").end();
    w.key("scenario").word(r.scenario.empty() ? "-" : r.scenario).end();
    w.key("family").word(r.family).end();
    w.key("seed").integer(static_cast<long long>(r.seed)).end();
    w.key("trials").integer(r.trials).end();
    w.key("successes").integer(r.successes).end();
    w.key("failures").integer(r.failures).end();
    w.key("columns").word("trial").word("status").word("candidates").word("dx").word("dy")
        .word("dz").word("dvx").word("dvy").word("dvz").word("df");
    for (const char* name : kElementNames) w.word(std::string("d") + name);
    w.end();
    for (const auto& rec : r.records) {
        w.key("trial").integer(rec.trial).word(rec.success ? "ok" : rec.failure)
            .integer(rec.candidates).vec(rec.position_error).vec(rec.velocity_error)
            .num(rec.frequency_error);
        for (std::size_t k = 0; k < 6; ++k) {
            if (rec.element_errors) {
                w.num((*rec.element_errors)[k]);
            } else {
                w.word("-");
            }
        }
        w.end();
    }
    for (const auto& row : r.summary) w.key("summary").word(row.quantity).num(row.median).num(row.p95).end();
    return w.str();
}

MonteCarloReport parse_report(const std::string& text) {
    const Reader reader(text, kReportHeader);
    MonteCarloReport r;
    int trials = -1, successes = -1, failures = -1;
    std::vector<SummaryRow> summary;
    std::map<std::string, Handler> h{
        {"units", units_line},
        {"angles",
         [&](const Line& l) {
             expect_size(l, 2);
             if (l.tok[1] != "degrees") fail(l, "angles must be in degrees");
         }},
        {"scenario",
         [&](const Line& l) {
             expect_size(l, 2);
             r.scenario = l.tok[1] == "-" ? "" : l.tok[1];
         }},
        {"family", [&](const Line& l) { expect_size(l, 2); r.family = l.tok[1]; }},
        {"seed", [&](const Line& l) { expect_size(l, 2); r.seed = static_cast<std::uint64_t>(int_at(l, 1)); }},
        {"trials", [&](const Line& l) { expect_size(l, 2); trials = static_cast<int>(int_at(l, 1)); }},
        {"successes", [&](const Line& l) { expect_size(l, 2); successes = static_cast<int>(int_at(l, 1)); }},
        {"failures", [&](const Line& l) { expect_size(l, 2); failures = static_cast<int>(int_at(l, 1)); }},
        {"columns", [&](const Line& l) { expect_size(l, 17); }},
        {"trial",
         [&](const Line& l) {
             expect_size(l, 17);
             TrialRecord rec;
             rec.trial = static_cast<int>(int_at(l, 1));
             rec.success = l.tok[2] == "ok";
             if (!rec.success) rec.failure = l.tok[2];
             rec.candidates = static_cast<int>(int_at(l, 3));
             rec.position_error = vec_at(l, 4);
             rec.velocity_error = vec_at(l, 7);
             rec.frequency_error = num_at(l, 10);
             if (l.tok[11] != "-") {
                 std::array<double, 6> el{};
                 for (std::size_t k = 0; k < 6; ++k) el[k] = num_at(l, 11 + k);
                 rec.element_errors = el;
             }
             r.records.push_back(rec);
         }},
        {"summary",
         [&](const Line& l) {
             expect_size(l, 4);
             summary.push_back(SummaryRow{l.tok[1], num_at(l, 2), num_at(l, 3)});
         }},
    };
    dispatch(reader, h, {"units", "family", "seed", "trials", "successes", "failures"});
    summarize(r);
    if (trials != r.trials || successes != r.successes || failures != r.failures) {
        throw Error(ErrorCode::ParseError, "trial counts disagree with the trial rows");
    }
    // The stored summary is authoritative for display; it must match the rows.
    r.summary = summary;
    return r;
}

std::string report_long_csv(const MonteCarloReport& r) {
    std::string out = "quantity,trial,error\n";
    auto row = [&](const std::string& q, int trial, double err) {
        out += q + "," + std::to_string(trial) + "," + format_double(err) + "\n";
    };
    static constexpr const char* kPos[3] = {"dx", "dy", "dz"};
    static constexpr const char* kVel[3] = {"dvx", "dvy", "dvz"};
    for (const auto& rec : r.records) {
        if (!rec.success) continue;
        for (int k = 0; k < 3; ++k) row(kPos[k], rec.trial, rec.position_error(k));
        for (int k = 0; k < 3; ++k) row(kVel[k], rec.trial, rec.velocity_error(k));
        row("df", rec.trial, rec.frequency_error);
        if (rec.element_errors) {
            for (std::size_t k = 0; k < 6; ++k) {
                row(std::string("d") + kElementNames[k], rec.trial, (*rec.element_errors)[k]);
            }
        }
    }
    return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    return load<ScenarioFile>(path, parse_scenario);
}
Measurements load_measurements(const std::filesystem::path& path) {
    return load<Measurements>(path, parse_measurements);
}
Solution load_solution(const std::filesystem::path& path) {
    return load<Solution>(path, parse_solution);
}
MonteCarloReport load_report(const std::filesystem::path& path) {
    return load<MonteCarloReport>(path, parse_report);
}

} // namespace doppler::io
