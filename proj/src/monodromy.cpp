#include "doppler/monodromy.hpp"

#include "doppler/errors.hpp"
#include "doppler/textio.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace doppler {

namespace {

cplx random_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

cplx random_gamma(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    return std::polar(1.0, angle(rng));
}

double max_abs(const ComplexVec& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

} // namespace

int expected_root_count(const Family& family) {
    if (family.stationary) return family.known_frequency ? 48 : 296;
    return family.known_frequency ? 128 : 672;
}

ParamVec random_parameters(const Family& family, std::mt19937_64& rng) {
    const DopplerSystem sys(family);
    ParamVec p(sys.num_parameters());
    for (int j = 0; j < p.size(); ++j) p(j) = random_complex(rng);
    if (family.stationary) {
        for (int i = 0; i < sys.n_obs(); ++i) {
            for (int k = 0; k < 3; ++k) p(sys.velocity_index(i, k)) = 0.0;
        }
    }
    return p;
}

SeedPair seed_instance(const Family& family, std::mt19937_64& rng) {
    const DopplerSystem sys(family);
    std::bernoulli_distribution coin(0.5);
    for (int attempt = 0; attempt < 100; ++attempt) {
        SeedPair seed;
        seed.params = random_parameters(family, rng);
        seed.solution.resize(sys.num_unknowns());
        for (int k = 0; k < sys.num_unknowns(); ++k) seed.solution(k) = random_complex(rng);

        const cplx f = sys.frequency_of(seed.solution);
        const cplx c = seed.params(sys.speed_index());
        bool degenerate = std::abs(c) < 1e-3 || std::abs(f) < 1e-3;
        for (int i = 0; i < sys.n_obs() && !degenerate; ++i) {
            cplx a = 0.0;
            cplx b = 0.0;
            for (int k = 0; k < 3; ++k) {
                const cplx d = seed.params(sys.position_index(i, k)) - seed.solution(k);
                const cplx w = seed.params(sys.velocity_index(i, k)) - seed.solution(3 + k);
                a += d * d;
                b += d * w;
            }
            if (std::abs(a) < 1e-3) {
                degenerate = true;
                break;
            }
            // c^2 (f - f_i)^2 a = f^2 b^2  =>  f_i = f (1 -+ b / (c sqrt(a)))
            const cplx shift = f * b / (c * std::sqrt(a));
            seed.params(sys.frequency_index(i)) = coin(rng) ? f - shift : f + shift;
        }
        if (!degenerate) return seed;
    }
    throw Error(ErrorCode::DegenerateDraw, "no usable seed instance after 100 draws");
}

ComplexVec velocity_mate(const ComplexVec& x) {
    ComplexVec out = x;
    out.segment(3, 3) = -out.segment(3, 3);
    return out;
}

int find_solution(const std::vector<ComplexVec>& set, const ComplexVec& x, double tol) {
    const double scale = std::max(1.0, max_abs(x));
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (max_abs(set[i] - x) <= tol * scale) return static_cast<int>(i);
    }
    return -1;
}

StartPack populate(const Family& family, const SeedPair& seed, const TrackerConfig& tracker,
                   std::mt19937_64& rng, const MonodromyConfig& cfg, MonodromyStats* stats) {
    const DopplerSystem sys(family);
    if (seed.params.size() != sys.num_parameters() || seed.solution.size() != sys.num_unknowns() ||
        !(sys.relative_residual(seed.params, seed.solution) <= cfg.residual_tol)) {
        throw Error(ErrorCode::BadStartSolution, "seed pair is not a solution");
    }
    // Negative when no expected count applies.
    const int expected =
        cfg.enforce_expected ? cfg.expected_count.value_or(expected_root_count(family)) : -1;

    MonodromyStats local;
    MonodromyStats& st = stats ? *stats : local;
    st = MonodromyStats{};

    std::vector<ComplexVec> solutions{seed.solution};
    int unchanged = 0;
    const ParamVec& base = seed.params;

    while (true) {
        if (st.loops >= cfg.max_loops) {
            throw Error(ErrorCode::NoProgress,
                        "monodromy did not stabilise within " + std::to_string(cfg.max_loops) +
                            " loops (" + std::to_string(solutions.size()) + " solutions)");
        }
        ++st.loops;
        const ParamVec p1 = random_parameters(family, rng);
        const ParamVec p2 = random_parameters(family, rng);
        const ParamVec* nodes[4] = {&base, &p1, &p2, &base};

        std::vector<ComplexVec> current = solutions;
        for (int edge = 0; edge < 3 && !current.empty(); ++edge) {
            TrackerConfig edge_cfg = tracker;
            edge_cfg.gamma = random_gamma(rng);
            const auto results = track_all(sys, *nodes[edge], *nodes[edge + 1], current, edge_cfg);
            st.paths_tracked += static_cast<long>(results.size());
            current.clear();
            for (const auto& r : results) {
                if (r.status == PathStatus::Success) {
                    current.push_back(r.endpoint);
                } else {
                    ++st.failed_paths;
                    if (r.status == PathStatus::SingularJacobian && r.t_reached == 1.0) {
                        ++st.singular_endpoints;
                    }
                }
            }
        }

        const std::size_t before = solutions.size();
        for (ComplexVec& x : current) {
            if (!newton_polish(sys, base, x)) continue;
            if (!(sys.relative_residual(base, x) <= cfg.residual_tol)) continue;
            if (find_solution(solutions, x, cfg.dedup_tol) < 0) solutions.push_back(x);
        }
        st.count_history.push_back(static_cast<int>(solutions.size()));

        if (solutions.size() == before) {
            ++unchanged;
        } else {
            unchanged = 0;
        }
        const int count = static_cast<int>(solutions.size());
        if (unchanged >= cfg.stabilization_rounds && count >= expected) break;
        if (count < expected && unchanged >= cfg.no_progress_loops) {
            throw Error(ErrorCode::NoProgress,
                        "stuck at " + std::to_string(count) + " of " + std::to_string(expected) +
                            " solutions");
        }
    }

    StartPack pack;
    pack.family = family;
    pack.start_params = base;
    pack.solutions = std::move(solutions);
    return pack;
}

StartPack halve_by_symmetry(const StartPack& pack, double tol) {
    if (!pack.family.stationary) {
        throw Error(ErrorCode::NotSymmetric, "velocity negation is a symmetry only for stationary "
                                             "receivers");
    }
    if (pack.halved) return pack;
    const auto& sols = pack.solutions;
    std::vector<bool> used(sols.size(), false);
    StartPack out = pack;
    out.solutions.clear();
    out.halved = true;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const ComplexVec mate = velocity_mate(sols[i]);
        const double scale = std::max(1.0, max_abs(sols[i]));
        // Fixed points (v = 0) are their own mate.
        if (max_abs(mate - sols[i]) <= tol * scale) {
            out.solutions.push_back(sols[i]);
            continue;
        }
        int found = -1;
        for (std::size_t j = i + 1; j < sols.size(); ++j) {
            if (!used[j] && max_abs(sols[j] - mate) <= tol * scale) {
                found = static_cast<int>(j);
                break;
            }
        }
        if (found < 0) {
            throw Error(ErrorCode::NotSymmetric,
                        "solution " + std::to_string(i) + " has no velocity-negated mate");
        }
        used[static_cast<std::size_t>(found)] = true;
        out.solutions.push_back(sols[i]);
    }
    return out;
}

namespace {

constexpr const char* kPackHeader = "DOPPLER-STARTPACK 1";

void append_complex(std::string& out, cplx z) {
    out += ' ';
    out += textio::format_double(z.real());
    out += ' ';
    out += textio::format_double(z.imag());
}

} // namespace

void save_pack(const StartPack& pack, const std::filesystem::path& path) {
    std::string body;
    body += kPackHeader;
    body += "\nunits scaled\n";
    body += "family " + pack.family.name() + "\n";
    body += "known_frequency " + std::to_string(pack.family.known_frequency ? 1 : 0) + "\n";
    body += "stationary " + std::to_string(pack.family.stationary ? 1 : 0) + "\n";
    body += "halved " + std::to_string(pack.halved ? 1 : 0) + "\n";
    body += "rng_seed " + std::to_string(pack.rng_seed) + "\n";
    body += "n_params " + std::to_string(pack.start_params.size()) + "\n";
    body += "root_count " + std::to_string(pack.root_count()) + "\n";
    for (int j = 0; j < pack.start_params.size(); ++j) {
        body += "param";
        append_complex(body, pack.start_params(j));
        body += '\n';
    }
    for (const auto& x : pack.solutions) {
        body += "solution";
        for (int k = 0; k < x.size(); ++k) append_complex(body, x(k));
        body += '\n';
    }
    textio::write_file(path, textio::seal(std::move(body)));
}

StartPack load_pack(const std::filesystem::path& path, std::optional<Family> expected) {
    const std::string raw = textio::read_file(path);
    std::string body;
    try {
        body = textio::unseal(raw, ErrorCode::CorruptPack);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
    std::istringstream in(body);
    std::string line;
    if (!std::getline(in, line) || line != kPackHeader) {
        throw Error(ErrorCode::CorruptPack, "unrecognised pack header in " + path.string());
    }
    StartPack pack;
    long long n_params = -1;
    long long root_count = -1;
    std::vector<cplx> params;
    try {
        while (std::getline(in, line)) {
            const auto tok = textio::split_ws(line);
            if (tok.empty()) continue;
            const std::string& key = tok[0];
            if (key == "units" || key == "family") continue;
            if (key == "param" || key == "solution") {
                if (tok.size() % 2 == 0) throw Error(ErrorCode::CorruptPack, "odd number of reals");
                std::vector<cplx> values;
                for (std::size_t j = 1; j + 1 < tok.size(); j += 2) {
                    values.emplace_back(textio::parse_double(tok[j]),
                                        textio::parse_double(tok[j + 1]));
                }
                if (key == "param") {
                    params.insert(params.end(), values.begin(), values.end());
                } else {
                    if (static_cast<int>(values.size()) != pack.family.num_unknowns()) {
                        throw Error(ErrorCode::CorruptPack, "solution has wrong length");
                    }
                    ComplexVec x(static_cast<int>(values.size()));
                    for (std::size_t k = 0; k < values.size(); ++k) x(static_cast<int>(k)) = values[k];
                    pack.solutions.push_back(x);
                }
                continue;
            }
            if (tok.size() != 2) throw Error(ErrorCode::CorruptPack, "malformed line: " + line);
            const long long value = textio::parse_int(tok[1]);
            if (key == "known_frequency") pack.family.known_frequency = value != 0;
            else if (key == "stationary") pack.family.stationary = value != 0;
            else if (key == "halved") pack.halved = value != 0;
            else if (key == "rng_seed") pack.rng_seed = static_cast<std::uint64_t>(value);
            else if (key == "n_params") n_params = value;
            else if (key == "root_count") root_count = value;
            else throw Error(ErrorCode::CorruptPack, "unknown key: " + key);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) {
            throw Error(ErrorCode::CorruptPack, path.string() + ": " + e.detail());
        }
        throw;
    }
    if (n_params != pack.family.num_parameters() ||
        static_cast<long long>(params.size()) != n_params ||
        root_count != static_cast<long long>(pack.solutions.size())) {
        throw Error(ErrorCode::CorruptPack, "pack sizes are inconsistent in " + path.string());
    }
    pack.start_params = Eigen::Map<const ParamVec>(params.data(), static_cast<Eigen::Index>(params.size()));
    if (expected && !(*expected == pack.family)) {
        throw Error(ErrorCode::FamilyMismatch, "pack is for " + pack.family.name() + ", needed " +
                                                   expected->name());
    }
    return pack;
}

} // namespace doppler
