#include "doppler/filter.hpp"

#include "doppler/errors.hpp"
#include "doppler/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace doppler {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double max_imag(const ComplexVec& x) {
    double m = 0.0;
    for (int k = 0; k < x.size(); ++k) m = std::max(m, std::abs(x(k).imag()));
    return m;
}

bool same_state(const TransmitterState& a, const TransmitterState& b, double tol) {
    const double scale =
        std::max({1.0, a.r.cwiseAbs().maxCoeff(), a.v.cwiseAbs().maxCoeff(), std::abs(a.f)});
    const double diff = std::max({(a.r - b.r).cwiseAbs().maxCoeff(),
                                  (a.v - b.v).cwiseAbs().maxCoeff(), std::abs(a.f - b.f)});
    return diff <= tol * scale;
}

} // namespace

void FilterConfig::validate() const {
    if (!(realness_tol > 0.0) || !(unsquared_tol > 0.0) || !(merge_tol > 0.0) || !(extra_sigmas > 0.0) ||
        (noise_sigma_f && !(*noise_sigma_f >= 0.0))) {
        throw Error(ErrorCode::InvalidArgument, "filter tolerances must be positive");
    }
}

double effective_unsquared_tol(const FilterConfig& cfg, const DopplerSystem& sys,
                               const ParamVec& params, const ComplexVec& x) {
    if (!cfg.noise_sigma_f) return cfg.unsquared_tol;
    const double weight = std::abs(sys.frequency_weight(params, x));
    if (!(weight > 0.0)) return cfg.unsquared_tol;
    std::vector<double> rho;
    for (int i = 0; i < sys.n_obs(); ++i) {
        double a = 0.0;
        for (int k = 0; k < 3; ++k) a += std::norm(params(sys.position_index(i, k)) - x(k));
        rho.push_back(std::sqrt(a));
    }
    const double c = std::abs(params(sys.speed_index()));
    return std::max(cfg.unsquared_tol, 3.0 * *cfg.noise_sigma_f * c * median_of(rho) / weight);
}

double extra_receiver_tol(const FilterConfig& cfg, const DopplerSystem& sys,
                          const ParamVec& params, const ComplexVec& x) {
    if (!cfg.noise_sigma_f || !cfg.extra_receiver) return cfg.unsquared_tol;
    const Receiver& rx = *cfg.extra_receiver;
    // Linearised spread of the extra residual: the receiver's own noise plus
    // the noise carried into x through the squared equations.
    const double own = std::abs(sys.unsquared_frequency_derivative_at(params, x, rx));
    double carried = 0.0;
    try {
        const ComplexMat jac = sys.jacobian_unknowns(params, x);
        const ComplexVec y =
            solve_linear(jac.transpose(), sys.unsquared_gradient_at(params, x, rx));
        const ParamMat jp = sys.jacobian_parameters(params, x);
        for (int i = 0; i < sys.n_obs(); ++i) {
            carried += std::norm(y(i) * jp(i, sys.frequency_index(i)));
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
        return std::numeric_limits<double>::infinity();
    }
    const double spread = *cfg.noise_sigma_f * std::sqrt(own * own + carried);
    return std::max(cfg.unsquared_tol, cfg.extra_sigmas * spread);
}

std::vector<Candidate> filter_candidates(const std::vector<PathResult>& endpoints,
                                         const DopplerSystem& sys, const ParamVec& params,
                                         const FilterConfig& cfg, FilterStats* stats) {
    cfg.validate();
    FilterStats local;
    FilterStats& st = stats ? *stats : local;
    st = FilterStats{};
    st.endpoints = static_cast<int>(endpoints.size());

    std::vector<Candidate> out;
    for (const auto& path : endpoints) {
        if (path.status != PathStatus::Success) continue;
        ++st.succeeded;
        if (max_imag(path.endpoint) > cfg.realness_tol) continue;

        // Project onto the reals and polish there; complex roots with small
        // imaginary parts do not converge to a real point.
        ComplexVec x = path.endpoint.real().cast<cplx>();
        if (!newton_polish(sys, params, x) || max_imag(x) > 0.0) continue;
        ++st.real;

        if (cfg.require_positive_frequency && !(sys.frequency_weight(params, x).real() > 0.0)) {
            continue;
        }
        ++st.positive;

        const double tol = effective_unsquared_tol(cfg, sys, params, x);
        const ComplexVec unsquared = sys.unsquared_residuals(params, x);
        const double worst = unsquared.cwiseAbs().maxCoeff();
        if (!(worst <= tol)) continue;
        ++st.consistent;

        Candidate cand;
        cand.state = to_state(x, sys);
        cand.squared_residual = sys.relative_residual(params, x);
        cand.max_unsquared_residual = worst;
        if (cfg.extra_receiver) {
            const double extra = std::abs(sys.unsquared_residual_at(params, x, *cfg.extra_receiver));
            if (!(extra <= extra_receiver_tol(cfg, sys, params, x))) continue;
            cand.extra_residual = extra;
        }
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Candidate& o) {
            return same_state(o.state, cand.state, cfg.merge_tol);
        });
        if (!duplicate) out.push_back(cand);
    }

    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        const double ea = a.extra_residual.value_or(0.0);
        const double eb = b.extra_residual.value_or(0.0);
        if (ea != eb) return ea < eb;
        return a.squared_residual < b.squared_residual;
    });
    st.candidates = static_cast<int>(out.size());
    if (out.empty()) {
        throw Error(ErrorCode::NoCandidates,
                    "no physical candidate among " + std::to_string(st.endpoints) + " endpoints (" +
                        std::to_string(st.succeeded) + " succeeded, " + std::to_string(st.real) +
                        " real, " + std::to_string(st.consistent) + " sign-consistent)");
    }
    return out;
}

std::vector<ResidualRow> residual_report(const TransmitterState& candidate,
                                         const std::vector<Receiver>& receivers, double c) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<ResidualRow> rows;
    rows.reserve(receivers.size());
    for (const auto& rx : receivers) {
        ResidualRow row;
        row.measured_frequency = rx.f;
        try {
            row.range = range(candidate, rx.r);
            row.range_rate = range_rate(candidate, rx.r, rx.v);
            row.predicted_frequency = predict_frequency(candidate, rx.r, rx.v, c);
            row.unsquared = unsquared_residual(candidate, rx, c);
        } catch (const Error& e) {
            row.range = row.range_rate = row.predicted_frequency = row.unsquared = nan;
            row.error = to_string(e.code());
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace doppler
