#include "doppler/model.hpp"

#include "doppler/errors.hpp"

#include <algorithm>
#include <cmath>

namespace doppler {

namespace {

// Quantities shared by the residual and its derivatives for receiver i.
struct Terms {
    cplx d[3];  // r_i - r
    cplx w[3];  // v_i - v
    cplx a;     // d.d
    cplx b;     // d.w
    cplx df;    // f - f_i
    cplx f;
    cplx g;     // frequency weight: f, or 1 + lambda phi
    cplx dg;    // d g / d f
    cplx c;
};

Terms terms_for(const DopplerSystem& sys, const ParamVec& p, const ComplexVec& x, int i) {
    Terms t;
    t.a = 0.0;
    t.b = 0.0;
    for (int k = 0; k < 3; ++k) {
        t.d[k] = p(sys.position_index(i, k)) - x(k);
        t.w[k] = p(sys.velocity_index(i, k)) - x(3 + k);
        t.a += t.d[k] * t.d[k];
        t.b += t.d[k] * t.w[k];
    }
    t.f = sys.frequency_of(x);
    t.df = t.f - p(sys.frequency_index(i));
    t.c = p(sys.speed_index());
    if (sys.offset_form()) {
        t.dg = p(sys.lambda_index());
        t.g = 1.0 + t.dg * t.f;
    } else {
        t.g = t.f;
        t.dg = 1.0;
    }
    return t;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        const double lower =
            *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

} // namespace

std::string Family::name() const {
    return std::string(stationary ? "stationary" : "moving") + "-" +
           (known_frequency ? "known-f" : "unknown-f");
}

DopplerSystem::DopplerSystem(Family family, double fixed_frequency, bool offset_form)
    : family_(family), n_obs_(family.n_obs()), fixed_frequency_(fixed_frequency),
      offset_form_(offset_form) {
    if (offset_form && family.known_frequency) {
        throw Error(ErrorCode::InvalidArgument, "offset form needs an unknown frequency");
    }
}

void DopplerSystem::check_dimensions(const ParamVec& p, const ComplexVec& x) const {
    if (p.size() != num_parameters()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(num_parameters()) + " parameters, got " +
                        std::to_string(p.size()));
    }
    if (x.size() != num_unknowns()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(num_unknowns()) + " unknowns, got " +
                        std::to_string(x.size()));
    }
}

ComplexVec DopplerSystem::evaluate(const ParamVec& p, const ComplexVec& x) const {
    check_dimensions(p, x);
    ComplexVec out(n_obs_);
    for (int i = 0; i < n_obs_; ++i) {
        const Terms t = terms_for(*this, p, x, i);
        out(i) = t.c * t.c * t.df * t.df * t.a - t.g * t.g * t.b * t.b;
    }
    return out;
}

ComplexMat DopplerSystem::jacobian_unknowns(const ParamVec& p, const ComplexVec& x) const {
    ComplexVec value;
    ComplexMat jac;
    evaluate_with_jacobian(p, x, value, jac);
    return jac;
}

void DopplerSystem::evaluate_with_jacobian(const ParamVec& p, const ComplexVec& x,
                                           ComplexVec& value, ComplexMat& jac) const {
    check_dimensions(p, x);
    const int n = num_unknowns();
    value.resize(n_obs_);
    jac.resize(n_obs_, n);
    for (int i = 0; i < n_obs_; ++i) {
        const Terms t = terms_for(*this, p, x, i);
        const cplx c2df2 = t.c * t.c * t.df * t.df;
        const cplx f2 = t.g * t.g;
        value(i) = c2df2 * t.a - f2 * t.b * t.b;
        for (int k = 0; k < 3; ++k) {
            jac(i, k) = -2.0 * c2df2 * t.d[k] + 2.0 * f2 * t.b * t.w[k];
            jac(i, 3 + k) = 2.0 * f2 * t.b * t.d[k];
        }
        if (!family_.known_frequency) {
            jac(i, 6) = 2.0 * t.c * t.c * t.df * t.a - 2.0 * t.g * t.dg * t.b * t.b;
        }
    }
}

void DopplerSystem::tangent_system(const ParamVec& p, const ComplexVec& x, const ParamVec& dp,
                                   ComplexMat& jac, ComplexVec& rhs) const {
    check_dimensions(p, x);
    const int n = num_unknowns();
    jac.resize(n_obs_, n);
    rhs.resize(n_obs_);
    const cplx dc = dp(speed_index());
    for (int i = 0; i < n_obs_; ++i) {
        const Terms t = terms_for(*this, p, x, i);
        const cplx c2df2 = t.c * t.c * t.df * t.df;
        const cplx f2 = t.g * t.g;
        const cplx f2b = f2 * t.b;
        cplx s = 0.0;
        for (int k = 0; k < 3; ++k) {
            const cplx dr = -2.0 * c2df2 * t.d[k] + 2.0 * f2b * t.w[k];
            const cplx dv = 2.0 * f2b * t.d[k];
            jac(i, k) = dr;
            jac(i, 3 + k) = dv;
            // Receiver derivatives are the negatives of the transmitter ones.
            s -= dr * dp(position_index(i, k)) + dv * dp(velocity_index(i, k));
        }
        if (!family_.known_frequency) {
            jac(i, 6) = 2.0 * t.c * t.c * t.df * t.a - 2.0 * t.g * t.dg * t.b * t.b;
        }
        s += -2.0 * t.c * t.c * t.df * t.a * dp(frequency_index(i));
        s += 2.0 * t.c * t.df * t.df * t.a * dc;
        if (offset_form_) s += -2.0 * t.g * t.f * t.b * t.b * dp(lambda_index());
        rhs(i) = s;
    }
}

ParamMat DopplerSystem::jacobian_parameters(const ParamVec& p, const ComplexVec& x) const {
    check_dimensions(p, x);
    ParamMat jac = ParamMat::Zero(n_obs_, num_parameters());
    for (int i = 0; i < n_obs_; ++i) {
        const Terms t = terms_for(*this, p, x, i);
        const cplx c2df2 = t.c * t.c * t.df * t.df;
        const cplx f2 = t.g * t.g;
        for (int k = 0; k < 3; ++k) {
            jac(i, position_index(i, k)) = 2.0 * c2df2 * t.d[k] - 2.0 * f2 * t.b * t.w[k];
            jac(i, velocity_index(i, k)) = -2.0 * f2 * t.b * t.d[k];
        }
        jac(i, frequency_index(i)) = -2.0 * t.c * t.c * t.df * t.a;
        jac(i, speed_index()) = 2.0 * t.c * t.df * t.df * t.a;
        if (offset_form_) jac(i, lambda_index()) = -2.0 * t.g * t.f * t.b * t.b;
    }
    return jac;
}

ComplexVec DopplerSystem::parameter_derivative(const ParamVec& p, const ComplexVec& x,
                                               const ParamVec& dp) const {
    check_dimensions(p, x);
    if (dp.size() != p.size()) {
        throw Error(ErrorCode::DimensionMismatch, "parameter direction has wrong length");
    }
    ComplexVec out(n_obs_);
    const cplx dc = dp(speed_index());
    for (int i = 0; i < n_obs_; ++i) {
        const Terms t = terms_for(*this, p, x, i);
        const cplx c2df2 = t.c * t.c * t.df * t.df;
        const cplx f2 = t.g * t.g;
        cplx s = 0.0;
        for (int k = 0; k < 3; ++k) {
            s += (2.0 * c2df2 * t.d[k] - 2.0 * f2 * t.b * t.w[k]) * dp(position_index(i, k));
            s += (-2.0 * f2 * t.b * t.d[k]) * dp(velocity_index(i, k));
        }
        s += -2.0 * t.c * t.c * t.df * t.a * dp(frequency_index(i));
        s += 2.0 * t.c * t.df * t.df * t.a * dc;
        if (offset_form_) s += -2.0 * t.g * t.f * t.b * t.b * dp(lambda_index());
        out(i) = s;
    }
    return out;
}

double DopplerSystem::relative_residual(const ParamVec& p, const ComplexVec& x) const {
    check_dimensions(p, x);
    double worst = 0.0;
    for (int i = 0; i < n_obs_; ++i) {
        const Terms t = terms_for(*this, p, x, i);
        double a_abs = 0.0;
        double b_abs = 0.0;
        for (int k = 0; k < 3; ++k) {
            a_abs += std::norm(t.d[k]);
            b_abs += std::abs(t.d[k]) * std::abs(t.w[k]);
        }
        const double scale =
            std::norm(t.c) * std::norm(t.df) * a_abs + std::norm(t.g) * b_abs * b_abs;
        const double value = std::abs(t.c * t.c * t.df * t.df * t.a - t.g * t.g * t.b * t.b);
        if (value == 0.0) continue;
        worst = std::max(worst, scale > 0.0 ? value / scale : value);
    }
    return worst;
}

ComplexVec DopplerSystem::unsquared_residuals(const ParamVec& p, const ComplexVec& x) const {
    check_dimensions(p, x);
    ComplexVec out(n_obs_);
    for (int i = 0; i < n_obs_; ++i) {
        const Terms t = terms_for(*this, p, x, i);
        out(i) = std::sqrt(t.a) * t.c * t.df / t.g - t.b;
    }
    return out;
}

cplx DopplerSystem::unsquared_residual_at(const ParamVec& p, const ComplexVec& x,
                                          const Receiver& rx) const {
    check_dimensions(p, x);
    cplx a = 0.0;
    cplx b = 0.0;
    for (int k = 0; k < 3; ++k) {
        const cplx d = rx.r(k) - x(k);
        a += d * d;
        b += d * (rx.v(k) - x(3 + k));
    }
    const cplx f = frequency_of(x);
    return std::sqrt(a) * p(speed_index()) * (f - rx.f) / frequency_weight(p, x) - b;
}

ComplexVec DopplerSystem::unsquared_gradient_at(const ParamVec& p, const ComplexVec& x,
                                               const Receiver& rx) const {
    check_dimensions(p, x);
    cplx d[3];
    cplx a = 0.0;
    for (int k = 0; k < 3; ++k) {
        d[k] = rx.r(k) - x(k);
        a += d[k] * d[k];
    }
    const cplx rho = std::sqrt(a);
    const cplx c = p(speed_index());
    const cplx f = frequency_of(x);
    const cplx g = frequency_weight(p, x);
    const cplx q = c * (f - rx.f) / g;
    ComplexVec grad(num_unknowns());
    for (int k = 0; k < 3; ++k) {
        grad(k) = -q * d[k] / rho + (rx.v(k) - x(3 + k));
        grad(3 + k) = d[k];
    }
    if (!family_.known_frequency) {
        const cplx dg = offset_form_ ? p(lambda_index()) : cplx(1.0);
        grad(6) = rho * c * (g - dg * (f - rx.f)) / (g * g);
    }
    return grad;
}

cplx DopplerSystem::unsquared_frequency_derivative_at(const ParamVec& p, const ComplexVec& x,
                                                      const Receiver& rx) const {
    check_dimensions(p, x);
    cplx a = 0.0;
    for (int k = 0; k < 3; ++k) a += (rx.r(k) - x(k)) * (rx.r(k) - x(k));
    return -std::sqrt(a) * p(speed_index()) / frequency_weight(p, x);
}

ParamVec make_parameters(const DopplerSystem& sys, const std::vector<Receiver>& receivers,
                         double c) {
    const int n = sys.n_obs();
    if (static_cast<int>(receivers.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "family needs " + std::to_string(n) + " receivers, got " +
                        std::to_string(receivers.size()));
    }
    ParamVec p(sys.num_parameters());
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k) {
            p(sys.position_index(i, k)) = receivers[i].r(k);
            p(sys.velocity_index(i, k)) = sys.family().stationary ? 0.0 : receivers[i].v(k);
        }
        p(sys.frequency_index(i)) = receivers[i].f;
    }
    p(sys.speed_index()) = c;
    if (sys.offset_form()) p(sys.lambda_index()) = 1.0;
    return p;
}

std::vector<Receiver> receivers_from_parameters(const DopplerSystem& sys, const ParamVec& p) {
    if (p.size() != sys.num_parameters()) {
        throw Error(ErrorCode::DimensionMismatch, "parameter vector has wrong length");
    }
    std::vector<Receiver> out(static_cast<std::size_t>(sys.n_obs()));
    for (int i = 0; i < sys.n_obs(); ++i) {
        for (int k = 0; k < 3; ++k) {
            out[i].r(k) = p(sys.position_index(i, k)).real();
            out[i].v(k) = p(sys.velocity_index(i, k)).real();
        }
        out[i].f = p(sys.frequency_index(i)).real();
    }
    return out;
}

ComplexVec to_unknowns(const TransmitterState& tx, const Family& family) {
    ComplexVec x(family.num_unknowns());
    for (int k = 0; k < 3; ++k) {
        x(k) = tx.r(k);
        x(3 + k) = tx.v(k);
    }
    if (!family.known_frequency) x(6) = tx.f;
    return x;
}

TransmitterState to_state(const ComplexVec& x, const DopplerSystem& sys) {
    TransmitterState tx;
    for (int k = 0; k < 3; ++k) {
        tx.r(k) = x(k).real();
        tx.v(k) = x(3 + k).real();
    }
    tx.f = sys.frequency_of(x).real();
    return tx;
}

namespace {

void require_separated(const TransmitterState& tx, const Vec3& rx_r) {
    const double rho = (rx_r - tx.r).norm();
    const double scale = std::max(rx_r.norm(), tx.r.norm());
    if (rho == 0.0 || rho <= 1e-12 * scale) {
        throw Error(ErrorCode::CoincidentPoints, "receiver coincides with transmitter");
    }
}

} // namespace

double range(const TransmitterState& tx, const Vec3& rx_r) {
    require_separated(tx, rx_r);
    return (rx_r - tx.r).norm();
}

double range_rate(const TransmitterState& tx, const Vec3& rx_r, const Vec3& rx_v) {
    const double rho = range(tx, rx_r);
    return (rx_r - tx.r).dot(rx_v - tx.v) / rho;
}

double predict_frequency(const TransmitterState& tx, const Vec3& rx_r, const Vec3& rx_v,
                         double c) {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "propagation speed must be positive");
    return (1.0 - range_rate(tx, rx_r, rx_v) / c) * tx.f;
}

double unsquared_residual(const TransmitterState& tx, const Receiver& rx, double c) {
    const double rho = range(tx, rx.r);
    if (tx.f == 0.0) throw Error(ErrorCode::ZeroFrequency, "transmit frequency is zero");
    return rho * c * (tx.f - rx.f) / tx.f - (rx.r - tx.r).dot(rx.v - tx.v);
}

void ScaleFrame::validate() const {
    if (!(length > 0.0) || !(time > 0.0) || !(frequency > 0.0) || !std::isfinite(length) ||
        !std::isfinite(time) || !std::isfinite(frequency)) {
        throw Error(ErrorCode::InvalidScale, "scale units must be positive and finite");
    }
}

TransmitterState ScaleFrame::scale(const TransmitterState& tx) const {
    return {tx.r / length, tx.v / speed(), tx.f / frequency};
}

TransmitterState ScaleFrame::unscale(const TransmitterState& tx) const {
    return {tx.r * length, tx.v * speed(), tx.f * frequency};
}

Receiver ScaleFrame::scale(const Receiver& rx) const {
    return {rx.r / length, rx.v / speed(), rx.f / frequency};
}

Receiver ScaleFrame::unscale(const Receiver& rx) const {
    return {rx.r * length, rx.v * speed(), rx.f * frequency};
}

ComplexVec ScaleFrame::scale(const ComplexVec& x, const Family& family) const {
    ComplexVec out = x;
    out.head(3) /= length;
    out.segment(3, 3) /= speed();
    if (!family.known_frequency) out(6) /= frequency;
    return out;
}

ComplexVec ScaleFrame::unscale(const ComplexVec& x, const Family& family) const {
    ComplexVec out = x;
    out.head(3) *= length;
    out.segment(3, 3) *= speed();
    if (!family.known_frequency) out(6) *= frequency;
    return out;
}

std::pair<DopplerSystem, ParamVec> rescale(const DopplerSystem& sys, const ParamVec& p,
                                           const ScaleFrame& frame) {
    frame.validate();
    if (p.size() != sys.num_parameters()) {
        throw Error(ErrorCode::DimensionMismatch, "parameter vector has wrong length");
    }
    const int n = sys.n_obs();
    ParamVec q = p;
    q.segment(0, 3 * n) /= frame.length;
    q.segment(3 * n, 3 * n) /= frame.speed();
    q.segment(6 * n, n) /= frame.frequency;
    q(sys.speed_index()) /= frame.speed();
    return {DopplerSystem(sys.family(), sys.fixed_frequency() / frame.frequency), q};
}

ScaleFrame default_frame(const DopplerSystem& sys, const ParamVec& p) {
    const int n = sys.n_obs();
    std::vector<double> dist;
    std::vector<double> freq;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += std::norm(p(sys.position_index(i, k)));
        dist.push_back(std::sqrt(s));
        freq.push_back(std::abs(p(sys.frequency_index(i))));
    }
    ScaleFrame frame;
    frame.length = median(dist);
    if (!(frame.length > 0.0)) frame.length = 1.0;
    const double c = std::abs(p(sys.speed_index()));
    frame.time = c > 0.0 ? frame.length / c : 1.0;
    frame.frequency = sys.family().known_frequency ? std::abs(sys.fixed_frequency()) : median(freq);
    if (!(frame.frequency > 0.0)) frame.frequency = 1.0;
    frame.validate();
    return frame;
}

void OffsetFrame::validate() const {
    for (const double u : {length, speed, frequency, epsilon}) {
        if (!(u > 0.0) || !std::isfinite(u)) {
            throw Error(ErrorCode::InvalidScale, "offset units must be positive and finite");
        }
    }
}

TransmitterState OffsetFrame::scale(const TransmitterState& tx) const {
    return {tx.r / length, tx.v / speed, (tx.f / frequency - 1.0) / epsilon};
}

TransmitterState OffsetFrame::unscale(const TransmitterState& tx) const {
    return {tx.r * length, tx.v * speed, frequency * (1.0 + epsilon * tx.f)};
}

Receiver OffsetFrame::scale(const Receiver& rx) const {
    return {rx.r / length, rx.v / speed, (rx.f / frequency - 1.0) / epsilon};
}

Receiver OffsetFrame::unscale(const Receiver& rx) const {
    return {rx.r * length, rx.v * speed, frequency * (1.0 + epsilon * rx.f)};
}

OffsetFrame offset_frame(const std::vector<Receiver>& receivers, double c,
                         std::optional<double> known_frequency) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::InvalidScale, "propagation speed must be positive");
    }
    std::vector<double> dist;
    std::vector<double> speeds;
    std::vector<double> freq;
    for (const auto& rx : receivers) {
        dist.push_back(rx.r.norm());
        speeds.push_back(rx.v.norm());
        freq.push_back(std::abs(rx.f));
    }
    OffsetFrame frame;
    frame.length = median(dist);
    if (!(frame.length > 0.0)) frame.length = 1.0;
    frame.frequency = known_frequency ? *known_frequency : median(freq);
    if (!(frame.frequency > 0.0)) frame.frequency = 1.0;
    std::vector<double> rates;
    for (const auto& rx : receivers) rates.push_back(std::abs(c * (rx.f / frame.frequency - 1.0)));
    frame.speed = std::min(c, std::max(median(speeds), median(rates)));
    if (!(frame.speed > 0.0)) frame.speed = c;
    frame.epsilon = frame.speed / c;
    frame.validate();
    return frame;
}

std::pair<DopplerSystem, ParamVec> offset_system(const Family& family,
                                                 const std::vector<Receiver>& receivers,
                                                 const OffsetFrame& frame) {
    frame.validate();
    std::vector<Receiver> scaled;
    scaled.reserve(receivers.size());
    for (const auto& rx : receivers) scaled.push_back(frame.scale(rx));
    if (family.known_frequency) {
        // phi = 0 for the transmitter; shift so the plain family sees f = 1.
        for (auto& rx : scaled) rx.f += 1.0;
        DopplerSystem sys(family, 1.0);
        ParamVec p = make_parameters(sys, scaled, 1.0);
        return {sys, p};
    }
    DopplerSystem sys(family, 1.0, true);
    ParamVec p = make_parameters(sys, scaled, 1.0);
    p(sys.lambda_index()) = frame.epsilon;
    return {sys, p};
}

ParamVec lift_parameters(const DopplerSystem& plain, const ParamVec& p) {
    if (plain.offset_form() || plain.family().known_frequency) {
        throw Error(ErrorCode::InvalidArgument, "lifting needs a plain unknown-f system");
    }
    if (p.size() != plain.num_parameters()) {
        throw Error(ErrorCode::DimensionMismatch, "parameter vector has wrong length");
    }
    const DopplerSystem lifted(plain.family(), 1.0, true);
    ParamVec q(lifted.num_parameters());
    q.head(p.size()) = p;
    for (int i = 0; i < plain.n_obs(); ++i) q(plain.frequency_index(i)) -= 1.0;
    q(lifted.lambda_index()) = 1.0;
    return q;
}

ComplexVec lift_solution(const ComplexVec& x) {
    if (x.size() != 7) throw Error(ErrorCode::DimensionMismatch, "lifting needs 7 unknowns");
    ComplexVec y = x;
    y(6) -= 1.0;
    return y;
}

} // namespace doppler
