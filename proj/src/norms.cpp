#include "mhdbl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "mhdbl/cancellation.hpp"
#include "mhdbl/errors.hpp"
#include "mhdbl/summation.hpp"

namespace mhdbl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogMax = 709.0;
const double kLogTiny = std::log(1e-300);

// log of sum_k exp(terms[k]); -inf for an empty or all -inf set
double log_sum_exp(const std::vector<double>& terms) {
    double top = kNegInf;
    for (double v : terms) top = std::max(top, v);
    if (top == kNegInf) return kNegInf;
    CompensatedSum acc;
    for (double v : terms) {
        if (v != kNegInf) acc.add(std::exp(v - top));
    }
    return top + std::log(acc.value());
}

double log_norm(const std::vector<double>& kappa, const std::vector<double>& w, double nyq, int m) {
    std::vector<double> terms;
    terms.reserve(w.size() + 1);
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] <= 0.0) continue;
        if (m == 0) {
            terms.push_back(std::log(w[k]));
        } else if (k > 0) {
            terms.push_back(2.0 * m * std::log(kappa[k]) + std::log(w[k]));
        }
    }
    if (m == 0 && nyq > 0.0) terms.push_back(std::log(nyq));
    const double l = log_sum_exp(terms);
    return l == kNegInf ? l : 0.5 * l;
}

double checked_exp(double l, int m) {
    if (l == kNegInf) return 0.0;
    if (l > kLogMax) throw OverflowAtM(m);
    return std::exp(l);
}

NormBundle bundle_from(const ModeEnergies& e, double tau, double alpha, double t, int m_max) {
    if (!(tau > 0.0)) throw std::invalid_argument("seminorms: tau must be positive");
    if (m_max < 0) throw std::invalid_argument("seminorms: m_max must be >= 0");
    NormBundle nb;
    nb.m_max = m_max;
    nb.tau = tau;
    nb.alpha = alpha;
    nb.t = t;
    const auto n = static_cast<std::size_t>(m_max) + 1;
    nb.x.resize(n);
    nb.d.resize(n);
    nb.z.resize(n);
    nb.y.resize(n);
    const double ltau = std::log(tau);
    CompensatedSum sx, sd, sz, sy;
    for (int m = 0; m <= m_max; ++m) {
        const double base = m * ltau + log_mm_coeff(m);
        const auto i = static_cast<std::size_t>(m);
        nb.x[i] = checked_exp(base + e.log_x(m), m);
        nb.d[i] = checked_exp(base + e.log_d(m), m);
        nb.z[i] = checked_exp(base + e.log_z(m), m);
        nb.y[i] = m == 0 ? 0.0 : (m / tau) * nb.x[i];
        sx.add(nb.x[i]);
        sd.add(nb.d[i]);
        sz.add(nb.z[i]);
        if (m > 0) sy.add(nb.y[i]);
    }
    nb.total_x = sx.value();
    nb.total_d = sd.value();
    nb.total_z = sz.value();
    nb.total_y = sy.value();
    nb.truncation_warning = nb.total_x > 0.0 && nb.x.back() > 1e-10 * nb.total_x && m_max > 0;
    return nb;
}

}  // namespace

double log_mm_coeff(int m) {
    if (m < 0) throw std::invalid_argument("mm_coeff: m must be >= 0");
    if (m <= 20) return std::log(mm_coeff(m));
    return 0.5 * std::log(m + 1.0) - std::lgamma(m + 1.0);
}

// m! stays finite up to 170; past that M_m underflows and the log form is
// the only useful one
double mm_coeff(int m) {
    if (m < 0) throw std::invalid_argument("mm_coeff: m must be >= 0");
    if (m > 170) return std::exp(log_mm_coeff(m));
    double fact = 1.0;
    for (int k = 2; k <= m; ++k) fact *= k;
    return std::sqrt(m + 1.0) / fact;
}

double ModeEnergies::log_x(int m) const { return log_norm(kappa, wx, nyquist_x, m); }
double ModeEnergies::log_d(int m) const { return log_norm(kappa, wd, nyquist_d, m); }
double ModeEnergies::log_z(int m) const { return log_norm(kappa, wz, nyquist_z, m); }

ModeEnergies mode_energies(const Field& f, const GaussianWeight& w, Exec exec) {
    const Grid& g = f.grid();
    const std::size_t ny = g.ny();
    const auto q = g.node_weights();
    const RowSpectrum cf = rfft_rows(f, exec);
    const RowSpectrum cd = rfft_rows(ddy(f, 1, exec), exec);
    const std::size_t nk = cf.nk;
    const double n = static_cast<double>(g.nx());
    const double scale = g.lx() / (n * n);
    const double root_t = std::sqrt(bracket(w.t()));

    ModeEnergies e;
    e.kappa.resize(nk);
    e.wx.assign(nk, 0.0);
    e.wd.assign(nk, 0.0);
    e.wz.assign(nk, 0.0);
    for (std::size_t k = 0; k < nk; ++k) {
        e.kappa[k] = g.wavenumber(k);
        CompensatedSum ax, ad, az;
        for (std::size_t i = 0; i < ny; ++i) {
            const double y = g.y(i);
            const double px = w.times(y, std::abs(cf.at(i, k)));
            const double pd = w.times(y, std::abs(cd.at(i, k)));
            const double pz = px * (y / root_t);
            if (!std::isfinite(px) || !std::isfinite(pd) || !std::isfinite(pz)) {
                throw NonFiniteWeightProduct("theta*f is not finite at y = " + std::to_string(y));
            }
            ax.add(q[i] * px * px);
            ad.add(q[i] * pd * pd);
            az.add(q[i] * pz * pz);
        }
        const double mult = (k == 0 || k == g.nyquist()) ? 1.0 : 2.0;
        e.wx[k] = scale * mult * ax.value();
        e.wd[k] = scale * mult * ad.value();
        e.wz[k] = scale * mult * az.value();
    }
    // the Nyquist bin only counts for m = 0
    const std::size_t kn = g.nyquist();
    e.nyquist_x = e.wx[kn];
    e.nyquist_d = e.wd[kn];
    e.nyquist_z = e.wz[kn];
    e.wx[kn] = e.wd[kn] = e.wz[kn] = 0.0;
    return e;
}

NormBundle seminorms(const Field& f, double tau, double alpha, double t, int m_max, Exec exec) {
    const GaussianWeight w(alpha, t);
    return bundle_from(mode_energies(f, w, exec), tau, alpha, t, m_max);
}

NormBundle seminorms_direct(const Field& f, double tau, double alpha, double t, int m_max) {
    if (!(tau > 0.0)) throw std::invalid_argument("seminorms: tau must be positive");
    const GaussianWeight w(alpha, t);
    const Grid& g = f.grid();
    std::vector<double> zs(g.ny());
    for (std::size_t i = 0; i < g.ny(); ++i) zs[i] = w.z(g.y(i));
    NormBundle nb;
    nb.m_max = m_max;
    nb.tau = tau;
    nb.alpha = alpha;
    nb.t = t;
    for (int m = 0; m <= m_max; ++m) {
        const Field fm = ddx_power(f, m);
        const double c = std::pow(tau, m) * mm_coeff(m);
        nb.x.push_back(c * weighted_l2(fm, w));
        nb.d.push_back(c * weighted_l2(ddy(fm, 1, Exec::Serial), w));
        nb.z.push_back(c * weighted_l2(scale_rows(fm, zs), w));
        nb.y.push_back(m == 0 ? 0.0 : (m / tau) * nb.x.back());
    }
    nb.total_x = compensated_sum(nb.x);
    nb.total_d = compensated_sum(nb.d);
    nb.total_z = compensated_sum(nb.z);
    nb.total_y = compensated_sum(nb.y);
    nb.truncation_warning = nb.total_x > 0.0 && nb.x.back() > 1e-10 * nb.total_x && m_max > 0;
    return nb;
}

double poincare_check(const Field& f, double alpha, double t, int m) {
    const GaussianWeight w(alpha, t);
    const ModeEnergies e = mode_energies(f, w);
    const double lx = e.log_x(m);
    if (lx == kNegInf) return std::numeric_limits<double>::infinity();
    const double ld = e.log_d(m);
    return std::exp(2.0 * (ld - lx)) * bracket(t) / alpha;
}

double dissipation_sum(const ModeEnergies& e, double tau, int m_max) {
    const double ltau = std::log(tau);
    CompensatedSum acc;
    for (int m = 0; m <= m_max; ++m) {
        const double lx = e.log_x(m);
        if (lx == kNegInf || lx < kLogTiny) continue;
        const double ld = e.log_d(m);
        if (ld == kNegInf) continue;
        acc.add(checked_exp(m * ltau + log_mm_coeff(m) + 2.0 * ld - lx, m));
    }
    return acc.value();
}

DissipationBound dissipation_check(const Field& f, double tau, double alpha, double t, double beta, int m_max) {
    if (!(beta > 0.0 && beta < 0.5)) throw std::invalid_argument("dissipation_check: beta must lie in (0, 1/2)");
    const GaussianWeight w(alpha, t);
    const ModeEnergies e = mode_energies(f, w);
    const NormBundle nb = bundle_from(e, tau, alpha, t, m_max);
    const double tb = bracket(t);
    DissipationBound r{};
    r.lhs = dissipation_sum(e, tau, m_max);
    r.rhs_d = std::sqrt(alpha) * beta / (2.0 * std::sqrt(tb)) * nb.total_d;
    r.rhs_x = alpha * (1.0 - beta) / tb * nb.total_x;
    r.rhs = r.rhs_d + r.rhs_x;
    return r;
}

MonitorPoint monitor_point(const TransformedState& ts, double tau, double alpha, int m_max, Exec exec) {
    const GaussianWeight w(alpha, ts.t);
    const ModeEnergies eu = mode_energies(ts.u_tilde, w, exec);
    const ModeEnergies eb = mode_energies(ts.b_tilde, w, exec);
    MonitorPoint p;
    p.t = ts.t;
    p.tau = tau;
    p.u = bundle_from(eu, tau, alpha, ts.t, m_max);
    p.b = bundle_from(eb, tau, alpha, ts.t, m_max);
    p.su = dissipation_sum(eu, tau, m_max);
    p.sb = dissipation_sum(eb, tau, m_max);
    return p;
}

MonitorReport apriori_monitor(std::span<const MonitorPoint> points, double c_shear, double beta) {
    MonitorReport r;
    const std::size_t n = points.size();
    auto deriv = [&](std::size_t k, auto&& get) {
        if (n < 2) return 0.0;
        const std::size_t a = k == 0 ? 0 : k - 1;
        const std::size_t b = k + 1 == n ? k : k + 1;
        return (get(points[b]) - get(points[a])) / (points[b].t - points[a].t);
    };
    for (std::size_t k = 0; k < n; ++k) {
        const MonitorPoint& p = points[k];
        MonitorSample s;
        s.t = p.t;
        s.tau = p.tau;
        s.xu = p.u.total_x;
        s.xb = p.b.total_x;
        s.du = p.u.total_d;
        s.db = p.b.total_d;
        s.yu = p.u.total_y;
        s.yb = p.b.total_y;
        s.su = p.su;
        s.sb = p.sb;
        for (double v : {s.xu, s.xb, s.du, s.db, s.yu, s.yb, s.su, s.sb}) {
            if (!std::isfinite(v)) throw UnstableSample(p.t);
        }
        s.tau_dot = deriv(k, [](const MonitorPoint& q) { return q.tau; });
        s.dxu_dt = deriv(k, [](const MonitorPoint& q) { return q.u.total_x; });
        s.dxb_dt = deriv(k, [](const MonitorPoint& q) { return q.b.total_x; });
        const double tb = bracket(p.t);
        const double alpha = p.u.alpha;
        s.linear_u = alpha / (2.0 * tb) * s.xu + c_shear / tb * s.xb;
        s.linear_b = alpha / (2.0 * tb) * s.xb;
        s.nonlinear = (std::pow(tb, -0.25) * (s.xu + s.xb) + std::pow(tb, 0.25) * (s.du + s.db)) * (s.yu + s.yb) /
                      std::sqrt(p.tau);
        const double excess_u = s.dxu_dt + s.su - s.linear_u - s.tau_dot * s.yu;
        const double excess_b = s.dxb_dt + s.sb - s.linear_b - s.tau_dot * s.yb;
        if (s.nonlinear > 0.0) {
            s.c0_u = std::max(0.0, excess_u / s.nonlinear);
            s.c0_b = std::max(0.0, excess_b / s.nonlinear);
        }
        const double lead = std::sqrt(alpha) * beta / (2.0 * std::sqrt(tb));
        s.dissipation_u = lead * s.du + alpha * (1.0 - beta) / tb * s.xu;
        s.dissipation_b = lead * s.db + alpha * (1.0 - beta) / tb * s.xb;
        r.c0_hat = std::max({r.c0_hat, s.c0_u, s.c0_b});
        r.samples.push_back(s);
    }
    return r;
}

MonitorReport apriori_monitor(std::span<const TransformedState> traj, std::span<const double> taus, double alpha,
                              double c_shear, int m_max, double beta) {
    if (traj.size() != taus.size()) throw std::invalid_argument("apriori_monitor: one tau per state");
    std::vector<MonitorPoint> pts;
    pts.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) pts.push_back(monitor_point(traj[k], taus[k], alpha, m_max));
    return apriori_monitor(pts, c_shear, beta);
}

void write_norms_csv(const std::filesystem::path& path, const NormBundle& nb) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os.precision(17);
    os << "t,tau,alpha,m,X_m,D_m,Z_m,Y_m\n";
    for (int m = 0; m <= nb.m_max; ++m) {
        const auto i = static_cast<std::size_t>(m);
        os << nb.t << ',' << nb.tau << ',' << nb.alpha << ',' << m << ',' << nb.x[i] << ',' << nb.d[i] << ','
           << nb.z[i] << ',' << nb.y[i] << '\n';
    }
    os << nb.t << ',' << nb.tau << ',' << nb.alpha << ",-1," << nb.total_x << ',' << nb.total_d << ','
       << nb.total_z << ',' << nb.total_y << '\n';
}

void write_monitor_csv(const std::filesystem::path& path, const MonitorReport& r) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os.precision(17);
    os << "t,tau,tau_dot,Xu,Xb,Du,Db,Yu,Yb,dXu_dt,dXb_dt,Su,Sb,linear_u,linear_b,nonlinear,c0_u,c0_b,dissipation_u,"
          "dissipation_b\n";
    for (const MonitorSample& s : r.samples) {
        os << s.t << ',' << s.tau << ',' << s.tau_dot << ',' << s.xu << ',' << s.xb << ',' << s.du << ',' << s.db
           << ',' << s.yu << ',' << s.yb << ',' << s.dxu_dt << ',' << s.dxb_dt << ',' << s.su << ',' << s.sb << ','
           << s.linear_u << ',' << s.linear_b << ',' << s.nonlinear << ',' << s.c0_u << ',' << s.c0_b << ','
           << s.dissipation_u << ',' << s.dissipation_b << '\n';
    }
}

}  // namespace mhdbl
