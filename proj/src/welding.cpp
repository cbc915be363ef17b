#include "virlab/welding.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace virlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

int grid_for(int M) {
    int n = 256;
    while (n < 8 * M) n <<= 1;
    return n;
}

std::vector<Cpx> unit_grid(int n) {
    std::vector<Cpx> z(n);
    for (int j = 0; j < n; ++j) z[j] = std::polar(1.0, 2.0 * kPi * j / n);
    return z;
}

double cross(Cpx a, Cpx b) { return a.real() * b.imag() - a.imag() * b.real(); }

long curve_winding(const std::vector<Cpx>& c, Cpx z0 = Cpx(0, 0)) {
    double total = 0;
    const int n = static_cast<int>(c.size());
    for (int j = 0; j < n; ++j) {
        Cpx a = c[j] - z0, b = c[(j + 1) % n] - z0;
        if (std::abs(a) == 0 || std::abs(b) == 0) return 0;
        total += std::arg(b / a);
    }
    return std::lround(total / (2 * kPi));
}

bool segments_cross(Cpx p1, Cpx p2, Cpx p3, Cpx p4) {
    double d1 = cross(p4 - p3, p1 - p3), d2 = cross(p4 - p3, p2 - p3);
    double d3 = cross(p2 - p1, p3 - p1), d4 = cross(p2 - p1, p4 - p1);
    return d1 * d2 < 0 && d3 * d4 < 0;
}

bool curve_simple(const std::vector<Cpx>& c) {
    const int n = static_cast<int>(c.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // wraparound neighbours
            if (segments_cross(c[i], c[(i + 1) % n], c[j], c[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

double sampled_gap(const std::vector<Cpx>& a, const std::vector<Cpx>& b) {
    double gap = std::numeric_limits<double>::infinity();
    for (const Cpx& x : a)
        for (const Cpx& y : b) gap = std::min(gap, std::abs(x - y));
    return gap;
}

double estimate_margin(const std::vector<Cpx>& coef, int M) {
    double peak = 0;
    for (const Cpx& c : coef) peak = std::max(peak, std::abs(c));
    if (peak <= 0) return 0.0;
    double rho = 0;
    for (int k = 1; k <= M; ++k) {
        double a = std::abs(coef[M - k]);
        if (a < peak * 1e-12) continue;
        rho = std::max(rho, std::pow(a / peak, 1.0 / k));
    }
    if (rho <= 0) return 30.0;
    return std::min(30.0, -std::log(rho));
}

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

void validate_curves(const std::vector<Cpx>& outer, const std::vector<Cpx>& inner,
                     double separation) {
    Cpx c0(0, 0);
    for (const Cpx& z : inner) c0 += z;
    c0 /= double(inner.size());
    if (curve_winding(inner, c0) != 1)
        throw WeldGeometryError("inner boundary does not wind once around its center");
    if (curve_winding(outer, c0) != 1)
        throw WeldGeometryError("outer boundary does not enclose the hole");
    if (!curve_simple(outer) || !curve_simple(inner))
        throw WeldGeometryError("self-intersecting boundary curve");
    double gap = sampled_gap(outer, inner);
    if (gap < separation)
        throw WeldGeometryError("boundary curves too close (sampled gap " + fmt(gap) + ")");
}

int im_col(int K, int k) { return k < 0 ? 2 * K + 1 + (k + K) : 3 * K + k; }

// collocation in transported coordinates; `outer`/`inner` are the τ-images
AnnulusMap solve_once(const std::vector<Cpx>& outer, const std::vector<Cpx>& inner, int K) {
    const int no = static_cast<int>(outer.size());
    const int ni = static_cast<int>(inner.size());
    const int rows = no + ni, cols = 4 * K + 2;

    double lo = 0, li = 0;
    for (const Cpx& z : outer) lo += std::log(std::abs(z));
    for (const Cpx& z : inner) li += std::log(std::abs(z));
    const double Rout = std::exp(lo / no), rin = std::exp(li / ni);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd rhs(rows);
    auto fill = [&](int row, const Cpx& z, bool is_inner) {
        A(row, K) = 1.0;
        Cpx zf = z / Rout, vf = rin / z, w = 1, v = 1;
        for (int k = 1; k <= K; ++k) {
            w *= zf;
            v *= vf;
            A(row, K + k) = w.real();
            A(row, im_col(K, k)) = -w.imag();
            A(row, K - k) = v.real();
            A(row, im_col(K, -k)) = -v.imag();
        }
        if (is_inner) A(row, cols - 1) = 1.0;
        rhs(row) = -std::log(std::abs(z));
    };
    for (int j = 0; j < no; ++j) fill(j, outer[j], false);
    for (int j = 0; j < ni; ++j) fill(no + j, inner[j], true);

    Eigen::VectorXd x = A.colPivHouseholderQr().solve(rhs);

    AnnulusMap am;
    am.K = K;
    am.outer_scale = Rout;
    am.inner_scale = rin;
    am.phi.assign(2 * K + 1, Cpx(0, 0));
    for (int k = -K; k <= K; ++k)
        am.phi[k + K] = Cpx(x(k + K), k == 0 ? 0.0 : x(im_col(K, k)));
    am.t = x(cols - 1);
    am.residual = (A * x - rhs).cwiseAbs().maxCoeff();
    return am;
}

AnnulusMap solve_adaptive(const std::vector<Cpx>& outer, const std::vector<Cpx>& inner,
                          const WeldingConfig& cfg) {
    validate_curves(outer, inner, cfg.separation);
    const int no = static_cast<int>(outer.size());
    const int ni = static_cast<int>(inner.size());

    // normalize the outer scale, then center the hole so the Laurent basis
    // converges on the whole region even when the hole sits far off axis
    double lo = 0;
    for (const Cpx& z : outer) lo += std::log(std::abs(z));
    double s = std::exp(lo / no);
    if (std::abs(std::log(s)) < 1e-9) s = 1.0;
    Cpx c(0, 0);
    for (const Cpx& z : inner) c += z;
    c /= double(ni) * s;
    bool mob = false;
    if (std::abs(c) > 1e-12) {
        double hi = 0;
        for (const Cpx& z : outer) hi = std::max(hi, std::abs(z) / s);
        mob = hi < 0.98 / std::abs(c);
    } else {
        c = Cpx(0, 0);
    }
    AnnulusMap shape;
    shape.scale = s;
    shape.center = c;
    shape.mobius_centering = mob;
    std::vector<Cpx> to(no), ti(ni);
    for (int j = 0; j < no; ++j) to[j] = shape.transported(outer[j]);
    for (int j = 0; j < ni; ++j) ti[j] = shape.transported(inner[j]);

    int cap = std::min(no, ni) / 8;
    cap = std::max(cap, 8);
    int K = std::min(32, cap);
    AnnulusMap am;
    for (;;) {
        am = solve_once(to, ti, K);
        if (am.residual <= cfg.residual_tol) break;
        if (K >= cap)
            throw WeldNumericError("annulus solve stalled: boundary residual " +
                                   fmt(am.residual) + " above tolerance " +
                                   fmt(cfg.residual_tol) + " at K=" + fmt(K) +
                                   ", grid=" + fmt(static_cast<double>(outer.size())));
        K = std::min(2 * K, cap);
    }
    if (am.t < cfg.separation)
        throw WeldGeometryError("modulus " + fmt(am.t) + " below the separation threshold");
    am.scale = shape.scale;
    am.center = shape.center;
    am.mobius_centering = shape.mobius_centering;
    return am;
}

// ζ·φ′(ζ) in transported coordinates, for the chain rule in dlog
Cpx z_log_deriv(const AnnulusMap& am, Cpx zeta) {
    Cpx acc = 0;
    Cpx zf = zeta / am.outer_scale, vf = am.inner_scale / zeta, w = 1, v = 1;
    for (int k = 1; k <= am.K; ++k) {
        w *= zf;
        v *= vf;
        acc += double(k) * (am.phi[am.K + k] * w - am.phi[am.K - k] * v);
    }
    return acc;
}

CircleDiffeo rotate_source(const CircleDiffeo& g, double alpha) {
    CircleDiffeo out = g;
    for (int k = -g.M; k <= g.M; ++k)
        out.coef[k + g.M] *= std::polar(1.0, k * alpha);
    return out;
}

CircleDiffeo scale_values(const CircleDiffeo& g, Cpx u) {
    CircleDiffeo out = g;
    for (Cpx& c : out.coef) c *= u;
    return out;
}

// exact p(1) = 1 by the rotation pair p ← p∘rot(α), q ← e^{−iα}·q
NeretinElement renormalize(const CircleDiffeo& p, double t, const CircleDiffeo& q,
                           const WeldingConfig& cfg) {
    if (t < cfg.separation)
        throw WeldGeometryError("modulus " + fmt(t) + " below the separation threshold");
    double alpha = 0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        Cpx z = std::polar(1.0, alpha);
        Cpx val = p(z);
        double F = std::arg(val);
        if (std::abs(F) < 1e-15) break;
        double Fp = (z * p.derivative(z) / val).real();
        if (Fp < 1e-8) throw WeldGeometryError("derivative vanishes at the base point");
        alpha -= F / Fp;
    }
    NeretinElement e;
    e.p = rotate_source(p, alpha);
    e.t = t;
    e.q = scale_values(q, std::polar(1.0, -alpha));
    return e;
}

struct RetrySplit {};  // the analyticity margin cannot absorb this step

struct Piece {
    CircleDiffeo p, q;
    double t = 0, residual = 0;
    int K = 0;
};

// reduce the word A(s)·w·A(dt) to p·A(t′)·q in one conformal step
Piece reduce_piece(double s, const CircleDiffeo& w, double dt, const WeldingConfig& cfg) {
    if (dt > cfg.margin_safety * std::max(w.margin, 1e-9)) throw RetrySplit{};
    const int n = cfg.grid;
    const auto zs = unit_grid(n);
    std::vector<Cpx> g(n);
    const double es = std::exp(-s), edt = std::exp(-dt);
    double gmax = 0, gmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        g[j] = es * w(edt * zs[j]);
        gmax = std::max(gmax, std::abs(g[j]));
        gmin = std::min(gmin, std::abs(g[j]));
    }
    if (gmin < 1e-12)
        throw WeldGeometryError("scaled middle curve passes through the origin");
    // the scaled curve must stay a Jordan curve around 0, strictly inside;
    // otherwise a finer split keeps the evaluation radius closer to the circle
    if (gmax > 1.0 - cfg.separation || curve_winding(g) != 1 || !curve_simple(g))
        throw RetrySplit{};

    AnnulusMap am = solve_adaptive(zs, g, cfg);
    const Cpx one(1, 0);
    am.rot = -std::arg(am.transported(one)) - std::imag(am.log_factor(one));

    // Newton inversion of the outer boundary correspondence θ ↦ arg Q(e^{iθ})
    std::vector<Cpx> ps(n), qs(n);
    double theta = 0;
    for (int m = 0; m < n; ++m) {
        const Cpx target = std::polar(1.0, 2.0 * kPi * m / n);
        bool done = false;
        for (int it = 0; it < cfg.max_iter; ++it) {
            Cpx z = std::polar(1.0, theta);
            double F = std::arg(am.map(z) * std::conj(target));
            if (std::abs(F) < 1e-14) {
                done = true;
                break;
            }
            double Fp = (z * am.dlog(z)).real();
            if (Fp < 1e-6)
                throw WeldGeometryError("boundary correspondence is not a diffeomorphism");
            theta -= F / Fp;
        }
        if (!done) throw WeldNumericError("boundary angle inversion stalled");
        ps[m] = std::polar(1.0, theta);
        theta += 2.0 * kPi / n;
    }
    const double et = std::exp(am.t);
    for (int j = 0; j < n; ++j) qs[j] = et * am.map(g[j]);

    Piece out;
    out.p = fit_circle_map(ps, cfg.modes);
    out.q = fit_circle_map(qs, cfg.modes);
    out.t = am.t;
    out.residual = am.residual;
    out.K = am.K;
    return out;
}

struct Reduced {
    CircleDiffeo p, q;
    double t = 0, residual = 0;
    int splits = 1, K = 0;
};

Reduced attempt_reduce(double s, CircleDiffeo w, double t, int n, const WeldingConfig& cfg) {
    const double dt = t / n;
    double scur = s;
    Reduced out;
    out.splits = n;
    bool first = true;
    for (int i = 0; i < n; ++i) {
        Piece pc = reduce_piece(scur, w, dt, cfg);
        out.p = first ? pc.p : compose(out.p, pc.p, cfg.modes);
        first = false;
        scur = pc.t;
        w = pc.q;
        out.residual = std::max(out.residual, pc.residual);
        out.K = std::max(out.K, pc.K);
    }
    out.t = scur;
    out.q = w;
    return out;
}

Reduced reduce_word(double s, const CircleDiffeo& w, double t, const WeldingConfig& cfg) {
    int n;
    if (cfg.force_splits > 0) {
        n = cfg.force_splits;
    } else {
        n = static_cast<int>(std::ceil(t / (cfg.margin_safety * std::max(w.margin, 1e-9))));
        n = std::clamp(n, 1, cfg.max_splits);
    }
    for (;;) {
        try {
            return attempt_reduce(s, w, t, n, cfg);
        } catch (const RetrySplit&) {
            if (cfg.force_splits > 0)
                throw WeldNumericError("requested split count " + fmt(n) +
                                       " too coarse for the analyticity margin");
            if (n >= cfg.max_splits)
                throw WeldNumericError("splitting cap " + fmt(cfg.max_splits) +
                                       " reached without a valid reduction");
            n = std::min(2 * n, cfg.max_splits);
        }
    }
}

}  // namespace

Cpx CircleDiffeo::operator()(Cpx z) const {
    Cpx pos = 0;
    for (int k = M; k >= 0; --k) pos = pos * z + coef[k + M];
    Cpx invz = 1.0 / z, neg = 0;
    for (int k = M; k >= 1; --k) neg = (neg + coef[M - k]) * invz;
    return pos + neg;
}

Cpx CircleDiffeo::derivative(Cpx z) const {
    Cpx pos = 0;
    for (int k = M; k >= 1; --k) pos = pos * z + double(k) * coef[k + M];
    Cpx invz = 1.0 / z, neg = 0;
    for (int k = M; k >= 1; --k) neg = (neg - double(k) * coef[M - k]) * invz;
    return pos + neg * invz;
}

CircleDiffeo CircleDiffeo::identity(int M) {
    CircleDiffeo g;
    g.M = M;
    g.coef.assign(2 * M + 1, Cpx(0, 0));
    g.coef[M + 1] = 1.0;
    g.orientation = true;
    g.margin = 30.0;
    return g;
}

CircleDiffeo CircleDiffeo::rotation(double alpha, int M) {
    CircleDiffeo g = identity(M);
    g.coef[M + 1] = std::polar(1.0, alpha);
    return g;
}

CircleDiffeo fit_circle_map(const std::vector<Cpx>& samples, int M) {
    const int n = static_cast<int>(samples.size());
    if (n < 2 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fit_circle_map: sample count must be a power of two");
    if (M < 1 || 2 * M + 1 > n)
        throw std::invalid_argument("fit_circle_map: mode cutoff too large for the grid");
    Eigen::FFT<double> fft;
    std::vector<Cpx> freq;
    fft.fwd(freq, samples);
    CircleDiffeo g;
    g.M = M;
    g.coef.assign(2 * M + 1, Cpx(0, 0));
    for (int k = -M; k <= M; ++k) g.coef[k + M] = freq[(k + n) % n] / double(n);
    // spectral floor: modes at the FFT noise level would otherwise blow up
    // when the series is evaluated inward of the circle
    double peak = 0;
    for (const Cpx& c : g.coef) peak = std::max(peak, std::abs(c));
    for (Cpx& c : g.coef)
        if (std::abs(c) < peak * 3e-14) c = 0;
    g.orientation = curve_winding(samples) == 1;
    g.margin = estimate_margin(g.coef, M);
    return g;
}

std::vector<Cpx> sample_circle_map(const CircleDiffeo& g, int n) {
    const auto zs = unit_grid(n);
    std::vector<Cpx> out(n);
    for (int j = 0; j < n; ++j) out[j] = g(zs[j]);
    return out;
}

CircleDiffeo compose(const CircleDiffeo& f, const CircleDiffeo& g, int M) {
    const int n = grid_for(M);
    const auto zs = unit_grid(n);
    std::vector<Cpx> s(n);
    for (int j = 0; j < n; ++j) s[j] = f(g(zs[j]));
    return fit_circle_map(s, M);
}

CircleDiffeo invert(const CircleDiffeo& g, int M, const WeldingConfig& cfg) {
    const int n = grid_for(M);
    const auto zs = unit_grid(n);
    std::vector<Cpx> vals(n);
    std::vector<double> eta(n);
    double rad_err = 0, speed = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        vals[j] = g(zs[j]);
        rad_err = std::max(rad_err, std::abs(std::abs(vals[j]) - 1.0));
        speed = std::min(speed, (zs[j] * g.derivative(zs[j]) / vals[j]).real());
    }
    if (rad_err > 1e-6)
        throw WeldGeometryError("invert: map leaves the circle (radial error " +
                                fmt(rad_err) + ")");
    if (speed < 1e-8)
        throw WeldGeometryError("invert: derivative vanishes on the circle");
    eta[0] = std::arg(vals[0]);
    for (int j = 1; j < n; ++j) eta[j] = eta[j - 1] + std::arg(vals[j] / vals[j - 1]);
    const double closing = eta[n - 1] + std::arg(vals[0] / vals[n - 1]) - eta[0];
    if (std::lround(closing / (2 * kPi)) != 1)
        throw WeldGeometryError("invert: boundary map does not wind once");

    std::vector<Cpx> inv(n);
    for (int m = 0; m < n; ++m) {
        double psi = 2.0 * kPi * m / n;
        // shift the target into the lifted range and bracket it on the grid
        double tau = psi + 2 * kPi * std::ceil((eta[0] - psi) / (2 * kPi));
        auto it = std::upper_bound(eta.begin(), eta.end(), tau);
        int j = static_cast<int>(it - eta.begin()) - 1;
        double theta;
        if (j < 0) {
            theta = 0.0;
        } else if (j >= n - 1) {
            theta = 2.0 * kPi * j / n;
        } else {
            double frac = (tau - eta[j]) / std::max(eta[j + 1] - eta[j], 1e-300);
            theta = 2.0 * kPi * (j + frac) / n;
        }
        Cpx target = std::polar(1.0, psi);
        bool done = false;
        for (int it2 = 0; it2 < cfg.max_iter; ++it2) {
            Cpx z = std::polar(1.0, theta);
            Cpx val = g(z);
            double F = std::arg(val * std::conj(target));
            if (std::abs(F) < 1e-14) {
                done = true;
                break;
            }
            double Fp = (z * g.derivative(z) / val).real();
            if (Fp < 1e-8)
                throw WeldGeometryError("invert: derivative vanishes on the circle");
            theta -= F / Fp;
        }
        if (!done) throw WeldNumericError("invert: Newton stalled");
        inv[m] = std::polar(1.0, theta);
    }
    return fit_circle_map(inv, M);
}

DiffeoCheck check_diffeo(const CircleDiffeo& g, int n) {
    const auto zs = unit_grid(n);
    DiffeoCheck out;
    out.max_radial_error = 0;
    out.min_angular_speed = std::numeric_limits<double>::infinity();
    std::vector<Cpx> vals(n);
    for (int j = 0; j < n; ++j) {
        vals[j] = g(zs[j]);
        out.max_radial_error = std::max(out.max_radial_error, std::abs(std::abs(vals[j]) - 1.0));
        out.min_angular_speed =
            std::min(out.min_angular_speed, (zs[j] * g.derivative(zs[j]) / vals[j]).real());
    }
    out.winding = curve_winding(vals);
    out.pass = out.max_radial_error <= 1e-6 && out.winding == 1 && out.min_angular_speed > 1e-9;
    return out;
}

double coeff_distance(const CircleDiffeo& f, const CircleDiffeo& g) {
    const int M = std::max(f.M, g.M);
    double d = 0;
    for (int k = -M; k <= M; ++k) {
        Cpx a = std::abs(k) <= f.M ? f.coef[k + f.M] : Cpx(0, 0);
        Cpx b = std::abs(k) <= g.M ? g.coef[k + g.M] : Cpx(0, 0);
        d = std::max(d, std::abs(a - b));
    }
    return d;
}

NeretinElement neretin(const CircleDiffeo& p, double t, const CircleDiffeo& q,
                       const WeldingConfig& cfg) {
    DiffeoCheck cp = check_diffeo(p), cq = check_diffeo(q);
    if (!cp.pass)
        throw WeldGeometryError("outer factor is not a circle diffeomorphism (radial " +
                                fmt(cp.max_radial_error) + ", winding " + fmt(cp.winding) + ")");
    if (!cq.pass)
        throw WeldGeometryError("inner factor is not a circle diffeomorphism (radial " +
                                fmt(cq.max_radial_error) + ", winding " + fmt(cq.winding) + ")");
    return renormalize(p, t, q, cfg);
}

NeretinElement scaling_element(double t, int M) {
    WeldingConfig cfg;
    cfg.modes = M;
    return renormalize(CircleDiffeo::identity(M), t, CircleDiffeo::identity(M), cfg);
}

Cpx AnnulusMap::transported(Cpx z) const {
    Cpx y = z / scale;
    if (mobius_centering) return (y - center) / (1.0 - std::conj(center) * y);
    return y - center;
}

Cpx AnnulusMap::log_factor(Cpx z) const {
    Cpx zeta = transported(z);
    Cpx acc = phi[K];
    Cpx zf = zeta / outer_scale, vf = inner_scale / zeta, w = 1, v = 1;
    for (int k = 1; k <= K; ++k) {
        w *= zf;
        v *= vf;
        acc += phi[K + k] * w + phi[K - k] * v;
    }
    return acc;
}

Cpx AnnulusMap::map(Cpx z) const {
    return transported(z) * std::exp(log_factor(z) + Cpx(0, rot));
}

Cpx AnnulusMap::dlog(Cpx z) const {
    Cpx y = z / scale, zeta = transported(z), dtau;
    if (mobius_centering) {
        Cpx den = 1.0 - std::conj(center) * y;
        dtau = (1.0 - std::norm(center)) / (den * den * scale);
    } else {
        dtau = 1.0 / scale;
    }
    return dtau * (1.0 + z_log_deriv(*this, zeta)) / zeta;
}

AnnulusMap annulus_map(const std::vector<Cpx>& outer, const std::vector<Cpx>& inner,
                       const WeldingConfig& cfg) {
    AnnulusMap am = solve_adaptive(outer, inner, cfg);
    am.rot = std::arg(outer[0]) - std::arg(am.transported(outer[0])) -
             std::imag(am.log_factor(outer[0]));
    return am;
}

double circle_annulus_modulus(Cpx m, double r) {
    const double am = std::abs(m);
    if (r <= 0 || am + r >= 1.0)
        throw WeldGeometryError("circle not strictly inside the unit disk");
    if (am < 1e-14) return -std::log(r);
    const double B = 1.0 + am * am - r * r;
    const double x = 2.0 * am / (B + std::sqrt(B * B - 4.0 * am * am));
    const double w0 = am + r;
    return -std::log(std::abs((w0 - x) / (1.0 - x * w0)));
}

NeretinElement multiply(const NeretinElement& a, const NeretinElement& b,
                        const WeldingConfig& cfg, MultiplyReport* report) {
    const int M = cfg.modes;
    CircleDiffeo w = compose(a.q, b.p, M);
    Reduced r = reduce_word(a.t, w, b.t, cfg);
    CircleDiffeo p = compose(a.p, r.p, M);
    CircleDiffeo q = compose(r.q, b.q, M);
    if (report) {
        report->residual = r.residual;
        report->splits = r.splits;
        report->phi_modes = r.K;
    }
    return renormalize(p, r.t, q, cfg);
}

AnnularTriple to_triple(const NeretinElement& e, const WeldingConfig& cfg) {
    AnnularTriple T;
    T.outgoing = e.p;
    CircleDiffeo qi = invert(e.q, cfg.modes, cfg);
    T.ingoing = scale_values(qi, std::exp(-e.t));
    T.ingoing.margin = qi.margin;
    return T;
}

NeretinElement from_triple(const AnnularTriple& T, const WeldingConfig& cfg) {
    const int n = cfg.grid, M = cfg.modes;
    const auto outer = sample_circle_map(T.outgoing, n);
    const auto inner = sample_circle_map(T.ingoing, n);
    AnnulusMap R = solve_adaptive(outer, inner, cfg);
    R.rot = -std::arg(R.transported(outer[0])) - std::imag(R.log_factor(outer[0]));
    std::vector<Cpx> ps(n), qs(n);
    const double et = std::exp(R.t);
    for (int j = 0; j < n; ++j) {
        ps[j] = R.map(outer[j]);
        qs[j] = et * R.map(inner[j]);
    }
    CircleDiffeo p = fit_circle_map(ps, M);
    CircleDiffeo q = invert(fit_circle_map(qs, M), M, cfg);
    return renormalize(p, R.t, q, cfg);
}

NeretinElement mobius_element(const MobiusMap& f, int M) {
    if (!strictly_in_mantle(f))
        throw WeldGeometryError("mobius_element: image circle not strictly inside the disk");
    const ExactCircle c = unit_circle_image(f);
    const Cpx m = c.center.to_complex();
    const double r = c.radius();
    const double t = circle_annulus_modulus(m, r);

    const double am = std::abs(m);
    Cpx a(0, 0);
    if (am >= 1e-14) {
        const double B = 1.0 + am * am - r * r;
        const double x = 2.0 * am / (B + std::sqrt(B * B - 4.0 * am * am));
        a = x * (m / am);
    }
    auto T = [&](Cpx z) { return (z - a) / (1.0 - std::conj(a) * z); };
    auto Tinv = [&](Cpx z) { return (z + a) / (1.0 + std::conj(a) * z); };
    const Cpx u = 1.0 / T(1.0);

    const int n = grid_for(M);
    const auto zs = unit_grid(n);
    std::vector<Cpx> ps(n), qs(n);
    const double et = std::exp(t);
    for (int j = 0; j < n; ++j) {
        ps[j] = Tinv(zs[j] / u);
        qs[j] = et * u * T(f.apply(zs[j]));
    }
    WeldingConfig cfg;
    cfg.modes = M;
    return renormalize(fit_circle_map(ps, M), t, fit_circle_map(qs, M), cfg);
}

}  // namespace virlab
