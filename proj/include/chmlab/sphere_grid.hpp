#pragma once

// Gauss-Legendre x uniform-azimuth grid on the unit sphere with a real
// spherical-harmonic transform. All derivatives are spectral; no node sits
// on a pole, so coordinate expressions in (theta, phi) stay finite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "chmlab/errors.hpp"
#include "chmlab/quadrature.hpp"

namespace chmlab {

/// Real orthonormal harmonic coefficients, index l^2 + l + m for -l <= m <= l.
/// m > 0 pairs with sqrt(2) cos(m phi), m < 0 with sqrt(2) sin(|m| phi).
class HarmonicCoeffs {
public:
    HarmonicCoeffs() = default;
    explicit HarmonicCoeffs(int lmax) : lmax_(lmax), c_(static_cast<std::size_t>((lmax + 1) * (lmax + 1)), 0.0) {}

    static int index(int l, int m) { return l * l + l + m; }

    int lmax() const { return lmax_; }
    std::size_t size() const { return c_.size(); }
    double& operator()(int l, int m) { return c_[index(l, m)]; }
    double operator()(int l, int m) const { return c_[index(l, m)]; }
    std::vector<double>& data() { return c_; }
    const std::vector<double>& data() const { return c_; }

private:
    int lmax_ = -1;
    std::vector<double> c_;
};

class SphereGrid {
public:
    static constexpr int kMinTheta = 8;
    static constexpr int kMinPhi = 16;

    SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
        if (n_theta < kMinTheta || n_phi < kMinPhi || n_phi < 2 * n_theta) {
            throw UsageError("SphereGrid: need n_theta >= 8, n_phi >= 16 and n_phi >= 2 n_theta");
        }
        lmax_ = n_theta - 1;
        const auto rule = gauss_legendre(n_theta);
        // theta ascending from the north pole: x = cos(theta) descending.
        for (int j = 0; j < n_theta; ++j) {
            const double x = rule.nodes[n_theta - 1 - j];
            x_.push_back(x);
            wx_.push_back(rule.weights[n_theta - 1 - j]);
            theta_.push_back(std::acos(x));
            sin_.push_back(std::sqrt((1.0 - x) * (1.0 + x)));
        }
        dphi_ = 2.0 * std::numbers::pi / n_phi;
        for (int k = 0; k < n_phi; ++k) phi_.push_back(k * dphi_);

        cos_.assign(static_cast<std::size_t>((lmax_ + 1) * n_phi), 0.0);
        sinm_.assign(cos_.size(), 0.0);
        for (int m = 0; m <= lmax_; ++m) {
            for (int k = 0; k < n_phi; ++k) {
                cos_[m * n_phi + k] = std::cos(m * phi_[k]);
                sinm_[m * n_phi + k] = std::sin(m * phi_[k]);
            }
        }

        const std::size_t per_ring = static_cast<std::size_t>((lmax_ + 1) * (lmax_ + 2) / 2);
        lam_.assign(per_ring * n_theta, 0.0);
        dlam_.assign(per_ring * n_theta, 0.0);
        for (int j = 0; j < n_theta; ++j) fill_legendre(j);
    }

    int n_theta() const { return n_theta_; }
    int n_phi() const { return n_phi_; }
    int lmax() const { return lmax_; }
    std::size_t size() const { return static_cast<std::size_t>(n_theta_) * n_phi_; }
    std::size_t node(int j, int k) const { return static_cast<std::size_t>(j) * n_phi_ + k; }

    double cos_theta(int j) const { return x_[j]; }
    double sin_theta(int j) const { return sin_[j]; }
    double theta(int j) const { return theta_[j]; }
    double phi(int k) const { return phi_[k]; }
    /// Quadrature weight of node (j, k) for the unit-sphere area element.
    double weight(int j) const { return wx_[j] * dphi_; }

    /// Normalized associated Legendre value N_lm P_l^m(cos theta_j), m >= 0.
    double legendre(int j, int l, int m) const { return lam_[ring_offset(j) + tri(l, m)]; }
    /// d/dtheta of legendre(j, l, m).
    double legendre_dtheta(int j, int l, int m) const { return dlam_[ring_offset(j) + tri(l, m)]; }
    double cos_m_phi(int m, int k) const { return cos_[m * n_phi_ + k]; }
    double sin_m_phi(int m, int k) const { return sinm_[m * n_phi_ + k]; }

    bool same_shape(const SphereGrid& other) const {
        return n_theta_ == other.n_theta_ && n_phi_ == other.n_phi_;
    }

private:
    static std::size_t tri(int l, int m) { return static_cast<std::size_t>(l * (l + 1) / 2 + m); }
    std::size_t ring_offset(int j) const { return static_cast<std::size_t>(j) * (lmax_ + 1) * (lmax_ + 2) / 2; }

    void fill_legendre(int j) {
        const double x = x_[j], s = sin_[j];
        double* lam = &lam_[ring_offset(j)];
        double* dlam = &dlam_[ring_offset(j)];
        double pmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
        for (int m = 0; m <= lmax_; ++m) {
            if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
            lam[tri(m, m)] = pmm;
            if (m + 1 <= lmax_) lam[tri(m + 1, m)] = x * std::sqrt(2.0 * m + 3.0) * pmm;
            for (int l = m + 2; l <= lmax_; ++l) {
                const double a = std::sqrt((4.0 * l * l - 1.0) / (1.0 * l * l - 1.0 * m * m));
                const double b = std::sqrt(((l - 1.0) * (l - 1.0) - 1.0 * m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
                lam[tri(l, m)] = a * (x * lam[tri(l - 1, m)] - b * lam[tri(l - 2, m)]);
            }
            for (int l = m; l <= lmax_; ++l) {
                const double prev =
                    l > m ? std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (1.0 * l * l - 1.0 * m * m)) * lam[tri(l - 1, m)]
                          : 0.0;
                dlam[tri(l, m)] = (l * x * lam[tri(l, m)] - prev) / s;
            }
        }
    }

    int n_theta_, n_phi_, lmax_;
    double dphi_;
    std::vector<double> x_, wx_, theta_, sin_, phi_;
    std::vector<double> cos_, sinm_;
    std::vector<double> lam_, dlam_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// Validated grid constructor.
inline GridPtr build_grid(int n_theta, int n_phi) { return std::make_shared<const SphereGrid>(n_theta, n_phi); }

/// Node values of a function on a SphereGrid, row-major theta-then-phi.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid, double value = 0.0) : grid_(std::move(grid)), v_(grid_->size(), value) {}
    ScalarField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), v_(std::move(values)) {
        if (v_.size() != grid_->size()) throw UsageError("ScalarField: value count does not match grid");
        for (double x : v_) {
            if (!std::isfinite(x)) throw UsageError("ScalarField: non-finite value");
        }
    }

    template <class F>
    static ScalarField from_function(GridPtr grid, F&& f) {
        ScalarField out(grid);
        for (int j = 0; j < grid->n_theta(); ++j) {
            for (int k = 0; k < grid->n_phi(); ++k) out.v_[grid->node(j, k)] = f(grid->theta(j), grid->phi(k));
        }
        return out;
    }

    const SphereGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    const std::vector<double>& values() const { return v_; }

    void require_same_grid(const ScalarField& other) const {
        if (!grid_ || !other.grid_ || !grid_->same_shape(*other.grid_)) {
            throw UsageError("ScalarField: grid mismatch");
        }
    }

    ScalarField& operator+=(const ScalarField& o) {
        require_same_grid(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    ScalarField& operator*=(double c) {
        for (double& x : v_) x *= c;
        return *this;
    }
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator*(double c, ScalarField a) { return a *= c; }
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b) { return a + (-1.0) * b; }
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
        a.require_same_grid(b);
        ScalarField out(a.grid_);
        for (std::size_t i = 0; i < a.v_.size(); ++i) out.v_[i] = a.v_[i] * b.v_[i];
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    GridPtr grid_;
    std::vector<double> v_;
};

/// Quadrature over the unit sphere; exact for polynomials up to degree 2 n_theta - 1 in cos(theta).
inline double integrate(const ScalarField& f) {
    const auto& g = f.grid();
    double sum = 0.0;
    for (int j = 0; j < g.n_theta(); ++j) {
        double ring = 0.0;
        for (int k = 0; k < g.n_phi(); ++k) ring += f[g.node(j, k)];
        sum += g.weight(j) * ring;
    }
    return sum;
}

inline double integrate(const ScalarField& f, const ScalarField& density) {
    return integrate(f * density);
}

/// Forward transform up to degree lmax (default: the grid's full band).
inline HarmonicCoeffs analyze(const ScalarField& f, int lmax = -1) {
    const auto& g = f.grid();
    if (lmax < 0 || lmax > g.lmax()) lmax = g.lmax();
    HarmonicCoeffs c(lmax);
    const int np = g.n_phi();
    std::vector<double> a(lmax + 1), b(lmax + 1);
    for (int j = 0; j < g.n_theta(); ++j) {
        for (int m = 0; m <= lmax; ++m) {
            double sa = 0.0, sb = 0.0;
            for (int k = 0; k < np; ++k) {
                const double v = f[g.node(j, k)];
                sa += v * g.cos_m_phi(m, k);
                sb += v * g.sin_m_phi(m, k);
            }
            a[m] = sa * g.weight(j);
            b[m] = sb * g.weight(j);
        }
        for (int m = 0; m <= lmax; ++m) {
            const double norm = m == 0 ? 1.0 : std::numbers::sqrt2;
            for (int l = m; l <= lmax; ++l) {
                const double p = norm * g.legendre(j, l, m);
                c(l, m) += p * a[m];
                if (m > 0) c(l, -m) += p * b[m];
            }
        }
    }
    return c;
}

/// Node values and coordinate derivatives of a band-limited field.
/// Subscripts: t = d/dtheta, p = d/dphi.
struct FieldDerivatives {
    std::vector<double> v, t, p, tt, tp, pp, ttp, tpp;
};

inline FieldDerivatives synthesize_derivatives(const HarmonicCoeffs& c, const SphereGrid& g) {
    const int lmax = std::min(c.lmax(), g.lmax());
    const int np = g.n_phi();
    FieldDerivatives d;
    for (auto* vec : {&d.v, &d.t, &d.p, &d.tt, &d.tp, &d.pp, &d.ttp, &d.tpp}) vec->assign(g.size(), 0.0);

    // Per ring and per m: theta-profiles for the cos (C) and sin (S) parts.
    std::vector<double> c0(lmax + 1), c1(lmax + 1), c2(lmax + 1), s0(lmax + 1), s1(lmax + 1), s2(lmax + 1);
    for (int j = 0; j < g.n_theta(); ++j) {
        const double st = g.sin_theta(j), ct = g.cos_theta(j);
        const double cot = ct / st;
        for (int m = 0; m <= lmax; ++m) {
            const double norm = m == 0 ? 1.0 : std::numbers::sqrt2;
            double v0 = 0, v1 = 0, vl = 0, w0 = 0, w1 = 0, wl = 0;
            for (int l = m; l <= lmax; ++l) {
                const double p = norm * g.legendre(j, l, m);
                const double dp = norm * g.legendre_dtheta(j, l, m);
                const double ll = l * (l + 1.0);
                const double cc = c(l, m);
                v0 += cc * p;
                v1 += cc * dp;
                vl += cc * ll * p;
                if (m > 0) {
                    const double cs = c(l, -m);
                    w0 += cs * p;
                    w1 += cs * dp;
                    wl += cs * ll * p;
                }
            }
            // Legendre equation: P'' = -cot P' + (m^2/sin^2 - l(l+1)) P.
            const double m2 = static_cast<double>(m) * m / (st * st);
            c0[m] = v0;
            c1[m] = v1;
            c2[m] = -cot * v1 + m2 * v0 - vl;
            s0[m] = w0;
            s1[m] = w1;
            s2[m] = -cot * w1 + m2 * w0 - wl;
        }
        for (int k = 0; k < np; ++k) {
            const std::size_t n = g.node(j, k);
            double v = 0, t = 0, p = 0, tt = 0, tp = 0, pp = 0, ttp = 0, tpp = 0;
            for (int m = 0; m <= lmax; ++m) {
                const double cm = g.cos_m_phi(m, k), sm = g.sin_m_phi(m, k);
                const double mm = m, m2 = mm * mm;
                v += c0[m] * cm + s0[m] * sm;
                t += c1[m] * cm + s1[m] * sm;
                tt += c2[m] * cm + s2[m] * sm;
                p += mm * (-c0[m] * sm + s0[m] * cm);
                tp += mm * (-c1[m] * sm + s1[m] * cm);
                ttp += mm * (-c2[m] * sm + s2[m] * cm);
                pp += -m2 * (c0[m] * cm + s0[m] * sm);
                tpp += -m2 * (c1[m] * cm + s1[m] * sm);
            }
            d.v[n] = v;
            d.t[n] = t;
            d.p[n] = p;
            d.tt[n] = tt;
            d.tp[n] = tp;
            d.pp[n] = pp;
            d.ttp[n] = ttp;
            d.tpp[n] = tpp;
        }
    }
    return d;
}

/// Coordinate derivatives of a sampled field through its harmonic expansion.
inline FieldDerivatives field_derivatives(const ScalarField& f) {
    return synthesize_derivatives(analyze(f), f.grid());
}

inline ScalarField synthesize(const HarmonicCoeffs& c, const GridPtr& grid) {
    const int lmax = std::min(c.lmax(), grid->lmax());
    ScalarField out(grid);
    const auto& g = *grid;
    std::vector<double> c0(lmax + 1), s0(lmax + 1);
    for (int j = 0; j < g.n_theta(); ++j) {
        for (int m = 0; m <= lmax; ++m) {
            const double norm = m == 0 ? 1.0 : std::numbers::sqrt2;
            double v0 = 0, w0 = 0;
            for (int l = m; l <= lmax; ++l) {
                const double p = norm * g.legendre(j, l, m);
                v0 += c(l, m) * p;
                if (m > 0) w0 += c(l, -m) * p;
            }
            c0[m] = v0;
            s0[m] = w0;
        }
        for (int k = 0; k < g.n_phi(); ++k) {
            double v = 0;
            for (int m = 0; m <= lmax; ++m) v += c0[m] * g.cos_m_phi(m, k) + s0[m] * g.sin_m_phi(m, k);
            out[g.node(j, k)] = v;
        }
    }
    return out;
}

/// Orthonormal real harmonic Y_lm sampled on the grid.
inline ScalarField harmonic_field(const GridPtr& grid, int l, int m) {
    if (l < 0 || std::abs(m) > l || l > grid->lmax()) throw UsageError("harmonic_field: invalid (l, m)");
    HarmonicCoeffs c(l);
    c(l, m) = 1.0;
    return synthesize(c, grid);
}

/// Spectral Laplace-Beltrami operator of the unit sphere.
inline ScalarField laplace_beltrami(const ScalarField& f) {
    auto c = analyze(f);
    for (int l = 0; l <= c.lmax(); ++l) {
        for (int m = -l; m <= l; ++m) c(l, m) *= -l * (l + 1.0);
    }
    return synthesize(c, f.grid_ptr());
}

/// Covariant first and second derivatives of a field on the unit sphere.
struct CovariantDerivatives {
    std::vector<double> grad_norm;  // |grad f|
    std::vector<double> hess_norm;  // Frobenius |Hess f|
};

inline CovariantDerivatives covariant_derivatives(const ScalarField& f) {
    const auto& g = f.grid();
    const auto d = synthesize_derivatives(analyze(f), g);
    CovariantDerivatives out;
    out.grad_norm.assign(g.size(), 0.0);
    out.hess_norm.assign(g.size(), 0.0);
    for (int j = 0; j < g.n_theta(); ++j) {
        const double s = g.sin_theta(j), c = g.cos_theta(j);
        for (int k = 0; k < g.n_phi(); ++k) {
            const std::size_t n = g.node(j, k);
            const double h_tt = d.tt[n];
            const double h_tp = d.tp[n] - c / s * d.p[n];
            const double h_pp = d.pp[n] + s * c * d.t[n];
            out.grad_norm[n] = std::sqrt(d.t[n] * d.t[n] + d.p[n] * d.p[n] / (s * s));
            out.hess_norm[n] =
                std::sqrt(h_tt * h_tt + 2.0 * h_tp * h_tp / (s * s) + h_pp * h_pp / (s * s * s * s));
        }
    }
    return out;
}

/// max over nodes of max(|f|, |grad f|, |Hess f|) on the unit sphere.
inline double c2_norm(const ScalarField& f) {
    const auto cd = covariant_derivatives(f);
    double out = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        out = std::max({out, std::abs(f[i]), cd.grad_norm[i], cd.hess_norm[i]});
    }
    return out;
}

/// SplitMix64 step; also the stream-splitting hash for random fields.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Deterministic standard normal for coefficient (l, m) of stream `seed`:
/// key = splitmix64(splitmix64(seed) ^ (l << 32 | (m + l))), two uniforms via
/// successive splitmix64 of the key, then Box-Muller.
inline double seeded_normal(std::uint64_t seed, int l, int m) {
    const std::uint64_t lm = (static_cast<std::uint64_t>(l) << 32) | static_cast<std::uint64_t>(m + l);
    const std::uint64_t key = splitmix64(splitmix64(seed) ^ lm);
    const std::uint64_t r1 = splitmix64(key), r2 = splitmix64(r1);
    const double u1 = (static_cast<double>(r1 >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(r2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Random harmonic series through degree lmax with (1+l)^-2 decay, rescaled so
/// that c2_norm equals `amplitude`.
inline ScalarField random_c2_field(const GridPtr& grid, std::uint64_t seed, int lmax, double amplitude) {
    if (lmax < 0 || 4 * lmax > grid->n_theta()) throw UsageError("random_c2_field: need lmax <= n_theta/4");
    if (amplitude == 0.0) return ScalarField(grid);
    HarmonicCoeffs c(lmax);
    for (int l = 0; l <= lmax; ++l) {
        for (int m = -l; m <= l; ++m) c(l, m) = seeded_normal(seed, l, m) / ((1.0 + l) * (1.0 + l));
    }
    ScalarField f = synthesize(c, grid);
    const double norm = c2_norm(f);
    return (amplitude / norm) * f;
}

}  // namespace chmlab
