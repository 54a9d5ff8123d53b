// SPDX-License-Identifier: Apache-2.0

#include "pace/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pace/quadrature.hpp"

namespace pace {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Wrap to [-1/2, 1/2).
double wrap_half(double u) { return u - std::floor(u + 0.5); }
} // namespace

namespace quad {
std::vector<double> normalize_breakpoints(std::vector<double> pts, double lo, double hi,
                                          double tol) {
    std::vector<double> out;
    out.push_back(lo);
    std::sort(pts.begin(), pts.end());
    for (double p : pts) {
        if (p <= lo + tol || p >= hi - tol) continue;
        if (!out.empty() && p - out.back() < tol) continue;
        out.push_back(p);
    }
    out.push_back(hi);
    return out;
}
} // namespace quad

Spectrum Spectrum::rectangular(double bandwidth) {
    if (!(bandwidth > 0.0 && bandwidth < 0.5))
        throw std::invalid_argument("Spectrum: bandwidth must lie in (0, 1/2)");
    Spectrum s;
    s.shape_ = Shape::rectangular;
    s.bandwidth_ = bandwidth;
    return s;
}

Spectrum Spectrum::raised_cosine(double bandwidth, double rolloff) {
    if (!(bandwidth > 0.0 && bandwidth < 0.5))
        throw std::invalid_argument("Spectrum: bandwidth must lie in (0, 1/2)");
    if (!(rolloff >= 0.0 && rolloff <= 1.0))
        throw std::invalid_argument("Spectrum: rolloff must lie in [0, 1]");
    Spectrum s;
    s.shape_ = Shape::raised_cosine;
    s.bandwidth_ = bandwidth;
    s.rolloff_ = rolloff;
    return s;
}

Spectrum Spectrum::tabulated(std::vector<double> lambda, std::vector<double> density) {
    if (lambda.size() != density.size() || lambda.size() < 3)
        throw std::invalid_argument("Spectrum: table needs >= 3 matching (lambda, density) pairs");
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] < -0.5 || lambda[i] > 0.5)
            throw std::invalid_argument("Spectrum: table lambda outside [-1/2, 1/2]");
        if (i > 0 && !(lambda[i] > lambda[i - 1]))
            throw std::invalid_argument("Spectrum: table lambda must be strictly increasing");
        if (density[i] < 0.0)
            throw std::invalid_argument("Spectrum: table density must be non-negative");
    }
    // Exact integral of the piecewise-linear interpolant; renormalize so user
    // tables with rounding error still give a unit-variance process.
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < lambda.size(); ++i)
        integral += 0.5 * (density[i] + density[i + 1]) * (lambda[i + 1] - lambda[i]);
    if (!(integral > 0.0))
        throw std::invalid_argument("Spectrum: table integrates to zero");
    for (auto& v : density) v /= integral;

    std::size_t lo = 0, hi = lambda.size() - 1;
    while (lo < hi && density[lo] == 0.0 && density[lo + 1] == 0.0) ++lo;
    while (hi > lo && density[hi] == 0.0 && density[hi - 1] == 0.0) --hi;

    Spectrum s;
    s.shape_ = Shape::tabulated;
    s.tab_lambda_.assign(lambda.begin() + lo, lambda.begin() + hi + 1);
    s.tab_value_.assign(density.begin() + lo, density.begin() + hi + 1);
    s.bandwidth_ = std::max(std::abs(s.tab_lambda_.front()), std::abs(s.tab_lambda_.back()));
    if (!(s.bandwidth_ < 0.5)) {
        // Support touching +-1/2 would not be bandlimited in the required sense.
        if (s.tab_value_.front() > 0.0 || s.tab_value_.back() > 0.0)
            throw std::invalid_argument("Spectrum: table support must stay inside (-1/2, 1/2)");
        s.bandwidth_ = std::nexttoward(0.5, 0.0);
    }
    return s;
}

Spectrum Spectrum::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("Spectrum: cannot open " + path);
    std::vector<double> lam, val;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (auto& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ss(line);
        double a, b;
        if (ss >> a >> b) {
            lam.push_back(a);
            val.push_back(b);
        }
    }
    return tabulated(std::move(lam), std::move(val));
}

void Spectrum::set_grid_points(int n) {
    if (n < 16) throw std::invalid_argument("Spectrum: quadrature grid too small");
    grid_points_ = n;
}

double Spectrum::interp_table(double lambda) const {
    if (lambda < tab_lambda_.front() || lambda > tab_lambda_.back()) return 0.0;
    const auto it = std::upper_bound(tab_lambda_.begin(), tab_lambda_.end(), lambda);
    const std::size_t i = it == tab_lambda_.begin() ? 1 : it - tab_lambda_.begin();
    const std::size_t k = std::min(i, tab_lambda_.size() - 1);
    const double x0 = tab_lambda_[k - 1], x1 = tab_lambda_[k];
    const double w = (lambda - x0) / (x1 - x0);
    return (1.0 - w) * tab_value_[k - 1] + w * tab_value_[k];
}

double Spectrum::density(double lambda) const {
    switch (shape_) {
        case Shape::rectangular: {
            const double a = std::abs(lambda);
            const double full = 0.5 / bandwidth_;
            if (a < bandwidth_) return full;
            if (a == bandwidth_) return 0.5 * full; // measure-zero symmetric choice
            return 0.0;
        }
        case Shape::raised_cosine: {
            const double a = std::abs(lambda);
            if (a > bandwidth_) return 0.0;
            const double t_sym = (1.0 + rolloff_) / (2.0 * bandwidth_);
            if (rolloff_ == 0.0) {
                if (a < bandwidth_) return t_sym;
                return 0.5 * t_sym;
            }
            const double flat = bandwidth_ * (1.0 - rolloff_) / (1.0 + rolloff_);
            if (a <= flat) return t_sym;
            return 0.5 * t_sym * (1.0 + std::cos(kPi * t_sym / rolloff_ * (a - flat)));
        }
        case Shape::tabulated:
            return interp_table(lambda);
    }
    return 0.0;
}

double Spectrum::density_limit(double lambda, double toward) const {
    if (shape_ == Shape::rectangular)
        return std::abs(toward) < bandwidth_ ? 0.5 / bandwidth_ : 0.0;
    if (shape_ == Shape::raised_cosine && rolloff_ == 0.0)
        return std::abs(toward) < bandwidth_ ? 0.5 / bandwidth_ : 0.0;
    return density(lambda);
}

std::vector<double> Spectrum::breakpoints() const {
    switch (shape_) {
        case Shape::rectangular:
            return {-bandwidth_, bandwidth_};
        case Shape::raised_cosine: {
            const double flat = bandwidth_ * (1.0 - rolloff_) / (1.0 + rolloff_);
            if (rolloff_ == 0.0 || rolloff_ == 1.0) return {-bandwidth_, bandwidth_};
            return {-bandwidth_, -flat, flat, bandwidth_};
        }
        case Shape::tabulated:
            return tab_lambda_;
    }
    return {};
}

cplx Spectrum::autocovariance(int m) const {
    // c(-m) = conj(c(m)) holds exactly for any real density.
    if (m < 0) return std::conj(autocovariance(-m));
    const auto pts = quad::normalize_breakpoints(breakpoints(), -bandwidth_, bandwidth_);
    const double omega = kTwoPi * m;
    return quad::integrate(
        [&](double x, double toward) -> cplx {
            const double f = density_limit(x, toward);
            return cplx{f * std::cos(omega * x), f * std::sin(omega * x)};
        },
        pts, grid_points_);
}

cplx Spectrum::folded_limit(int L, int ell, double lambda, double toward) const {
    if (L < 1) throw std::invalid_argument("Spectrum::folded: L must be >= 1");
    if (ell < 0 || ell >= L) throw std::invalid_argument("Spectrum::folded: ell out of [0, L)");
    if (std::abs(lambda) > 0.5 + 1e-12)
        throw std::invalid_argument("Spectrum::folded: lambda outside [-1/2, 1/2]");
    cplx acc{0.0, 0.0};
    for (int j = 0; j < L; ++j) {
        const double u = (lambda - j) / L;
        const double ut = (toward - j) / L;
        const double wt = wrap_half(ut);
        const double w = wt + (u - ut); // same branch as the segment interior
        const double f = density_limit(w, wt);
        if (f != 0.0) {
            // Integer period shifts leave the phase unchanged for integer ell.
            const double ph = kTwoPi * ell * u;
            acc += f * cplx{std::cos(ph), std::sin(ph)};
        }
    }
    return acc / static_cast<double>(L);
}

cplx Spectrum::folded(int L, int ell, double lambda) const {
    if (L < 1) throw std::invalid_argument("Spectrum::folded: L must be >= 1");
    if (ell < 0 || ell >= L) throw std::invalid_argument("Spectrum::folded: ell out of [0, L)");
    if (std::abs(lambda) > 0.5 + 1e-12)
        throw std::invalid_argument("Spectrum::folded: lambda outside [-1/2, 1/2]");
    cplx acc{0.0, 0.0};
    for (int j = 0; j < L; ++j) {
        const double u = (lambda - j) / L;
        const double f = density(wrap_half(u));
        if (f != 0.0) {
            const double ph = kTwoPi * ell * u;
            acc += f * cplx{std::cos(ph), std::sin(ph)};
        }
    }
    return acc / static_cast<double>(L);
}

double Spectrum::folded_base(int L, double lambda) const { return folded(L, 0, lambda).real(); }

double Spectrum::folded_base_limit(int L, double lambda, double toward) const {
    return folded_limit(L, 0, lambda, toward).real();
}

std::vector<double> Spectrum::folded_breakpoints(int L) const {
    // Images of the density's structural points under the L-fold map:
    // (lambda - j)/L == e (mod 1)  =>  lambda = j + L(e + p).
    std::vector<double> pts;
    for (double e : breakpoints()) {
        for (int j = 0; j < L; ++j) {
            const double base = j + L * e;
            const int p_lo = static_cast<int>(std::floor((-0.5 - base) / L)) - 1;
            const int p_hi = static_cast<int>(std::ceil((0.5 - base) / L)) + 1;
            for (int p = p_lo; p <= p_hi; ++p) {
                const double x = base + static_cast<double>(L) * p;
                if (x > -0.5 && x < 0.5) pts.push_back(x);
            }
        }
    }
    return quad::normalize_breakpoints(std::move(pts), -0.5, 0.5);
}

} // namespace pace
