// SPDX-License-Identifier: Apache-2.0
//
// Bandlimited power spectral densities of the fading process: f_H(lambda) on
// [-1/2, 1/2] with bandwidth lambda_D < 1/2 and unit total power, plus the
// L-folded (aliased) spectra driving the interpolation-error integrals.

#pragma once

#include <complex>
#include <string>
#include <vector>

namespace pace {

using cplx = std::complex<double>;

class Spectrum {
  public:
    enum class Shape { rectangular, raised_cosine, tabulated };

    static Spectrum rectangular(double bandwidth);
    static Spectrum raised_cosine(double bandwidth, double rolloff);
    // Nodes must be strictly increasing within [-1/2, 1/2]; densities are
    // renormalized to unit integral (piecewise-linear interpolation).
    static Spectrum tabulated(std::vector<double> lambda, std::vector<double> density);
    // Two-column CSV: lambda,density per line. '#' comments allowed.
    static Spectrum load_csv(const std::string& path);

    Shape shape() const { return shape_; }
    double bandwidth() const { return bandwidth_; }
    double rolloff() const { return rolloff_; }

    int grid_points() const { return grid_points_; }
    void set_grid_points(int n);

    // Pointwise density; the rectangular shape takes its half-value at the
    // exact band edge.
    double density(double lambda) const;
    // One-sided limit as seen from `toward` (a point strictly inside the
    // segment being integrated); equals density() for continuous shapes.
    double density_limit(double lambda, double toward) const;

    // Structural points of the density inside [-1/2, 1/2] (band edges, kink
    // frequencies, table nodes). Quadrature segments split here.
    std::vector<double> breakpoints() const;

    // E[H_{k+m} conj(H_k)] = int e^{i 2 pi m lambda} f(lambda) dlambda.
    cplx autocovariance(int m) const;

    // f_{H_L,ell}(lambda): L-term folding sum with the period-1 extension of
    // f. Requires L >= 1, 0 <= ell < L, |lambda| <= 1/2.
    cplx folded(int L, int ell, double lambda) const;
    cplx folded_limit(int L, int ell, double lambda, double toward) const;
    double folded_base(int L, double lambda) const; // ell = 0; real, >= 0
    double folded_base_limit(int L, double lambda, double toward) const;
    std::vector<double> folded_breakpoints(int L) const;

  private:
    Spectrum() = default;
    double interp_table(double lambda) const;

    Shape shape_ = Shape::rectangular;
    double bandwidth_ = 0.0;
    double rolloff_ = 0.0;
    std::vector<double> tab_lambda_, tab_value_;
    int grid_points_ = 8192;
};

} // namespace pace
