#include "spinherald/efficiency.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace spinherald {

void BeamGeometry::validate() const {
    if (waist <= 0.0 || pulse_duration <= 0.0 || sigma_x <= 0.0 || sigma_z <= 0.0)
        throw std::invalid_argument("BeamGeometry: lengths and duration must be > 0");
    if (stark_shift_peak < 0.0)
        throw std::invalid_argument("BeamGeometry: stark_shift_peak must be >= 0");
}

void EfficiencyChain::validate() const {
    for (double eta : {eta_noise, eta_mm, eta_phase, eta_ac_stark, eta_scatter})
        if (eta < 0.0 || eta > 1.0)
            throw std::invalid_argument("EfficiencyChain: factors must be in [0,1]");
}

double optical_phase_shift(double alpha0, const std::vector<TransitionLine>& lines) {
    if (alpha0 < 0.0)
        throw std::invalid_argument("optical_phase_shift: alpha0 must be >= 0");
    double sum = 0.0;
    for (const auto& line : lines) {
        if (line.strength < 0.0 || line.linewidth <= 0.0)
            throw std::invalid_argument("optical_phase_shift: invalid transition line");
        const double hw = 0.5 * line.linewidth;
        sum += line.strength * line.detuning /
               (line.detuning * line.detuning + hw * hw);
    }
    return 0.25 * alpha0 * sum;
}

double eta_phase(double chi) {
    if (!std::isfinite(chi))
        throw std::invalid_argument("eta_phase: chi must be finite");
    const double x = 0.5 * chi;
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 3.0;
    const double s = std::sin(x) / x;
    return s * s;
}

namespace {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration on Legendre polynomials, standard Golub-Welsch-free form.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

// One evaluation of the overlap integral on an n x n tensor grid.
double ac_stark_on_grid(const BeamGeometry& g, int n) {
    // Spatial weight rho(x,z) * I(x,z)^2; both Gaussian, so integrate over a
    // box scaled to the decay of the weight, not of the beam.
    const double sxw = 1.0 / std::sqrt(1.0 / (2.0 * g.sigma_x * g.sigma_x) +
                                       4.0 / (g.waist * g.waist));
    const double szw = 1.0 / std::sqrt(1.0 / (2.0 * g.sigma_z * g.sigma_z) +
                                       4.0 / (g.waist * g.waist));
    const double Rx = 6.5 * sxw, Rz = 6.5 * szw;

    std::vector<double> xs, wx;
    gauss_legendre(n, xs, wx);

    std::vector<double> weight(n * n), shift(n * n);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = Rx * xs[i];
        for (int j = 0; j < n; ++j) {
            const double z = Rz * xs[j];
            const double beam = std::exp(-2.0 * (x * x + z * z) / (g.waist * g.waist));
            const double rho = std::exp(-0.5 * x * x / (g.sigma_x * g.sigma_x) -
                                        0.5 * z * z / (g.sigma_z * g.sigma_z));
            const double w = wx[i] * wx[j] * rho * beam * beam;
            weight[i * n + j] = w;
            shift[i * n + j] = g.stark_shift_peak * beam;
            norm += w;
        }
    }

    // Uniform time grid, Simpson rule over [0, tau].
    const int nt = 200;  // tau/200 steps
    const double dt = g.pulse_duration / nt;
    double integral = 0.0;
    for (int k = 0; k <= nt; ++k) {
        const double t = k * dt;
        std::complex<double> G(0.0, 0.0);
        for (size_t m = 0; m < weight.size(); ++m)
            G += weight[m] * std::exp(std::complex<double>(0.0, -shift[m] * t));
        const double val = std::norm(G / norm);
        const double simpson = (k == 0 || k == nt) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        integral += simpson * val;
    }
    integral *= dt / 3.0;
    return integral / g.pulse_duration;
}

}  // namespace

double eta_ac_stark(const BeamGeometry& geom, double rel_tol) {
    geom.validate();
    if (geom.stark_shift_peak == 0.0) return 1.0;
    double prev = ac_stark_on_grid(geom, 17);
    for (int n : {33, 65, 129, 257}) {
        const double cur = ac_stark_on_grid(geom, n);
        if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-30))
            return cur;
        prev = cur;
    }
    throw std::runtime_error("eta_ac_stark: grid refinement did not converge");
}

double scatter_fraction_from_calibration(double n_with_repump,
                                         double n_without_repump,
                                         const std::vector<ScatterChannel>& channels) {
    if (n_with_repump <= 0.0 || n_without_repump < 0.0)
        throw std::invalid_argument("scatter_fraction: counts must be positive");
    if (n_without_repump > n_with_repump)
        throw std::invalid_argument(
            "scatter_fraction: more atoms without repump than with");
    double total = 0.0, detected = 0.0;
    for (const auto& ch : channels) {
        if (ch.fraction < 0.0)
            throw std::invalid_argument("scatter_fraction: negative branching fraction");
        total += ch.fraction;
        if (ch.detected) detected += ch.fraction;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument(
            "scatter_fraction: branching fractions must sum to 1");
    if (n_without_repump == 0.0) return 0.0;
    if (detected <= 0.0)
        throw std::invalid_argument(
            "scatter_fraction: no detectable channel but nonzero counts");
    const double fraction = n_without_repump / n_with_repump / detected;
    if (fraction > 1.0)
        throw std::invalid_argument(
            "scatter_fraction: counts inconsistent with branching table");
    return fraction;
}

double total_efficiency(const EfficiencyChain& chain) {
    chain.validate();
    return chain.eta_noise * chain.eta_mm * chain.eta_phase * chain.eta_ac_stark *
           chain.eta_scatter;
}

}  // namespace spinherald
