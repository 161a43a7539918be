#include "spinherald/dicke.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spinherald {

void CollectiveSpinSpec::validate() const {
    if (n_atoms < 1)
        throw std::invalid_argument("CollectiveSpinSpec: n_atoms must be >= 1");
    if (excitation < 0 || excitation > n_atoms)
        throw std::invalid_argument(
            "CollectiveSpinSpec: excitation must satisfy 0 <= n <= n_atoms");
}

void MixtureSpec::validate() const {
    if (n_atoms < 1) throw std::invalid_argument("MixtureSpec: n_atoms must be >= 1");
    if (detection_efficiency < 0.0 || detection_efficiency > 1.0)
        throw std::invalid_argument("MixtureSpec: detection_efficiency must be in [0,1]");
    double sum = 0.0;
    for (const auto& [n, p] : weights) {
        if (n < 0) throw std::invalid_argument("MixtureSpec: negative excitation number");
        if (p < 0.0) throw std::invalid_argument("MixtureSpec: negative weight");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("MixtureSpec: weights must sum to 1");
}

double JzDistribution::mean_jz() const {
    double m = 0.0;
    for (size_t k = 0; k < support.size(); ++k) m += support[k] * probabilities[k];
    return m;
}

namespace {

// Solve (T - shift*I) x = b for a symmetric tridiagonal T given by diag/off,
// with partial pivoting (the factorization fills in a second superdiagonal).
void shifted_tridiag_solve(const std::vector<double>& diag,
                           const std::vector<double>& off, double shift,
                           std::vector<double>& x) {
    const size_t n = diag.size();
    std::vector<double> d(n), du(n, 0.0), du2(n, 0.0), dl(n, 0.0);
    for (size_t i = 0; i < n; ++i) d[i] = diag[i] - shift;
    for (size_t i = 0; i + 1 < n; ++i) {
        du[i] = off[i];
        dl[i] = off[i];
    }
    // LU with row pivoting, in the style of dgtsv.
    for (size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = 1e-300;
            const double f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            x[i + 1] -= f * x[i];
            dl[i] = 0.0;  // reuse as multiplier slot (unused afterwards)
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            const double tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du2[i] = (i + 2 < n) ? du[i + 1] : 0.0;
            if (i + 2 < n) du[i + 1] = -f * du2[i];
            du[i] = tmp;
            const double xb = x[i];
            x[i] = x[i + 1];
            x[i + 1] = xb - f * x[i + 1];
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = 1e-300;
    // Back substitution.
    x[n - 1] /= d[n - 1];
    if (n >= 2) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (size_t ii = n; ii >= 3; --ii) {
        const size_t i = ii - 3;
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
}

void normalize_inplace(std::vector<double>& v) {
    double nrm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= nrm;
}

}  // namespace

JzDistribution rotated_dicke_distribution(const CollectiveSpinSpec& spec,
                                          double angle, int exact_cap) {
    spec.validate();
    if (!std::isfinite(angle))
        throw std::invalid_argument("rotated_dicke_distribution: angle must be finite");
    if (spec.n_atoms > exact_cap)
        throw std::invalid_argument(
            "rotated_dicke_distribution: n_atoms = " + std::to_string(spec.n_atoms) +
            " exceeds the exact-mode cap of " + std::to_string(exact_cap) +
            " atoms; use the Holstein-Primakoff formulas instead");

    const int N = spec.n_atoms;
    const double J = 0.5 * N;
    const int dim = N + 1;
    const double mp = J - spec.excitation;  // initial J_z eigenvalue

    JzDistribution dist;
    dist.support.resize(dim);
    dist.probabilities.assign(dim, 0.0);
    for (int k = 0; k < dim; ++k) dist.support[k] = k - J;

    const double c = std::cos(angle), s = std::sin(angle);
    if (s == 0.0) {
        // Rotation maps |J,m'> onto |J, +-m'> up to a phase.
        const double target = (c > 0.0) ? mp : -mp;
        for (int k = 0; k < dim; ++k)
            if (std::abs(dist.support[k] - target) < 0.5) dist.probabilities[k] = 1.0;
        return dist;
    }

    // The rotated state is the eigenvector of cos(a) J_z + sin(a) J_x with
    // eigenvalue m' = J - n; the spectrum is m = -J..J independent of the
    // angle, so inverse iteration with a slightly offset shift converges to
    // the unique target eigenvector.
    std::vector<double> diag(dim), off(dim - 1);
    for (int k = 0; k < dim; ++k) diag[k] = (k - J) * c;
    for (int k = 0; k + 1 < dim; ++k) {
        const double m = k - J;
        off[k] = 0.5 * s * std::sqrt(J * (J + 1.0) - m * (m + 1.0));
    }

    const double shift = mp + 1e-9;
    // Start vector must not be orthogonal to the target eigenvector (which
    // has definite parity at angle pi/2), so use a fixed pseudo-random one.
    std::vector<double> v(dim);
    unsigned long long state = 0x9e3779b97f4a7c15ULL;
    for (int k = 0; k < dim; ++k) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        v[k] = 0.5 + static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    normalize_inplace(v);
    for (int it = 0; it < 3; ++it) {
        shifted_tridiag_solve(diag, off, shift, v);
        normalize_inplace(v);
    }

    double sum = 0.0;
    for (int k = 0; k < dim; ++k) {
        dist.probabilities[k] = v[k] * v[k];
        sum += dist.probabilities[k];
    }
    for (double& p : dist.probabilities) p /= sum;
    return dist;
}

double jz_variance(const JzDistribution& dist) {
    const double mean_dn = 2.0 * dist.mean_jz();
    double var = 0.0;
    for (size_t k = 0; k < dist.support.size(); ++k) {
        const double d = 2.0 * dist.support[k] - mean_dn;
        var += d * d * dist.probabilities[k];
    }
    return var;
}

double mixture_variance(const MixtureSpec& mix) {
    mix.validate();
    double mean_n = 0.0;
    for (const auto& [n, p] : mix.weights) mean_n += n * p;
    return 1.0 + 2.0 * mix.detection_efficiency * mean_n;
}

std::vector<double> hp_limit_check(const std::vector<int>& n_atoms_list,
                                   int excitation, int exact_cap) {
    std::vector<double> out;
    out.reserve(n_atoms_list.size());
    for (int N : n_atoms_list) {
        const auto dist = rotated_dicke_distribution({N, excitation}, M_PI / 2.0, exact_cap);
        out.push_back(jz_variance(dist) / N);
    }
    return out;
}

double rotated_variance_closed_form(int n_atoms, int excitation) {
    const double J = 0.5 * n_atoms;
    const double m = J - excitation;
    return 2.0 * (J * (J + 1.0) - m * m);
}

}  // namespace spinherald
