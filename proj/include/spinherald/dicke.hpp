#pragma once

// Collective-spin mathematics for symmetric (Dicke) states of N two-level
// atoms: exact rotated marginals of J_z, their variances, and the
// vacuum-admixture mixture model used for finite detection efficiency.

#include <map>
#include <vector>

namespace spinherald {

struct CollectiveSpinSpec {
    int n_atoms = 1;     // N_a
    int excitation = 0;  // number of flipped spins, 0 <= n <= N_a

    void validate() const;
};

// Marginal distribution of J_z over the symmetric subspace.
// support holds the half-integer J_z values m = -J..J (so dN = 2*m).
struct JzDistribution {
    std::vector<double> support;
    std::vector<double> probabilities;

    double mean_jz() const;
};

// Incoherent mixture over excitation numbers with a detection efficiency
// that scales the excitation contribution (vacuum admixture).
struct MixtureSpec {
    std::map<int, double> weights;     // excitation number -> probability
    int n_atoms = 1;
    double detection_efficiency = 1.0; // eta_Q

    void validate() const;
};

inline constexpr int kDefaultExactAtomCap = 4096;

// Exact marginal P(m) = |d^J_{m, J-n}(angle)|^2 computed by a rotation in
// the (N+1)-dimensional symmetric subspace. Rejects n_atoms > exact_cap.
JzDistribution rotated_dicke_distribution(const CollectiveSpinSpec& spec,
                                          double angle,
                                          int exact_cap = kDefaultExactAtomCap);

// Second central moment of dN = 2*J_z.
double jz_variance(const JzDistribution& dist);

// Normalized variance var(dN)/N_a of the mixture in the Holstein-Primakoff
// limit: 1 + 2 * eta_Q * sum_n n * p_n.
double mixture_variance(const MixtureSpec& mix);

// Exact var(dN)/N for a list of atom numbers at fixed excitation and a pi/2
// rotation; converges to 2n+1 for large N.
std::vector<double> hp_limit_check(const std::vector<int>& n_atoms_list,
                                   int excitation,
                                   int exact_cap = kDefaultExactAtomCap);

// Closed form var(dN) = 2*(J(J+1) - (J-n)^2) for the pi/2-rotated state.
double rotated_variance_closed_form(int n_atoms, int excitation);

}  // namespace spinherald
