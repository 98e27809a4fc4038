#pragma once

#include <iosfwd>

#include "gbs/gaussian_state.hpp"

namespace gbs::oracle {

struct FockRow {
    std::vector<int> pattern;
    double p;
};

/// Exhaustive table of PNR probabilities for a small state.
struct FockTable {
    std::vector<FockRow> rows;
    double mass = 0.0;  // captured probability
    int per_mode_cutoff = 0;
    int total_cutoff = 0;
};

/// Tabulates every pattern with per-mode counts <= per_mode_cutoff and
/// total <= total_cutoff (defaults to m * per_mode_cutoff). Pure
/// zero-mean states use their single-block kernel, |Haf(B_S)|^2, which
/// keeps the matrices at half dimension; anything else goes through the
/// displaced-probability route. Only desk-size instances: m <= 3.
FockTable fock_distribution(const GaussianState& state, int per_mode_cutoff,
                            int total_cutoff = -1);

/// Closed-form single-mode squeezed vacuum: p(2n) = (2n)! / (2^n n!)^2
/// * tanh(r)^(2n) / cosh(r); odd counts have probability 0.
double squeezed_vacuum_pnr(double r, int n);

/// Poisson photon statistics of a coherent state with |alpha|^2 = mean.
double coherent_pnr(double mean, int n);

/// Click-pattern probability by marginalizing a Fock table.
double threshold_marginal(const FockTable& table, const std::vector<int>& clicks);

/// Weighted component sum for (possibly signed) mixtures.
double mixture_prob(const MixtureSpec& mix, const PhotonPattern& s);

/// CSV dump: "pattern,probability" with the pattern space-separated.
void write_csv(const FockTable& table, std::ostream& os);

}  // namespace gbs::oracle
