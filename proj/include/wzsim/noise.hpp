#pragma once

// Brownian increment lattice and polygonal-path utilities.
//
// All randomness in the project flows through this module. Paths are sampled
// once on the finest dyadic grid; every coarser resolution is obtained by
// exact block sums of the same increments, so every approximation level sees
// the same underlying path.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace wzsim {

// Stream split for Monte Carlo ensembles: lattice i of a study uses
// path_seed(base_seed, i). splitmix64 is the documented mixing function.
std::uint64_t splitmix64(std::uint64_t z);
std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path_index);

class BrownianLattice {
public:
    // Samples r x m_fine increments ~ N(0, T/m_fine). m_fine must be a power
    // of two. Regeneration from (seed, r, T, m_fine) is bit-identical.
    BrownianLattice(int r, double T, int m_fine, std::uint64_t seed);

    static BrownianLattice zero(int r, double T, int m_fine);
    static BrownianLattice from_increments(double T, std::vector<std::vector<double>> increments);

    int channels() const { return r_; }
    double horizon() const { return T_; }
    int m_fine() const { return m_fine_; }
    std::uint64_t seed() const { return seed_; }

    // Fine increment of channel j (1-based) over fine cell i.
    std::span<const double> fine_increments(int j) const;

    // Exact block sums down to m cells; m must divide m_fine.
    std::vector<double> coarsen(int j, int m) const;

    // B^j(t) on the fine grid by prefix summation (B(0) = 0).
    double value_at_node(int j, int fine_node) const;

    void dump_csv(std::ostream& os) const;
    // Flat little-endian doubles, channel-major; no header.
    void dump_binary(std::ostream& os) const;

private:
    BrownianLattice() = default;
    int r_ = 0;
    double T_ = 0.0;
    int m_fine_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<std::vector<double>> inc_;     // per channel, length m_fine
    std::vector<std::vector<double>> prefix_;  // per channel, length m_fine+1
    void build_prefix();
};

// Cell boundaries ([t]_m^-, [t]_m^+) with delta = T/m. Defined for
// 0 <= t <= T; t = T maps to ((m-1) delta, T) by convention.
std::pair<double, double> bracket(double t, int m, double T);

// Cell index k with k delta <= t < (k+1) delta (t = T -> m-1).
int bracket_index(double t, int m, double T);

// Slope of the polygonal path of channel j at coarse resolution m:
// (B^j([t]^+) - B^j([t]^-)) / delta_m, constant per coarse cell.
double polygonal_derivative(const BrownianLattice& lat, int m, int j, double t);

// E|X|^{2q} for X ~ N(0, sigma2): 2^q Gamma(q + 1/2) / Gamma(1/2) * sigma2^q.
double gaussian_even_moment(double q, double sigma2);

// Monte Carlo estimate of E[ sup_t |Bdot_m|^{2q} ] = E[ max_k |dB_k / delta|^{2q} ],
// averaged over all lattices and channels of the ensemble.
double sup_derivative_moment(std::span<const BrownianLattice> ensemble, int m, double q);

} // namespace wzsim
