#include "wzsim/noise.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "wzsim/errors.hpp"

namespace wzsim {
namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Box-Muller over explicit mt19937_64 output, so the increment stream is a
// pure function of the seed (no distribution-object state).
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01(); // in (0, 1]
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform01() {
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53; // [0, 1)
    }
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path_index) {
    return splitmix64(splitmix64(base_seed) ^ splitmix64(path_index));
}

BrownianLattice::BrownianLattice(int r, double T, int m_fine, std::uint64_t seed) {
    if (r < 1) throw ArgumentError("lattice requires at least one channel");
    if (!(T > 0.0)) throw ArgumentError("lattice horizon must be positive");
    if (!is_power_of_two(m_fine)) throw ArgumentError("m_fine must be a power of two");
    r_ = r;
    T_ = T;
    m_fine_ = m_fine;
    seed_ = seed;
    const double sd = std::sqrt(T / m_fine);
    GaussianStream g(seed);
    inc_.resize(static_cast<std::size_t>(r));
    for (auto& channel : inc_) {
        channel.resize(static_cast<std::size_t>(m_fine));
        for (auto& v : channel) v = sd * g.next();
    }
    build_prefix();
}

BrownianLattice BrownianLattice::zero(int r, double T, int m_fine) {
    std::vector<std::vector<double>> inc(static_cast<std::size_t>(r),
                                         std::vector<double>(static_cast<std::size_t>(m_fine), 0.0));
    return from_increments(T, std::move(inc));
}

BrownianLattice BrownianLattice::from_increments(double T,
                                                 std::vector<std::vector<double>> increments) {
    if (increments.empty()) throw ArgumentError("lattice requires at least one channel");
    if (!(T > 0.0)) throw ArgumentError("lattice horizon must be positive");
    const int m_fine = static_cast<int>(increments.front().size());
    if (!is_power_of_two(m_fine)) throw ArgumentError("m_fine must be a power of two");
    for (const auto& c : increments)
        if (static_cast<int>(c.size()) != m_fine)
            throw ArgumentError("channels must have equal length");
    BrownianLattice lat;
    lat.r_ = static_cast<int>(increments.size());
    lat.T_ = T;
    lat.m_fine_ = m_fine;
    lat.seed_ = 0;
    lat.inc_ = std::move(increments);
    lat.build_prefix();
    return lat;
}

void BrownianLattice::build_prefix() {
    prefix_.assign(inc_.size(), {});
    for (std::size_t j = 0; j < inc_.size(); ++j) {
        prefix_[j].resize(inc_[j].size() + 1);
        prefix_[j][0] = 0.0;
        for (std::size_t i = 0; i < inc_[j].size(); ++i)
            prefix_[j][i + 1] = prefix_[j][i] + inc_[j][i];
    }
}

std::span<const double> BrownianLattice::fine_increments(int j) const {
    if (j < 1 || j > r_) throw ArgumentError("channel index out of range");
    const auto& c = inc_[static_cast<std::size_t>(j - 1)];
    return {c.data(), c.size()};
}

std::vector<double> BrownianLattice::coarsen(int j, int m) const {
    if (j < 1 || j > r_) throw ArgumentError("channel index out of range");
    if (m < 1 || m_fine_ % m != 0) throw ArgumentError("m must divide m_fine");
    const auto& fine = inc_[static_cast<std::size_t>(j - 1)];
    const int block = m_fine_ / m;
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int i = 0; i < block; ++i) s += fine[static_cast<std::size_t>(k * block + i)];
        out[static_cast<std::size_t>(k)] = s;
    }
    return out;
}

double BrownianLattice::value_at_node(int j, int fine_node) const {
    if (j < 1 || j > r_) throw ArgumentError("channel index out of range");
    if (fine_node < 0 || fine_node > m_fine_) throw ArgumentError("node index out of range");
    return prefix_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(fine_node)];
}

void BrownianLattice::dump_csv(std::ostream& os) const {
    os << "channel,cell,increment\n";
    os.precision(17);
    for (int j = 0; j < r_; ++j)
        for (int i = 0; i < m_fine_; ++i)
            os << (j + 1) << ',' << i << ','
               << inc_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] << '\n';
}

void BrownianLattice::dump_binary(std::ostream& os) const {
    static_assert(sizeof(double) == 8);
    // host is little-endian on every supported target
    for (int j = 0; j < r_; ++j) {
        const auto& c = inc_[static_cast<std::size_t>(j)];
        os.write(reinterpret_cast<const char*>(c.data()),
                 static_cast<std::streamsize>(c.size() * sizeof(double)));
    }
}

int bracket_index(double t, int m, double T) {
    if (m < 1) throw ArgumentError("bracket: m must be positive");
    if (!(T > 0.0)) throw ArgumentError("bracket: horizon must be positive");
    if (t < 0.0 || t > T) throw ArgumentError("bracket: t outside [0, T]");
    const double delta = T / m;
    int k = static_cast<int>(std::floor(t / delta));
    if (k > m - 1) k = m - 1; // right endpoint convention at t = T
    return k;
}

std::pair<double, double> bracket(double t, int m, double T) {
    const int k = bracket_index(t, m, T);
    const double delta = T / m;
    const double hi = (k == m - 1) ? T : (k + 1) * delta;
    return {k * delta, hi};
}

double polygonal_derivative(const BrownianLattice& lat, int m, int j, double t) {
    if (lat.m_fine() % m != 0) throw ArgumentError("m must divide m_fine");
    if (t >= lat.horizon())
        throw ArgumentError("polygonal derivative defined on [0, T)");
    const int k = bracket_index(t, m, lat.horizon());
    const int block = lat.m_fine() / m;
    const double delta = lat.horizon() / m;
    const double dB = lat.value_at_node(j, (k + 1) * block) - lat.value_at_node(j, k * block);
    return dB / delta;
}

double gaussian_even_moment(double q, double sigma2) {
    if (!(q > 0.0)) throw ArgumentError("gaussian_even_moment: q must be positive");
    if (!(sigma2 > 0.0)) throw ArgumentError("gaussian_even_moment: sigma2 must be positive");
    const double ratio = std::tgamma(q + 0.5) / std::tgamma(0.5);
    return std::pow(2.0, q) * ratio * std::pow(sigma2, q);
}

double sup_derivative_moment(std::span<const BrownianLattice> ensemble, int m, double q) {
    if (ensemble.empty()) throw ArgumentError("sup_derivative_moment: empty ensemble");
    if (!(q > 0.0)) throw ArgumentError("sup_derivative_moment: q must be positive");
    double acc = 0.0;
    std::size_t samples = 0;
    for (const auto& lat : ensemble) {
        if (lat.m_fine() % m != 0) throw ArgumentError("m must divide m_fine");
        const double delta = lat.horizon() / m;
        for (int j = 1; j <= lat.channels(); ++j) {
            const auto coarse = lat.coarsen(j, m);
            double mx = 0.0;
            for (double dB : coarse) {
                const double v = std::fabs(dB / delta);
                if (v > mx) mx = v;
            }
            acc += std::pow(mx, 2.0 * q);
            ++samples;
        }
    }
    return acc / static_cast<double>(samples);
}

} // namespace wzsim
