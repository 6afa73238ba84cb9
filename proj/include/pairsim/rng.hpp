#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pairsim {

// splitmix64 finalizer, used to derive independent stream seeds
inline std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Thin wrapper over mt19937_64. The draws are hand written so that streams are
// identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // open interval (0,1)
    double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // number of failures before the first success, p in (0,1]
    std::uint64_t geometric(double p)
    {
        if (p >= 1.0)
            return 0;
        if (p <= 0.0)
            return UINT64_MAX;
        return geometric_from_log(std::log1p(-p));
    }

    // same draw with log(1-p) supplied by the caller
    std::uint64_t geometric_from_log(double log_q)
    {
        double k = std::floor(std::log(uniform()) / log_q);
        if (k >= 1.8e19)
            return UINT64_MAX;
        return static_cast<std::uint64_t>(k);
    }

    // inversion by sequential search, chunked for large means
    std::uint64_t poisson(double lam)
    {
        std::uint64_t total = 0;
        while (lam > 30.0) {
            total += poisson_small(30.0);
            lam -= 30.0;
        }
        return total + poisson_small(lam);
    }

    friend class PoissonSampler;

  private:
    std::uint64_t poisson_small(double lam)
    {
        if (lam <= 0.0)
            return 0;
        double u = uniform();
        double p = std::exp(-lam);
        double c = p;
        std::uint64_t n = 0;
        while (u > c) {
            ++n;
            p *= lam / static_cast<double>(n);
            c += p;
            if (p == 0.0)
                break; // u landed in the rounding gap of the cdf
        }
        return n;
    }

    std::mt19937_64 eng_;
};

// Poisson draws with a fixed mean; same stream consumption as Rng::poisson
class PoissonSampler {
  public:
    explicit PoissonSampler(double lam = 0.0) : lam_(lam)
    {
        double l = lam;
        while (l > 30.0) {
            ++chunks_;
            l -= 30.0;
        }
        rest_ = l;
        e30_ = std::exp(-30.0);
        erest_ = std::exp(-rest_);
    }

    std::uint64_t operator()(Rng& rng) const
    {
        std::uint64_t total = 0;
        for (unsigned i = 0; i < chunks_; ++i)
            total += draw(rng, 30.0, e30_);
        return total + draw(rng, rest_, erest_);
    }

    double mean() const { return lam_; }

  private:
    static std::uint64_t draw(Rng& rng, double lam, double p0)
    {
        if (lam <= 0.0)
            return 0;
        double u = rng.uniform();
        double p = p0, c = p0;
        std::uint64_t n = 0;
        while (u > c) {
            ++n;
            p *= lam / static_cast<double>(n);
            c += p;
            if (p == 0.0)
                break;
        }
        return n;
    }

    double lam_ = 0.0, rest_ = 0.0, e30_ = 0.0, erest_ = 1.0;
    unsigned chunks_ = 0;
};

} // namespace pairsim
