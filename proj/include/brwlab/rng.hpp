#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "brwlab/common.hpp"

namespace brw {

// Counter-based generator (Threefry-2x64, 20 rounds). Every random decision in
// a simulation is addressed by (seed, trial, generation, site, particle), so
// results do not depend on scheduling or on the order in which lazy vertices
// were first discovered.
struct Threefry2x64 {
  static constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ULL;

  static inline std::uint64_t rotl(std::uint64_t x, int r) {
    return (x << r) | (x >> (64 - r));
  }

  static std::array<std::uint64_t, 2> block(std::array<std::uint64_t, 2> ctr,
                                            std::array<std::uint64_t, 2> key) {
    static constexpr int R[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    std::uint64_t ks[3] = {key[0], key[1], kParity ^ key[0] ^ key[1]};
    std::uint64_t x0 = ctr[0] + ks[0];
    std::uint64_t x1 = ctr[1] + ks[1];
    for (int r = 0; r < 20; ++r) {
      x0 += x1;
      x1 = rotl(x1, R[r % 8]);
      x1 ^= x0;
      if (r % 4 == 3) {
        int s = r / 4 + 1;
        x0 += ks[s % 3];
        x1 += ks[(s + 1) % 3] + static_cast<std::uint64_t>(s);
      }
    }
    return {x0, x1};
  }
};

// One logical stream of uniforms. The counter layout packs generation,
// particle index and a per-particle draw counter; the site identity goes into
// the other counter word as a 64-bit label hash.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t generation,
            std::uint64_t site_key, std::uint64_t particle)
      : key_{seed, trial},
        hi_(site_key),
        base_((generation << 48) | (particle << 16)),
        draw_(0),
        have_(0) {
    if (generation >= (1ULL << 16)) throw DomainError("generation index exceeds stream layout");
    if (particle >= (1ULL << 32)) throw DomainError("particle index exceeds stream layout");
  }

  std::uint64_t next_u64() {
    if (have_ == 0) {
      if (draw_ >= (1ULL << 16)) throw DomainError("per-particle draw budget exhausted");
      buf_ = Threefry2x64::block({hi_, base_ | draw_}, key_);
      ++draw_;
      have_ = 2;
    }
    --have_;
    return buf_[have_];
  }

  // Uniform in [0,1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0,1]; convenient for log transforms.
  double next_unit_pos() { return 1.0 - next_unit(); }

  // Unbiased integer in [0,n).
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw DomainError("next_below(0)");
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  // Failures before the first success, success probability 1/(1+mean).
  // P(k) = (1/(1+mean)) * (mean/(1+mean))^k, so E = mean. Inverse transform.
  std::int64_t next_geometric(double mean) {
    if (mean <= 0.0) return 0;
    double q = mean / (1.0 + mean);
    double u = next_unit_pos();
    double k = std::floor(std::log(u) / std::log(q));
    if (k < 0) k = 0;
    return static_cast<std::int64_t>(k);
  }

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t hi_;
  std::uint64_t base_;
  std::uint64_t draw_;
  std::array<std::uint64_t, 2> buf_{};
  int have_;
};

// Walker/Vose alias table for categorical draws. Built once per site law,
// sampled with exactly two uniforms per draw (keeps draw counts aligned when
// coupled runs share streams).
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(const std::vector<double>& weights) {
    std::size_t n = weights.size();
    if (n == 0) throw DomainError("alias table needs at least one outcome");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0 || !std::isfinite(w)) throw DomainError("alias table weight must be finite and nonnegative");
      total += w;
    }
    if (total <= 0.0) throw DomainError("alias table weights sum to zero");
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;
    std::vector<std::size_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      std::size_t s = small.back();
      small.pop_back();
      std::size_t l = large.back();
      large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (std::size_t i : large) prob_[i] = 1.0;
    for (std::size_t i : small) prob_[i] = 1.0;
  }

  std::size_t size() const { return prob_.size(); }
  bool empty() const { return prob_.empty(); }

  std::size_t sample(RngStream& rng) const {
    std::size_t i = static_cast<std::size_t>(rng.next_below(prob_.size()));
    double u = rng.next_unit();
    return u < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace brw
