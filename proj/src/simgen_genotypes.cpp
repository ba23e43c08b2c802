#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "rfdm/error.hpp"
#include "rfdm/simgen.hpp"

namespace rfdm::sim {

void PopulationConfig::validate() const {
  auto rate = [](double r, const char* what) {
    if (!(r >= 0.0 && r <= 1.0)) throw DataError(std::string(what) + " must be in [0, 1]");
  };
  rate(recomb_rate, "recomb_rate");
  rate(mutation_rate, "mutation_rate");
  rate(founder_ld_strength, "founder_ld_strength");
  if (n_founders < 1) throw DataError("n_founders must be positive");
  if (final_size < n_founders) throw DataError("final_size must be at least n_founders");
  if (n_loci < 1) throw DataError("n_loci must be positive");
  if (founder_ld_block < 1) throw DataError("founder_ld_block must be positive");
  if (!(founder_maf_low >= 0.0 && founder_maf_low <= founder_maf_high && founder_maf_high <= 1.0)) {
    throw DataError("founder MAF range must satisfy 0 <= low <= high <= 1");
  }
}

HaplotypePool founder_pool(const PopulationConfig& c, Rng rng) {
  c.validate();
  HaplotypePool pool;
  pool.n_individuals = c.n_founders;
  pool.n_loci = c.n_loci;
  pool.alleles.assign(2 * c.n_founders * c.n_loci, 0);
  const std::size_t n_blocks = (c.n_loci + c.founder_ld_block - 1) / c.founder_ld_block;
  std::vector<double> freq(n_blocks);
  for (double& f : freq) f = rng.uniform(c.founder_maf_low, c.founder_maf_high);
  for (std::size_t h = 0; h < 2 * c.n_founders; ++h) {
    std::uint8_t* hap = pool.alleles.data() + h * c.n_loci;
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const auto latent = static_cast<std::uint8_t>(rng.bernoulli(freq[b]));
      const std::size_t end = std::min(c.n_loci, (b + 1) * c.founder_ld_block);
      for (std::size_t l = b * c.founder_ld_block; l < end; ++l) {
        hap[l] = rng.bernoulli(c.founder_ld_strength) ? latent
                                                      : static_cast<std::uint8_t>(rng.bernoulli(freq[b]));
      }
    }
  }
  return pool;
}

std::size_t generation_size(const PopulationConfig& c, std::size_t g) {
  if (c.n_generations == 0 || g == 0) return c.n_founders;
  if (g >= c.n_generations) return c.final_size;
  const double ratio = static_cast<double>(c.final_size) / static_cast<double>(c.n_founders);
  const double size = static_cast<double>(c.n_founders) *
                      std::pow(ratio, static_cast<double>(g) / static_cast<double>(c.n_generations));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(size)), c.n_founders, c.final_size);
}

namespace {

// One recombinant gamete of `parent` with mutations, written to `out`.
void make_gamete(const HaplotypePool& prev, std::size_t parent, double recomb, double mu, Rng& rng,
                 std::uint8_t* out) {
  const std::size_t L = prev.n_loci;
  std::size_t strand = rng.bernoulli(0.5) ? 1 : 0;
  std::size_t l = 0;
  while (l < L) {
    // Crossovers fall in the L - 1 intervals between adjacent loci.
    const std::uint64_t gap = rng.geometric_gap(recomb);
    const std::size_t stop = gap >= L - l ? L : l + static_cast<std::size_t>(gap) + 1;
    const std::uint8_t* src = prev.alleles.data() + (2 * parent + strand) * L;
    std::copy(src + l, src + stop, out + l);
    l = stop;
    strand ^= 1;
  }
  if (mu > 0.0) {
    std::size_t m = 0;
    while (true) {
      const std::uint64_t gap = rng.geometric_gap(mu);
      if (gap >= L - m) break;
      m += static_cast<std::size_t>(gap);
      out[m] ^= 1;
      ++m;
      if (m >= L) break;
    }
  }
}

}  // namespace

HaplotypePool evolve(const HaplotypePool& founders, const PopulationConfig& c, Rng rng, Execution exec) {
  c.validate();
  if (founders.n_loci != c.n_loci) throw DataError("founder pool locus count does not match config");
  HaplotypePool prev = founders;
  for (std::size_t g = 1; g <= c.n_generations; ++g) {
    const std::size_t size = generation_size(c, g);
    HaplotypePool next;
    next.n_individuals = size;
    next.n_loci = c.n_loci;
    next.alleles.assign(2 * size * c.n_loci, 0);
    const Rng gen = rng.substream(g);
    const auto n = static_cast<std::ptrdiff_t>(size);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      Rng o = gen.substream(static_cast<std::uint64_t>(k));
      const std::size_t mother = o.below(prev.n_individuals);
      const std::size_t father = o.below(prev.n_individuals);
      std::uint8_t* base = next.alleles.data() + 2 * static_cast<std::size_t>(k) * c.n_loci;
      make_gamete(prev, mother, c.recomb_rate, c.mutation_rate, o, base);
      make_gamete(prev, father, c.recomb_rate, c.mutation_rate, o, base + c.n_loci);
    }
    prev = std::move(next);
  }
  return prev;
}

std::vector<double> allele_frequencies(const HaplotypePool& pool) {
  std::vector<double> f(pool.n_loci, 0.0);
  std::vector<std::size_t> count(pool.n_loci, 0);
  for (std::size_t h = 0; h < 2 * pool.n_individuals; ++h) {
    const std::uint8_t* hap = pool.alleles.data() + h * pool.n_loci;
    for (std::size_t l = 0; l < pool.n_loci; ++l) count[l] += hap[l];
  }
  const double total = 2.0 * static_cast<double>(pool.n_individuals);
  for (std::size_t l = 0; l < pool.n_loci; ++l) f[l] = static_cast<double>(count[l]) / total;
  return f;
}

SimulatedGenotypes to_genotypes(const HaplotypePool& pool) {
  const std::vector<double> f = allele_frequencies(pool);
  const std::size_t n = pool.n_individuals;
  const std::size_t L = pool.n_loci;
  std::vector<std::uint8_t> values(n * L);
  std::vector<double> maf(L);
  for (std::size_t l = 0; l < L; ++l) {
    const bool flip = f[l] > 0.5;
    maf[l] = flip ? 1.0 - f[l] : f[l];
    for (std::size_t i = 0; i < n; ++i) {
      const int dose = pool.allele(i, 0, l) + pool.allele(i, 1, l);
      values[l * n + i] = static_cast<std::uint8_t>(flip ? 2 - dose : dose);
    }
  }
  std::vector<std::string> snp_ids, subject_ids;
  for (std::size_t l = 0; l < L; ++l) snp_ids.push_back("rs" + std::to_string(l + 1));
  for (std::size_t i = 0; i < n; ++i) subject_ids.push_back("ind" + std::to_string(i + 1));
  return {GenotypeMatrix(n, L, std::move(values), std::move(snp_ids), std::move(subject_ids)), std::move(maf)};
}

SimulatedGenotypes simulate_genotypes(const PopulationConfig& c, Execution exec) {
  const Rng master(c.seed);
  const HaplotypePool founders = founder_pool(c, master.substream(kStreamFounders));
  return to_genotypes(evolve(founders, c, master.substream(kStreamEvolution), exec));
}

namespace {

std::vector<std::size_t> choose(std::vector<std::size_t> pool, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::vector<std::size_t> eligible(std::span<const double> maf, MafWindow w,
                                  const std::vector<char>& taken) {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < maf.size(); ++l) {
    if (!taken[l] && maf[l] > w.low && maf[l] < w.high) out.push_back(l);
  }
  return out;
}

}  // namespace

SnpSets select_snp_sets(std::span<const double> maf, Rng rng, std::size_t set_size, MafWindow causal,
                        MafWindow spurious, double widen_step) {
  if (set_size == 0) throw DataError("set_size must be positive");
  if (!(widen_step > 0.0)) throw DataError("widen_step must be positive");
  SnpSets sets;
  std::vector<char> taken(maf.size(), 0);
  auto pick = [&](MafWindow w, std::vector<std::size_t>& out, MafWindow& used) {
    auto pool = eligible(maf, w, taken);
    while (pool.size() < set_size) {
      if (w.low <= 0.0 && w.high > 0.5) {
        throw DataError("only " + std::to_string(pool.size()) + " loci qualify for a SNP set of " +
                        std::to_string(set_size) + " even with the widest MAF window");
      }
      w.low = std::max(0.0, w.low - widen_step);
      w.high = std::min(0.5 + widen_step, w.high + widen_step);
      ++sets.widening_steps;
      pool = eligible(maf, w, taken);
    }
    out = choose(std::move(pool), set_size, rng);
    for (std::size_t l : out) taken[l] = 1;
    used = w;
  };
  pick(causal, sets.causal, sets.causal_window);
  pick(spurious, sets.spurious, sets.spurious_window);
  return sets;
}

}  // namespace rfdm::sim
