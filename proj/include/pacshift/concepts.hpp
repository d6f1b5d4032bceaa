#pragma once

// Concepts (Boolean functions on {0,1}^n) and the target-class
// constructions: lazily sampled random functions, the GGM pseudorandom
// family and its first-bit projection, the index-revealing modification and
// the exhaustive class of all functions for tiny n.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pacshift/bits.hpp"
#include "pacshift/core.hpp"
#include "pacshift/prg.hpp"

namespace pacshift {

class Concept {
 public:
  using Evaluator = std::function<bool(std::uint64_t)>;
  // Fills out[i] with the label of xs[i].
  using BatchEvaluator = std::function<void(std::span<const std::uint64_t>, std::span<std::uint8_t>)>;

  Concept(int n, Evaluator eval, BatchEvaluator batch = {})
      : n_(n), eval_(std::move(eval)), batch_(std::move(batch)) {
    require(n >= 1 && n <= kMaxInputBits, "target width must be in [1, 30]");
    require(static_cast<bool>(eval_), "target needs an evaluator");
  }

  static Concept constant(int n, bool bit) {
    return Concept(n, [bit](std::uint64_t) { return bit; });
  }

  static Concept parity(int n) {
    return Concept(n, [](std::uint64_t x) { return (std::popcount(x) & 1) != 0; });
  }

  // Concept whose truth table is `table` (table[x] is the label of x).
  static Concept from_table(int n, std::vector<std::uint8_t> table) {
    require(table.size() == (std::size_t{1} << n), "truth table size must be 2^n");
    auto shared = std::make_shared<const std::vector<std::uint8_t>>(std::move(table));
    return Concept(n, [shared](std::uint64_t x) { return (*shared)[x] != 0; });
  }

  int n() const { return n_; }

  bool operator()(const Input& x) const {
    require(x.n == n_, "input width differs from target width");
    return eval_(x.value);
  }

  // Unchecked evaluation at an integer point of {0, ..., 2^n - 1}.
  bool at(std::uint64_t x) const { return eval_(x); }

  void label(std::span<const std::uint64_t> xs, std::span<std::uint8_t> out) const {
    require(xs.size() == out.size(), "label: size mismatch");
    if (batch_) {
      batch_(xs, out);
      return;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = eval_(xs[i]) ? 1 : 0;
  }

  std::vector<std::uint8_t> truth_table() const {
    require(n_ <= 24, "truth table requested for n > 24");
    std::vector<std::uint64_t> xs(std::size_t{1} << n_);
    std::iota(xs.begin(), xs.end(), std::uint64_t{0});
    std::vector<std::uint8_t> out(xs.size());
    label(xs, out);
    return out;
  }

 private:
  int n_;
  Evaluator eval_;
  BatchEvaluator batch_;
};

/// GGM tree PRF f_key: {0,1}^n -> {0,1}^n. Starting from the key, level u
/// (u = 1..n) replaces the state with G_{x_u}(state), where x_u is bit u-1 of
/// x. The final state is the output. The state width equals n, so the final
/// state is already n bits and no truncation happens.
class GgmPrf {
 public:
  GgmPrf(int n, std::uint64_t key, PrgSpec prg) : n_(n), key_(key), prg_(prg) {
    require(prg.seed_bits == n, "GGM: PRG seed length must equal n");
    require(key <= low_mask(n), "GGM: key does not fit in n bits");
  }

  int n() const { return n_; }
  std::uint64_t key() const { return key_; }
  const PrgSpec& prg() const { return prg_; }

  std::uint64_t operator()(std::uint64_t x) const {
    std::uint64_t state = key_;
    for (int u = 0; u < n_; ++u) {
      const auto [g0, g1] = prg_expand(prg_, state);
      state = ((x >> u) & 1U) ? g1 : g0;
    }
    return state;
  }

  // States visited on the way to x: entry u is the state after u levels.
  std::vector<std::uint64_t> trace(std::uint64_t x) const {
    std::vector<std::uint64_t> states{key_};
    std::uint64_t state = key_;
    for (int u = 0; u < n_; ++u) {
      const auto [g0, g1] = prg_expand(prg_, state);
      state = ((x >> u) & 1U) ? g1 : g0;
      states.push_back(state);
    }
    return states;
  }

  // Evaluates many points, expanding each visited tree node once.
  void evaluate(std::span<const std::uint64_t> xs, std::span<std::uint64_t> out) const {
    require(xs.size() == out.size(), "GGM evaluate: size mismatch");
    std::vector<std::uint32_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0U);
    descend(key_, 0, std::span<std::uint32_t>(order), xs, out);
  }

 private:
  void descend(std::uint64_t state, int level, std::span<std::uint32_t> idx, std::span<const std::uint64_t> xs,
               std::span<std::uint64_t> out) const {
    if (idx.empty()) return;
    if (level == n_) {
      for (auto i : idx) out[i] = state;
      return;
    }
    const auto mid = std::partition(idx.begin(), idx.end(), [&](std::uint32_t i) { return ((xs[i] >> level) & 1U) == 0; });
    const auto split = static_cast<std::size_t>(mid - idx.begin());
    const auto [g0, g1] = prg_expand(prg_, state);
    descend(g0, level + 1, idx.first(split), xs, out);
    descend(g1, level + 1, idx.subspan(split), xs, out);
  }

  int n_;
  std::uint64_t key_;
  PrgSpec prg_;
};

/// Key given as a bit string; key bit u is bit u of the tree's root state.
inline GgmPrf ggm_prf(int n, const Bits& key, const PrgSpec& prg) {
  require(key.size() == static_cast<std::size_t>(prg.seed_bits) && prg.seed_bits == n,
          "GGM: key length, PRG seed length and n must agree");
  return GgmPrf(n, bits_to_word(key), prg);
}

enum class ClassKind { random_function, first_bit, modified, exhaustive };

inline std::string to_string(ClassKind kind) {
  switch (kind) {
    case ClassKind::random_function: return "random_function";
    case ClassKind::first_bit: return "first_bit";
    case ClassKind::modified: return "modified";
    case ClassKind::exhaustive: return "exhaustive";
  }
  return "unknown";
}

/// Indexed family {c^(j)} with j ranging over index_bits-bit integers.
class ConceptClass {
 public:
  using Getter = std::function<Concept(std::uint64_t)>;

  ConceptClass(ClassKind kind, int n, int index_bits, Getter get, std::optional<PrgSpec> prg = std::nullopt,
               std::shared_ptr<const ConceptClass> base = nullptr)
      : kind_(kind), n_(n), index_bits_(index_bits), get_(std::move(get)), prg_(prg), base_(std::move(base)) {
    require(n >= 1 && n <= kMaxInputBits, "class width must be in [1, 30]");
    require(index_bits >= 1 && index_bits <= 64, "index bits must be in [1, 64]");
  }

  ClassKind kind() const { return kind_; }
  int n() const { return n_; }
  int index_bits() const { return index_bits_; }
  const std::optional<PrgSpec>& prg() const { return prg_; }
  const ConceptClass* base() const { return base_.get(); }

  Concept get(std::uint64_t j) const {
    require(j <= low_mask(index_bits_), "target index out of range");
    return get_(j);
  }

  template <class Engine>
  std::uint64_t sample_index(Engine& engine) const {
    return engine() & low_mask(index_bits_);
  }

  std::uint64_t sample_index(const Seed& seed) const {
    auto engine = seed.engine();
    return sample_index(engine);
  }

 private:
  ClassKind kind_;
  int n_;
  int index_bits_;
  Getter get_;
  std::optional<PrgSpec> prg_;
  std::shared_ptr<const ConceptClass> base_;
};

namespace detail {

struct RandomFunctionMemo {
  std::mutex mu;
  std::unordered_map<std::uint64_t, bool> labels;
};

inline bool random_label(std::uint64_t concept_key, std::uint64_t x) {
  return (mix64(concept_key ^ mix64(x ^ 0x3C6EF372FE94F82BULL)) >> 63) != 0;
}

}  // namespace detail

/// Stand-in for the class of all Boolean functions at sizes where a truth
/// table is impractical. Concept id j is a lazily materialized uniform random
/// function: the label of x is a fair coin keyed by (seed, j, x), memoized on
/// first use. Ids are 64-bit sample identifiers, so index_bits is 64.
inline ConceptClass random_function_class(int n, const Seed& seed) {
  require(n >= 1 && n <= kMaxInputBits, "random function class: n must be in [1, 30]");
  auto getter = [n, seed](std::uint64_t j) {
    const std::uint64_t key = seed.derive(j).key();
    auto memo = std::make_shared<detail::RandomFunctionMemo>();
    auto eval = [memo, key](std::uint64_t x) {
      std::scoped_lock lock(memo->mu);
      return memo->labels.try_emplace(x, detail::random_label(key, x)).first->second;
    };
    auto batch = [memo, key](std::span<const std::uint64_t> xs, std::span<std::uint8_t> out) {
      std::scoped_lock lock(memo->mu);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = memo->labels.try_emplace(xs[i], detail::random_label(key, xs[i])).first->second ? 1 : 0;
      }
    };
    return Concept(n, eval, batch);
  };
  return ConceptClass(ClassKind::random_function, n, 64, getter);
}

/// C_n = { x -> first output bit of f_j(x) }, j in {0,1}^n. The first output
/// bit is bit 0 of the output word.
inline ConceptClass first_bit_class(int n, PrgKind kind) {
  require(n >= 1 && n <= kMaxInputBits, "first-bit class: n must be in [1, 30]");
  const PrgSpec prg(kind, n);
  auto getter = [n, prg](std::uint64_t j) {
    const GgmPrf prf(n, j, prg);
    auto eval = [prf](std::uint64_t x) { return (prf(x) & 1U) != 0; };
    auto batch = [prf](std::span<const std::uint64_t> xs, std::span<std::uint8_t> out) {
      std::vector<std::uint64_t> words(xs.size());
      prf.evaluate(xs, words);
      for (std::size_t i = 0; i < xs.size(); ++i) out[i] = static_cast<std::uint8_t>(words[i] & 1U);
    };
    return Concept(n, eval, batch);
  };
  return ConceptClass(ClassKind::first_bit, n, n, getter, prg);
}

/// Overrides target j on the inputs 1..n: input u gets label bit u-1 of j.
/// Every other input keeps the base label.
inline ConceptClass modified_class(const ConceptClass& base) {
  require(base.index_bits() == base.n(), "modified class: base index bits must equal n");
  auto shared = std::make_shared<const ConceptClass>(base);
  const int n = base.n();
  auto getter = [n, shared](std::uint64_t j) {
    const Concept inner = shared->get(j);
    const auto reveals = [n](std::uint64_t x) { return x >= 1 && x <= static_cast<std::uint64_t>(n); };
    auto eval = [inner, j, reveals](std::uint64_t x) {
      if (reveals(x)) return ((j >> (x - 1)) & 1U) != 0;
      return inner.at(x);
    };
    auto batch = [inner, j, reveals](std::span<const std::uint64_t> xs, std::span<std::uint8_t> out) {
      std::vector<std::uint64_t> rest;
      std::vector<std::size_t> where;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (reveals(xs[i])) {
          out[i] = static_cast<std::uint8_t>((j >> (xs[i] - 1)) & 1U);
        } else {
          rest.push_back(xs[i]);
          where.push_back(i);
        }
      }
      std::vector<std::uint8_t> labels(rest.size());
      inner.label(rest, labels);
      for (std::size_t i = 0; i < rest.size(); ++i) out[where[i]] = labels[i];
    };
    return Concept(n, eval, batch);
  };
  return ConceptClass(ClassKind::modified, n, n, getter, base.prg(), shared);
}

/// All 2^(2^n) Boolean functions on n <= 4 bits; target j has truth table j
/// (label of x is bit x of j).
inline ConceptClass exhaustive_class(int n) {
  if (n < 1 || n > 4) throw Unsupported("exhaustive class requires 1 <= n <= 4");
  auto getter = [n](std::uint64_t j) { return Concept(n, [j](std::uint64_t x) { return ((j >> x) & 1U) != 0; }); };
  return ConceptClass(ClassKind::exhaustive, n, 1 << n, getter);
}

}  // namespace pacshift
