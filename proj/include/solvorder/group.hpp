#pragma once

#include <atomic>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace solvorder {

using BigInt = boost::multiprecision::cpp_int;
__extension__ typedef unsigned __int128 u128;

/// Element codes are stored inline; larger encodings are rejected at
/// construction time.
inline constexpr unsigned kMaxEncodingBits = 128;
inline constexpr std::size_t kDefaultClosureCap = 1'000'000;

/**
 * Opaque fixed-length bitstring naming one element of a black-box group.
 *
 * Two codes of the same group are equal iff they name the same element.
 * Codes carry their bit length so that malformed strings can be rejected
 * without consulting the group.
 */
class ElementCode {
 public:
  ElementCode() = default;
  ElementCode(u128 value, unsigned bits);

  unsigned bits() const noexcept { return bits_; }
  u128 value() const noexcept { return (static_cast<u128>(hi_) << 64) | lo_; }

  /// Big-endian hex, exactly ceil(bits/4) digits.
  std::string to_hex() const;
  static ElementCode from_hex(std::string_view hex, unsigned bits);

  std::size_t hash() const noexcept;

  friend bool operator==(const ElementCode&, const ElementCode&) = default;
  friend auto operator<=>(const ElementCode&, const ElementCode&) = default;

 private:
  std::uint64_t hi_ = 0;
  std::uint64_t lo_ = 0;
  std::uint32_t bits_ = 0;
};

struct ElementCodeHash {
  std::size_t operator()(const ElementCode& c) const noexcept { return c.hash(); }
};

/// Concrete group law behind the black box. Works on raw n-bit values.
class GroupBackend {
 public:
  virtual ~GroupBackend() = default;
  virtual unsigned encoding_length() const = 0;
  virtual u128 identity() const = 0;
  virtual std::vector<u128> generators() const = 0;
  virtual u128 product(u128 a, u128 b) const = 0;
  virtual u128 inverse(u128 a) const = 0;
  /// Structural validity of a raw value (e.g. a bijection for permutations).
  /// Says nothing about membership in the generated subgroup.
  virtual bool is_valid(u128 a) const = 0;
};

struct QueryCounts {
  std::uint64_t product = 0;
  std::uint64_t inverse = 0;

  std::uint64_t total() const noexcept { return product + inverse; }
  friend bool operator==(const QueryCounts&, const QueryCounts&) = default;
  friend QueryCounts operator-(const QueryCounts& a, const QueryCounts& b) {
    return {a.product - b.product, a.inverse - b.inverse};
  }
};

/**
 * Black-box handle: product and inverse oracles over element codes plus the
 * public input (encoding length, identity, generators).
 *
 * Copies share both the backend and the query counters. Use
 * with_fresh_counters() to get an independently counted view of the same
 * group, e.g. one per protocol party.
 */
class GroupOracle {
 public:
  GroupOracle(std::shared_ptr<const GroupBackend> backend, std::string description);

  unsigned encoding_length() const noexcept { return encoding_length_; }
  const ElementCode& identity() const noexcept { return identity_; }
  const std::vector<ElementCode>& generators() const noexcept { return generators_; }
  const std::string& description() const noexcept { return description_; }

  ElementCode product(const ElementCode& g, const ElementCode& h) const;
  ElementCode inverse(const ElementCode& g) const;

  /// Uncounted syntactic check used when parsing untrusted messages.
  bool is_element_code(const ElementCode& g) const;

  QueryCounts counts() const noexcept;
  GroupOracle with_fresh_counters() const;

 private:
  struct Counters {
    std::atomic<std::uint64_t> product{0};
    std::atomic<std::uint64_t> inverse{0};
  };

  std::shared_ptr<const GroupBackend> backend_;
  std::shared_ptr<Counters> counters_;
  unsigned encoding_length_ = 0;
  ElementCode identity_;
  std::vector<ElementCode> generators_;
  std::string description_;
};

/// g^k by left-to-right square-and-multiply: (bitlen(k)-1) squarings plus
/// (popcount(k)-1) multiplications; k = 0 and k = 1 cost nothing.
ElementCode power(const GroupOracle& group, const ElementCode& g, std::uint64_t k);
ElementCode power(const GroupOracle& group, const ElementCode& g, const BigInt& k);

/// bases[0]^exps[0] * ... * bases[j-1]^exps[j-1]. Zero exponents are skipped
/// and the first nonzero factor seeds the accumulator, so a word with q
/// nonzero exponents spends q-1 products on top of the powers.
ElementCode eval_word(const GroupOracle& group, std::span<const ElementCode> bases,
                      std::span<const std::uint64_t> exps);

class ClosureOverflow : public std::runtime_error {
 public:
  explicit ClosureOverflow(std::size_t cap);
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

/// Fully enumerated finite subgroup with its generators. Element 0 is the
/// identity; the remaining order is the deterministic BFS order.
class Subgroup {
 public:
  explicit Subgroup(ElementCode identity);

  std::size_t size() const noexcept { return elements_.size(); }
  bool contains(const ElementCode& g) const { return index_.contains(g); }
  std::optional<std::size_t> index_of(const ElementCode& g) const;
  const std::vector<ElementCode>& elements() const noexcept { return elements_; }
  const std::vector<ElementCode>& generators() const noexcept { return generators_; }

 private:
  friend Subgroup extend_closure(const GroupOracle&, Subgroup, const ElementCode&, std::size_t);
  bool insert(const ElementCode& g);

  std::vector<ElementCode> elements_;
  std::vector<ElementCode> generators_;
  std::unordered_map<ElementCode, std::size_t, ElementCodeHash> index_;
};

/// Breadth-first closure of gens under right multiplication (a finite
/// monoid closure is a group). Costs |H| products per essential generator.
Subgroup enumerate_closure(const GroupOracle& group, std::span<const ElementCode> gens,
                           std::size_t cap = kDefaultClosureCap);

/// <base, g>. Returns base unchanged (no queries) when g is already a member.
Subgroup extend_closure(const GroupOracle& group, Subgroup base, const ElementCode& g,
                        std::size_t cap = kDefaultClosureCap);

// ---------------------------------------------------------------------------
// Concrete fixtures

struct ConcreteGroupSpec {
  struct Cyclic {
    std::uint64_t order;
  };
  struct Direct {
    std::vector<ConcreteGroupSpec> factors;
  };
  struct Permutation {
    unsigned degree;
    /// Image lists on {0..degree-1}.
    std::vector<std::vector<unsigned>> generators;
  };

  std::variant<Cyclic, Direct, Permutation> variant;
  std::optional<std::uint64_t> relabel_seed;
};

/// Grammar: `cyclic:12`, `direct:cyclic:4,cyclic:3`, `perm:4:(1 2),(1 2 3 4)`,
/// optional trailing `@seed=<u64>`. Direct factors may be wrapped in [...]
/// to nest direct products. Throws std::invalid_argument.
ConcreteGroupSpec parse_group_spec(std::string_view text);
std::string to_string(const ConcreteGroupSpec& spec);

/// Cycle notation on points 1..degree, e.g. "(1 2 3)(4 5)" or "()".
std::vector<unsigned> parse_permutation(unsigned degree, std::string_view cycles);

/// Throws std::invalid_argument on invalid specs (bad permutations,
/// cyclic order 0, encodings wider than kMaxEncodingBits).
GroupOracle make_group(const ConcreteGroupSpec& spec);
GroupOracle make_group(std::string_view spec_text);

/// Canonical (non-relabeled) codes, for tests and fixtures.
ElementCode cyclic_code(std::uint64_t order, std::uint64_t residue);
ElementCode permutation_code(unsigned degree, std::span<const unsigned> images);

}  // namespace solvorder
