#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace distnet {

struct OverflowError : std::overflow_error {
  OverflowError() : std::overflow_error("multiset multiplicity overflow") {}
};

namespace detail {

inline long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError{};
  return r;
}

inline long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError{};
  return r;
}

}  // namespace detail

// A signed multiset over X: a finitely supported map X -> Z kept in canonical
// form (no entry has multiplicity 0), so equality of the underlying maps is
// extensional equality. Multiplicities are checked machine integers; overflow
// raises OverflowError instead of wrapping.
template <typename X>
class SignedMultiset {
 public:
  using key_type = X;
  using entry_map = std::map<X, long long>;
  using const_iterator = typename entry_map::const_iterator;

  SignedMultiset() = default;

  SignedMultiset(std::initializer_list<std::pair<X, long long>> init) {
    for (const auto& [x, k] : init) add(x, k);
  }

  static SignedMultiset single(X x, long long k = 1) {
    SignedMultiset a;
    a.add(std::move(x), k);
    return a;
  }

  long long operator[](const X& x) const {
    auto it = entries_.find(x);
    return it == entries_.end() ? 0 : it->second;
  }

  bool contains(const X& x) const { return entries_.count(x) != 0; }
  bool empty() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }

  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }

  void set(const X& x, long long k) {
    if (k == 0)
      entries_.erase(x);
    else
      entries_[x] = k;
  }

  void add(const X& x, long long k) {
    if (k == 0) return;
    auto [it, inserted] = entries_.emplace(x, k);
    if (!inserted) {
      it->second = detail::checked_add(it->second, k);
      if (it->second == 0) entries_.erase(it);
    }
  }

  // A signed multiset is a multiset iff all multiplicities are non-negative.
  bool is_multiset() const {
    for (const auto& [x, k] : entries_)
      if (k < 0) return false;
    return true;
  }

  // |A| = sum of absolute multiplicities.
  long long cardinality() const {
    long long total = 0;
    for (const auto& [x, k] : entries_)
      total = detail::checked_add(total, k < 0 ? detail::checked_mul(k, -1) : k);
    return total;
  }

  std::set<X> support() const {
    std::set<X> s;
    for (const auto& [x, k] : entries_) s.insert(x);
    return s;
  }

  SignedMultiset restrict_to(const std::set<X>& domain) const {
    SignedMultiset a;
    for (const auto& [x, k] : entries_)
      if (domain.count(x)) a.entries_.emplace(x, k);
    return a;
  }

  template <typename Pred>
  SignedMultiset filter(Pred keep) const {
    SignedMultiset a;
    for (const auto& [x, k] : entries_)
      if (keep(x)) a.entries_.emplace(x, k);
    return a;
  }

  friend bool operator==(const SignedMultiset& a, const SignedMultiset& b) {
    return a.entries_ == b.entries_;
  }
  friend bool operator!=(const SignedMultiset& a, const SignedMultiset& b) {
    return !(a == b);
  }
  // Arbitrary total order (entry-lexicographic); lets multisets key maps/sets.
  friend bool operator<(const SignedMultiset& a, const SignedMultiset& b) {
    return a.entries_ < b.entries_;
  }

  friend SignedMultiset operator+(const SignedMultiset& a, const SignedMultiset& b) {
    SignedMultiset r = a;
    for (const auto& [x, k] : b.entries_) r.add(x, k);
    return r;
  }

  friend SignedMultiset operator-(const SignedMultiset& a, const SignedMultiset& b) {
    SignedMultiset r = a;
    for (const auto& [x, k] : b.entries_) r.add(x, detail::checked_mul(k, -1));
    return r;
  }

  // Pointwise A(x) <= B(x) over the union of supports.
  friend bool leq(const SignedMultiset& a, const SignedMultiset& b) {
    for (const auto& [x, k] : a.entries_)
      if (k > b[x]) return false;
    for (const auto& [x, k] : b.entries_)
      if (k < 0 && !a.contains(x)) return false;
    return true;
  }

  std::string to_string() const {
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (const auto& [x, k] : entries_) {
      if (!first) out << ',';
      first = false;
      out << x;
      if (k != 1) out << ':' << k;
    }
    out << '}';
    return out.str();
  }

 private:
  entry_map entries_;
};

// k*A, pointwise. k is a non-negative scalar in the net semantics but the
// arithmetic is defined for any integer.
template <typename X>
SignedMultiset<X> scale(long long k, const SignedMultiset<X>& a) {
  SignedMultiset<X> r;
  if (k == 0) return r;
  for (const auto& [x, m] : a) r.add(x, detail::checked_mul(k, m));
  return r;
}

// Pointwise maximum.
template <typename X>
SignedMultiset<X> multiset_union(const SignedMultiset<X>& a, const SignedMultiset<X>& b) {
  SignedMultiset<X> r;
  for (const auto& [x, k] : a) r.set(x, std::max(k, b[x]));
  for (const auto& [x, k] : b)
    if (!a.contains(x)) r.set(x, std::max(0LL, k));
  return r;
}

// Pointwise minimum.
template <typename X>
SignedMultiset<X> multiset_intersection(const SignedMultiset<X>& a,
                                        const SignedMultiset<X>& b) {
  SignedMultiset<X> r;
  for (const auto& [x, k] : a) r.set(x, std::min(k, b[x]));
  for (const auto& [x, k] : b)
    if (!a.contains(x)) r.set(x, std::min(0LL, k));
  return r;
}

enum class MultisetOp { Add, Subtract, Union, Intersect };

template <typename X>
SignedMultiset<X> combine(MultisetOp op, const SignedMultiset<X>& a,
                          const SignedMultiset<X>& b) {
  switch (op) {
    case MultisetOp::Add: return a + b;
    case MultisetOp::Subtract: return a - b;
    case MultisetOp::Union: return multiset_union(a, b);
    case MultisetOp::Intersect: return multiset_intersection(a, b);
  }
  throw std::logic_error("bad MultisetOp");
}

// Linear extension of f to finite signed multisets: sum over x of A(x)*f(x).
// f may map into integers or into signed multisets over another domain.
template <typename X, typename F>
auto lift(F&& f, const SignedMultiset<X>& a) {
  using R = std::invoke_result_t<F, const X&>;
  if constexpr (std::is_integral_v<R>) {
    long long total = 0;
    for (const auto& [x, k] : a)
      total = detail::checked_add(total, detail::checked_mul(k, f(x)));
    return total;
  } else {
    R total;
    for (const auto& [x, k] : a) total = total + scale(k, f(x));
    return total;
  }
}

}  // namespace distnet
