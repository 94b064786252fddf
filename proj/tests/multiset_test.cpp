#include "distnet/multiset.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <string>

using namespace distnet;

using MS = SignedMultiset<std::string>;

namespace {

MS ms(std::initializer_list<std::pair<std::string, long long>> init) {
  MS a;
  for (const auto& [x, k] : init) a.add(x, k);
  return a;
}

// pointwise oracle over the union of supports
MS pointwise(const MS& a, const MS& b, long long (*op)(long long, long long)) {
  MS r;
  auto keys = a.support();
  for (const auto& k : b.support()) keys.insert(k);
  for (const auto& k : keys) r.set(k, op(a[k], b[k]));
  return r;
}

}  // namespace

TEST(multiset, add_cancels_to_zero_entry) {
  MS a = ms({{"x", -2}, {"y", 3}});
  MS b = ms({{"x", 2}});
  MS sum = a + b;
  EXPECT_EQ(sum, ms({{"y", 3}}));
  EXPECT_FALSE(sum.contains("x"));
  EXPECT_EQ(sum.support_size(), 1u);
}

TEST(multiset, union_is_pointwise_max) {
  MS a = ms({{"x", -2}, {"y", 3}});
  MS b = ms({{"x", 1}});
  EXPECT_EQ(multiset_union(a, b), ms({{"x", 1}, {"y", 3}}));
}

TEST(multiset, intersection_matches_pointwise_min_oracle) {
  MS a = ms({{"x", 2}});
  MS b = ms({{"x", 5}, {"y", 1}});
  MS expect = pointwise(a, b, [](long long p, long long q) { return std::min(p, q); });
  EXPECT_EQ(multiset_intersection(a, b), expect);
  EXPECT_EQ(multiset_intersection(a, b), ms({{"x", 2}}));
}

TEST(multiset, scale) {
  EXPECT_EQ(scale(0, ms({{"x", 7}})), MS{});
  EXPECT_EQ(scale(3, ms({{"x", -1}, {"y", 2}})), ms({{"x", -3}, {"y", 6}}));
  EXPECT_EQ(scale(2, MS{}), MS{});
}

TEST(multiset, restrict) {
  EXPECT_EQ(ms({{"x", 1}, {"y", 2}}).restrict_to({"y"}), ms({{"y", 2}}));
  EXPECT_EQ(MS{}.restrict_to({"x"}), MS{});
  EXPECT_EQ(ms({{"x", -1}}).restrict_to({}), MS{});
}

TEST(multiset, cardinality) {
  EXPECT_EQ(ms({{"x", -2}, {"y", 3}}).cardinality(), 5);
  EXPECT_EQ(MS{}.cardinality(), 0);
  EXPECT_EQ(ms({{"x", 1}}).cardinality(), 1);
}

TEST(multiset, leq) {
  EXPECT_TRUE(leq(ms({{"x", 1}}), ms({{"x", 1}, {"y", 2}})));
  EXPECT_TRUE(leq(ms({{"x", -1}}), MS{}));
  EXPECT_FALSE(leq(ms({{"x", 2}}), ms({{"x", 1}})));
}

TEST(multiset, lift_linear_into_multisets) {
  auto f = [](const std::string&) { return MS::single("p"); };
  EXPECT_EQ(lift(f, ms({{"x", 2}})), ms({{"p", 2}}));
}

TEST(multiset, lift_into_integers) {
  auto f = [](const std::string&) -> long long { return 1; };
  EXPECT_EQ(lift(f, ms({{"x", 3}, {"y", -1}})), 2);
}

TEST(multiset, lift_of_labelling_matches_per_element_sum) {
  // two elements with the same image, lifted over {t:1, u:1}
  auto ell = [](const std::string&) { return MS::single("a"); };
  MS g = ms({{"t", 1}, {"u", 1}});
  MS expect;  // per-element summation oracle
  for (const auto& [x, k] : g) expect = expect + scale(k, ell(x));
  EXPECT_EQ(lift(ell, g), expect);
  EXPECT_EQ(lift(ell, g), ms({{"a", 2}}));
}

TEST(multiset, is_multiset_iff_nonnegative) {
  EXPECT_TRUE(ms({{"x", 2}}).is_multiset());
  EXPECT_TRUE(MS{}.is_multiset());
  EXPECT_FALSE(ms({{"x", -1}, {"y", 2}}).is_multiset());
}

TEST(multiset, extensional_equality_via_canonical_form) {
  MS a = ms({{"x", 1}, {"y", 0}});
  MS b = ms({{"x", 1}});
  EXPECT_EQ(a, b);
  a.set("z", 5);
  a.set("z", 0);
  EXPECT_EQ(a, b);
}

TEST(multiset, overflow_is_an_error) {
  MS a = ms({{"x", std::numeric_limits<long long>::max()}});
  EXPECT_THROW(a + a, OverflowError);
  EXPECT_THROW(scale(2, a), OverflowError);
  EXPECT_THROW(ms({{"x", std::numeric_limits<long long>::min()}}).cardinality(), OverflowError);
}

TEST(multiset, algebraic_properties_randomized) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> val(-4, 4);
  std::uniform_int_distribution<int> keys(0, 4);
  auto gen = [&] {
    MS a;
    int n = keys(rng);
    for (int i = 0; i < n; ++i) a.set("k" + std::to_string(keys(rng)), val(rng));
    return a;
  };
  for (int round = 0; round < 500; ++round) {
    MS a = gen(), b = gen(), c = gen();
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + MS{}, a);
    EXPECT_EQ(a - a, MS{});
    EXPECT_EQ(multiset_union(a, b), multiset_union(b, a));
    EXPECT_EQ(multiset_union(multiset_union(a, b), c), multiset_union(a, multiset_union(b, c)));
    EXPECT_EQ(multiset_intersection(a, b), multiset_intersection(b, a));
    EXPECT_EQ(multiset_intersection(multiset_intersection(a, b), c),
              multiset_intersection(a, multiset_intersection(b, c)));
    long long k = val(rng);
    EXPECT_EQ(scale(k, a + b), scale(k, a) + scale(k, b));
    auto f = [](const std::string& x) { return MS::single(x.substr(0, 1)); };
    EXPECT_EQ(lift(f, a + b), lift(f, a) + lift(f, b));
    EXPECT_EQ(combine(MultisetOp::Add, a, b), a + b);
    EXPECT_EQ(combine(MultisetOp::Subtract, a, b), a - b);
    EXPECT_EQ(combine(MultisetOp::Union, a, b),
              pointwise(a, b, [](long long p, long long q) { return std::max(p, q); }));
    EXPECT_EQ(combine(MultisetOp::Intersect, a, b),
              pointwise(a, b, [](long long p, long long q) { return std::min(p, q); }));
  }
}
