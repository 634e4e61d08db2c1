#include "ultra/vertexset.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>

using namespace ultra;

namespace {

std::set<Index> members(const VertexSet& s, Index n) {
  auto v = s.enumerate_up_to(n);
  return {v.begin(), v.end()};
}

} // namespace

TEST_CASE("canonicalize absorbs explicit members covered by the tail") {
  VertexSet s = VertexSet::canonicalize({5}, 3, {true});
  CHECK(s.explicit_part().empty());
  CHECK(s.threshold() == 3);
  CHECK(s.pattern() == std::vector<bool>{true});
  CHECK(s == VertexSet::tail(3));
}

TEST_CASE("finite sets are already canonical") {
  VertexSet s = VertexSet::canonicalize({1, 2}, 3, {false});
  CHECK(s.explicit_part() == std::set<Index>{1, 2});
  CHECK(s.threshold() == 3);
  CHECK(s.period() == 1);
  CHECK(s.is_finite());
}

TEST_CASE("canonical form is extensional: even tail plus 2") {
  // {2} with bits [0,1] from 4 means {2, 5, 7, ...}; bits [1,0] from 4 means {2, 4, 6, ...}
  VertexSet evens = VertexSet::canonicalize({2}, 4, {true, false});
  std::set<Index> expect;
  for (Index j = 2; j <= 50; j += 2)
    expect.insert(j);
  CHECK(members(evens, 50) == expect);
  CHECK(evens == VertexSet::progression(2, 2));
  VertexSet shifted = VertexSet::canonicalize({2}, 4, {false, true});
  CHECK(shifted.contains(5));
  CHECK_FALSE(shifted.contains(4));
  CHECK(shifted != evens);
}

TEST_CASE("canonicalize rejects index 0") {
  CHECK_THROWS_AS(VertexSet::canonicalize({0}, 3, {false}), std::invalid_argument);
  CHECK_THROWS(VertexSet::canonicalize({1}, 3, {}));
}

TEST_CASE("set operations") {
  CHECK(intersect(VertexSet::tail(2), VertexSet::singleton(1)).empty());
  VertexSet a = VertexSet::finite({1, 4, 9});
  CHECK(intersect(a, a) == a);
  VertexSet odds = VertexSet::progression(1, 2);
  VertexSet evens = difference(VertexSet::tail(1), odds);
  CHECK(evens == VertexSet::progression(2, 2));
  CHECK(evens.enumerate_up_to(7) == std::vector<Index>{2, 4, 6});
  CHECK_FALSE(VertexSet::tail(2).contains(1));
  CHECK(VertexSet::finite({1, 2}).is_finite());
  CHECK_FALSE(odds.is_finite());
}

TEST_CASE("primed and unprimed operands do not mix") {
  VertexSet a = VertexSet::singleton(1);
  CHECK_THROWS_AS(set_union(a, a.as_primed()), std::invalid_argument);
  CHECK_THROWS_AS(intersect(a, a.as_primed()), std::invalid_argument);
  CHECK(set_union(a.as_primed(), VertexSet::singleton(3).as_primed()) ==
        VertexSet::finite({1, 3}, true));
}

TEST_CASE("text form round-trips") {
  for (const char* text : {"{}", "{1,2}", "tail(2)", "tail(1;period=2,bits=10)", "primed({1})"}) {
    CAPTURE(text);
    VertexSet s = VertexSet::parse(text);
    CHECK(VertexSet::parse(s.to_string()) == s);
  }
  CHECK(VertexSet::parse("tail(1;period=2,bits=10)") == VertexSet::progression(1, 2));
  CHECK(VertexSet::parse("tail(2)") == VertexSet::tail(2));
  CHECK_THROWS(VertexSet::parse("tail("));
  CHECK_THROWS(VertexSet::parse("{0}"));
}

TEST_CASE("EXSet keeps the two parts apart") {
  EXSet z(VertexSet::singleton(1), VertexSet::singleton(1).as_primed());
  CHECK(z.unprimed == VertexSet::singleton(1));
  CHECK(z.primed.primed());
  CHECK(EXSet::parse(z.to_string()) == z);
  EXSet w(VertexSet::finite({1, 2}));
  CHECK(intersect(z, w) == EXSet(VertexSet::singleton(1)));
  CHECK(difference(z, w) == EXSet(VertexSet(), VertexSet::singleton(1).as_primed()));
}

TEST_CASE("difference then union with the intersection rebuilds the set") {
  std::mt19937_64 rng(11);
  auto random_set = [&] {
    std::uniform_int_distribution<Index> thr(1, 8), per(1, 4), bit(0, 1);
    Index t = thr(rng);
    std::set<Index> ex;
    for (Index j = 1; j < t; ++j)
      if (bit(rng))
        ex.insert(j);
    std::vector<bool> pat(per(rng));
    for (std::size_t k = 0; k < pat.size(); ++k)
      pat[k] = bit(rng);
    return VertexSet::canonicalize(ex, t, pat);
  };
  for (int k = 0; k < 100; ++k) {
    VertexSet a = random_set(), b = random_set();
    CHECK(set_union(difference(a, b), intersect(a, b)) == a);
    VertexSet c = VertexSet::canonicalize(a.explicit_part(), a.threshold(), a.pattern());
    CHECK(c == a);
  }
}
