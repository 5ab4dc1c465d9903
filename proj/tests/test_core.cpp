#include <doctest.h>

#include <functional>
#include <vector>

#include "ratdial/engine.hpp"
#include "ratdial/framework.hpp"
#include "ratdial/matrix_io.hpp"

using namespace ratdial;

namespace {

Framework minimal_two_state() {
  Framework fw;
  fw.states = StateSpace{2, {"y", "n"}};
  fw.prior = Measure({Rational(1, 2), Rational(1, 2)});
  fw.event = EventSet(2, {0});
  fw.partition_p = Partition::trivial(2);
  fw.partition_q = Partition::trivial(2);
  return fw;
}

/// All partitions of n states, by restricted-growth strings (local oracle,
/// independent of the library's enumerator).
void each_partition(int n, const std::function<void(const Partition&)>& fn) {
  std::vector<int> rgs(n, 0);
  for (;;) {
    fn(Partition(rgs));
    int i = n - 1;
    for (; i > 0; --i) {
      int cap = 0;
      for (int j = 0; j < i; ++j) cap = std::max(cap, rgs[j]);
      if (rgs[i] <= cap) break;
    }
    if (i <= 0) break;
    ++rgs[i];
    for (int j = i + 1; j < n; ++j) rgs[j] = 0;
  }
}

}  // namespace

TEST_CASE("partition canonical numbering and accessors") {
  Partition part(std::vector<int>{7, 3, 7, 5, 3});
  CHECK(part.cell_count() == 3);
  CHECK(part.cell_of(0) == 0);
  CHECK(part.cell_of(1) == 1);
  CHECK(part.cell_of(2) == 0);
  CHECK(part.cell_of(3) == 2);
  CHECK(part.cell(0) == std::vector<int>{0, 2});
  CHECK(part.cell(1) == std::vector<int>{1, 4});
  CHECK(part == Partition(std::vector<int>{0, 1, 0, 2, 1}));

  CHECK(Partition::trivial(4).cell_count() == 1);
  CHECK(Partition::discrete(4).cell_count() == 4);
  CHECK(Partition::discrete(4).refines(Partition::trivial(4)));
  CHECK_FALSE(Partition::trivial(4).refines(Partition::discrete(4)));

  Partition from = Partition::from_cells(3, {{2}, {0, 1}});
  CHECK(from.cell_of(2) == from.cell_of(2));
  CHECK(from.cell_at(0) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(Partition::from_cells(3, {{0, 1}}), Error);          // no cover
  CHECK_THROWS_AS(Partition::from_cells(3, {{0, 1}, {1, 2}}), Error);  // overlap
  CHECK_THROWS_AS(Partition::from_cells(3, {{0, 1, 2}, {}}), Error);   // empty cell
}

TEST_CASE("validate_framework accepts the minimal instance") {
  CHECK(validate_framework(minimal_two_state()).ok());
}

TEST_CASE("validate_framework names each violated constraint") {
  Framework fw = minimal_two_state();
  fw.prior = Measure({Rational(1, 2), Rational(0)});
  ValidationReport report = validate_framework(fw);
  REQUIRE_FALSE(report.ok());
  bool mentions_positivity = false;
  for (const auto& v : report.violations)
    mentions_positivity |= v.find("prior not strictly positive") != std::string::npos;
  CHECK(mentions_positivity);

  Framework gap = minimal_two_state();
  gap.partition_p = Partition::unchecked({0, -1}, {{0}});
  report = validate_framework(gap);
  REQUIRE_FALSE(report.ok());
  bool mentions_cover = false;
  for (const auto& v : report.violations)
    mentions_cover |= v.find("do not cover") != std::string::npos;
  CHECK(mentions_cover);

  Framework overlap = minimal_two_state();
  overlap.partition_q = Partition::unchecked({0, 0}, {{0, 1}, {1}});
  report = validate_framework(overlap);
  REQUIRE_FALSE(report.ok());
  bool mentions_overlap = false;
  for (const auto& v : report.violations)
    mentions_overlap |= v.find("overlap") != std::string::npos;
  CHECK(mentions_overlap);

  Framework sizes = minimal_two_state();
  sizes.event = EventSet(5);
  report = validate_framework(sizes);
  CHECK_FALSE(report.ok());
}

TEST_CASE("join of a partition with itself and with the trivial partition") {
  Partition x(std::vector<int>{0, 0, 1, 2, 1});
  CHECK(join_partitions(x, x) == x);
  CHECK(join_partitions(Partition::trivial(5), x) == x);
  CHECK(join_partitions(x, Partition::trivial(5)) == x);
  CHECK_THROWS_AS(join_partitions(x, Partition::trivial(4)), Error);
}

TEST_CASE("join is the coarsest common refinement (brute force, small spaces)") {
  for (int n = 1; n <= 4; ++n) {
    std::vector<Partition> all;
    each_partition(n, [&](const Partition& part) { all.push_back(part); });
    for (const Partition& a : all)
      for (const Partition& b : all) {
        Partition j = join_partitions(a, b);
        CHECK(j.refines(a));
        CHECK(j.refines(b));
        for (const Partition& c : all)
          if (c.refines(a) && c.refines(b)) CHECK(c.refines(j));
      }
  }
}

TEST_CASE("join of the example grid's rows and columns is its nonempty cells") {
  auto [fw, anchor] = matrix_to_framework(builtin_fixture("example-5x5"));
  Partition join = join_partitions(fw.partition_p, fw.partition_q);
  // Twelve states in eleven grid cells: only the top-left holds two states.
  CHECK(fw.states.size == 12);
  CHECK(join.cell_count() == 11);
  int with_two = 0;
  for (int c = 0; c < join.cell_count(); ++c) {
    CHECK(join.cell(c).size() <= 2);
    if (join.cell(c).size() == 2) {
      ++with_two;
      CHECK(join.cell_of(anchor) == c);  // the pair is the anchor's cell
    }
  }
  CHECK(with_two == 1);
}

TEST_CASE("drop_null_states removes placeholders and reindexes") {
  // Grid-shaped input: three states, middle one missing mass. The zero
  // state shares both its cells with a surviving state.
  StateSpace states{3, {"a", "z", "b"}};
  Measure mass({Rational(1, 2), Rational(0), Rational(2)});
  EventSet event(3, {0, 1});
  Partition rows(std::vector<int>{0, 0, 1});
  Partition cols(std::vector<int>{0, 0, 1});
  DropResult result = drop_null_states(states, mass, event, rows, cols, Agent::q);
  CHECK(result.framework.states.size == 2);
  CHECK(result.framework.states.labels == std::vector<std::string>{"a", "b"});
  CHECK(result.old_to_new == std::vector<int>{0, -1, 1});
  CHECK(result.framework.prior.mass(0) == Rational(1, 2));
  CHECK(result.framework.prior.mass(1) == Rational(2));
  CHECK(result.framework.event.members() == std::vector<int>{0});
  CHECK(result.framework.opener == Agent::q);
  CHECK(validate_framework(result.framework).ok());

  SUBCASE("all-positive input survives unchanged up to reindexing") {
    Measure positive({Rational(1), Rational(2), Rational(3)});
    DropResult kept = drop_null_states(states, positive, event, rows, cols);
    CHECK(kept.framework.states.size == 3);
    CHECK(kept.old_to_new == std::vector<int>{0, 1, 2});
    CHECK(kept.framework.partition_p == rows);
    CHECK(kept.framework.partition_q == cols);
  }
}

TEST_CASE("drop_null_states rejects a cell losing all its mass") {
  StateSpace states{3, {}};
  Measure mass({Rational(1), Rational(0), Rational(0)});
  EventSet event(3);
  Partition rows(std::vector<int>{0, 1, 1});  // second row entirely zero
  Partition cols = Partition::trivial(3);
  CHECK_THROWS_WITH_AS(drop_null_states(states, mass, event, rows, cols),
                       doctest::Contains("empty cell after drop"), Error);
}

TEST_CASE("drop_null_states rejects zero total mass") {
  StateSpace states{2, {}};
  Measure mass({Rational(0), Rational(0)});
  CHECK_THROWS_WITH_AS(drop_null_states(states, mass, EventSet(2),
                                        Partition::trivial(2), Partition::trivial(2)),
                       doctest::Contains("total mass is zero"), Error);
}

TEST_CASE("the example grid drops to twelve positive-mass states") {
  // The worked matrix carries zero-mass placeholders; counting its nonzero
  // bracket entries row by row gives 3+2+2+2+3.
  auto [fw, anchor] = matrix_to_framework(builtin_fixture("example-5x5"));
  CHECK(fw.states.size == 12);
  CHECK(anchor == 0);
  CHECK(validate_framework(fw).ok());
}

TEST_CASE("normalize_measure rescales to total one") {
  CHECK(normalize_measure(Measure({Rational(1), Rational(1)})).masses() ==
        std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK(normalize_measure(Measure({Rational(3, 4), Rational(1, 4), Rational(2)}))
            .masses() ==
        std::vector<Rational>{Rational(1, 4), Rational(1, 12), Rational(2, 3)});
  CHECK_THROWS_AS(normalize_measure(Measure({Rational(0)})), Error);
}

TEST_CASE("the example grid's total mass is 44/3") {
  // The grid entries sum to 44/3; the prose near the matrix says 13 2/3,
  // but the entries are the ground truth and direct summation decides.
  auto [fw, anchor] = matrix_to_framework(builtin_fixture("example-5x5"));
  CHECK(fw.prior.total() == Rational(44, 3));
  Measure normalized = normalize_measure(fw.prior);
  CHECK(normalized.total() == Rational(1));
  CHECK(normalized.mass(anchor) == Rational(3, 4) / Rational(44, 3));
}

TEST_CASE("normalization does not change any opinion") {
  auto [fw, anchor] = matrix_to_framework(builtin_fixture("example-5x5"));
  Framework scaled = fw;
  scaled.prior = normalize_measure(fw.prior);
  for (int s = 0; s < fw.states.size; ++s) {
    CHECK(opinion(fw, Agent::p, s) == opinion(scaled, Agent::p, s));
    CHECK(opinion(fw, Agent::q, s) == opinion(scaled, Agent::q, s));
  }
}
