#include "doctest.h"
#include "loopsoup/validation.hpp"

using namespace loopsoup;

TEST_CASE("criterion list covers the acceptance suite") {
  CHECK(acceptance_criteria().size() == 13);
  ValidationOptions o;
  CHECK(run_criterion(5, o).status == CriterionStatus::Skipped);
}

TEST_CASE("avoidance criterion passes with the real sampler") {
  ValidationOptions o;
  CHECK(run_criterion(1, o).status == CriterionStatus::Pass);
}

TEST_CASE("avoidance criterion catches a sampler that drops loops") {
  ValidationOptions o;
  o.sampler = [](const SoupParams& p) {
    SoupSample s = sample_soup(p);
    LoopList kept;
    for (std::size_t i = 0; i < s.loops.size(); ++i) {
      if (s.loops.loop(i).size() != 2) kept.add(s.loops.loop(i));
    }
    s.loops = kept;
    return s;
  };
  CHECK(run_criterion(1, o).status == CriterionStatus::Fail);
}

TEST_CASE("only plain failures fail the run") {
  std::vector<CriterionResult> r(2);
  r[0].status = CriterionStatus::Pass;
  r[1].status = CriterionStatus::KnownFailure;
  CHECK(validation_passed(r));
  r[1].status = CriterionStatus::Fail;
  CHECK_FALSE(validation_passed(r));
  CHECK(format_result_line(r[1]).rfind("[FAIL]", 0) == 0);
}
