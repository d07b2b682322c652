#include <doctest.h>

#include "generators.hpp"

using namespace modlab::testing;

namespace {

constexpr int kInstances = 1000;

void check(const SuiteOutcome& o) {
  INFO(o.first_failure);
  CHECK(o.instances == kInstances);
  CHECK(o.failures == 0);
}

}  // namespace

TEST_CASE("modulus is monotone under family inclusion") { check(monotone_under_inclusion(101, kInstances)); }

TEST_CASE("minorization: a family with crossing subcurves has no larger modulus") {
  check(minorization_comparison(202, kInstances));
}

TEST_CASE("uniform eta integrates to exactly one") { check(uniform_eta_exact(303, kInstances)); }

TEST_CASE("distortion coefficient is at least one") { check(distortion_at_least_one(404, kInstances)); }
