#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "dokl/expansion.hpp"
#include "helpers.hpp"

using testutil::expansion1d;
using testutil::vec1;

TEST_CASE("evaluation closed form") {
  const auto f = expansion1d(1.0, {0.0, 1.0}, {0.5, -0.25});
  CHECK(dokl::evaluate(f, vec1(0.2)) ==
        doctest::Approx(0.3085620773849549).epsilon(1e-15));
  const dokl::KernelExpansion zero{f.spec, Eigen::MatrixXd(1, 0),
                                   Eigen::VectorXd(0)};
  CHECK(dokl::evaluate(zero, vec1(0.2)) == 0.0);
}

TEST_CASE("inner product and norm closed forms") {
  const auto f = expansion1d(1.0, {0.0, 1.0}, {1.0, 2.0});
  const auto g = expansion1d(1.0, {0.5}, {-1.0});
  CHECK(dokl::hilbert_inner(f, g) ==
        doctest::Approx(-2.647490707753786).epsilon(1e-15));
  CHECK(dokl::hilbert_norm(f) ==
        doctest::Approx(2.7250913083510673).epsilon(1e-15));
  CHECK(dokl::hilbert_inner(f, g) == dokl::hilbert_inner(g, f));

  auto h = g;
  h.spec.bandwidth = 2.0;  // different space
  CHECK_THROWS_AS(dokl::hilbert_inner(f, h), std::invalid_argument);
}

TEST_CASE("reproducing property") {
  const auto f = expansion1d(0.6, {-0.4, 0.1, 0.9}, {0.3, -1.2, 0.7});
  for (double x : {-1.0, 0.0, 0.33, 2.5}) {
    dokl::KernelExpansion point{f.spec, Eigen::MatrixXd(1, 1),
                                Eigen::VectorXd(1)};
    point.D(0, 0) = x;
    point.w[0] = 1.0;
    CHECK(dokl::hilbert_inner(f, point) ==
          doctest::Approx(dokl::evaluate(f, vec1(x))).epsilon(1e-12));
  }
}

TEST_CASE("difference evaluates pointwise and vanishes on itself") {
  const auto f = expansion1d(0.8, {0.0, 0.5}, {1.0, -0.5});
  const auto g = expansion1d(0.8, {0.2, 0.9}, {0.4, 0.6});
  const auto d = dokl::difference(f, g);
  for (double x : {-0.3, 0.0, 0.41, 1.7}) {
    CHECK(dokl::evaluate(d, vec1(x)) ==
          doctest::Approx(dokl::evaluate(f, vec1(x)) - dokl::evaluate(g, vec1(x)))
              .epsilon(1e-14));
  }
  CHECK(dokl::hilbert_norm(dokl::difference(f, f)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("scale and append are exact parametric operations") {
  const auto f = expansion1d(0.5, {0.1, 0.7}, {2.0, -1.0});
  const auto s = dokl::scale_weights(f, 0.25);
  CHECK(s.w[0] == 0.5);
  CHECK(s.w[1] == -0.25);
  CHECK(s.D == f.D);

  const auto a = dokl::append_atom(f, vec1(0.3), 0.125);
  REQUIRE(a.order() == 3);
  CHECK(a.D(0, 2) == 0.3);
  CHECK(a.w[2] == 0.125);
  CHECK(a.w.head(2) == f.w);
}

TEST_CASE("ball projection") {
  const auto f = expansion1d(1.0, {0.0, 1.0}, {1.0, 2.0});
  const double norm = dokl::hilbert_norm(f);
  REQUIRE(norm > 1.0);

  const auto inside = dokl::ball_project(f, norm + 1.0);
  CHECK(inside.w == f.w);

  const auto projected = dokl::ball_project(f, 1.0);
  CHECK(dokl::hilbert_norm(projected) == doctest::Approx(1.0).epsilon(1e-12));
  // Direction preserved: values scale by radius / norm.
  CHECK(dokl::evaluate(projected, vec1(0.4)) ==
        doctest::Approx(dokl::evaluate(f, vec1(0.4)) / norm).epsilon(1e-12));
  CHECK_THROWS_AS(dokl::ball_project(f, 0.0), std::invalid_argument);
}

TEST_CASE("serialization round trip is bit exact") {
  const auto f = expansion1d(0.37, {0.123456789012345, -2.5, 19.0},
                             {1e-7, 3.141592653589793, -0.5});
  const std::string text = dokl::serialize_string(f);
  const auto g = dokl::deserialize_string(text);
  CHECK(g.spec.bandwidth == f.spec.bandwidth);
  CHECK(g.D == f.D);
  CHECK(g.w == f.w);

  std::stringstream ss;
  dokl::serialize(f, ss);
  const auto h = dokl::deserialize(ss);
  CHECK(h.w == f.w);

  CHECK_THROWS_AS(dokl::deserialize_string(text.substr(0, text.size() / 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(dokl::deserialize_string("definitely not an expansion"),
                  std::invalid_argument);
}

TEST_CASE("validation rejects inconsistent shapes") {
  auto f = expansion1d(1.0, {0.0, 1.0}, {1.0, 2.0});
  f.w.resize(3);
  CHECK_THROWS_AS(dokl::validate(f), std::invalid_argument);

  auto g = expansion1d(0.0, {0.0}, {1.0});
  CHECK_THROWS_AS(dokl::validate(g), std::invalid_argument);

  const auto ok = expansion1d(1.0, {0.0}, {1.0});
  Eigen::VectorXd x2(2);
  x2.setZero();
  CHECK_THROWS_AS(dokl::evaluate(ok, x2), std::invalid_argument);
}
