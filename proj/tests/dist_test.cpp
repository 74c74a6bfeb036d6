#include <gtest/gtest.h>

#include <cmath>

#include "oracle/oracle.hpp"
#include "tpfr/dist.hpp"
#include "tpfr/entropy.hpp"
#include "tpfr/errors.hpp"
#include "tpfr/random.hpp"
#include "tpfr/rational.hpp"
#include "tpfr/ruzsa.hpp"

using namespace tpfr;

namespace {

GroupSpec Z(std::initializer_list<std::int64_t> o) { return GroupSpec(std::vector<std::int64_t>(o)); }

const GroupSpec kZ4 = Z({4});
const Dist kU01 = uniform_on(kZ4, {0, 1});

}  // namespace

TEST(Rational, FormatAndParse) {
  EXPECT_EQ(format_rational(mpq_class(6, 8)), "3/4");
  EXPECT_EQ(format_rational(mpq_class(2)), "2");
  EXPECT_EQ(parse_rational("3/12"), mpq_class(1, 4));
  EXPECT_EQ(parse_rational("-5"), mpq_class(-5));
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("1/x"), Error);
  EXPECT_THROW(parse_rational(""), Error);
  EXPECT_NEAR(log_ratio(mpz_class(1), mpz_class(4)), -std::log(4.0), 1e-15);
}

TEST(Dist, Constructors) {
  const Dist u = uniform_on(Z({2}), {0, 1});
  EXPECT_EQ(u.prob(0), mpq_class(1, 2));
  EXPECT_EQ(u.prob(1), mpq_class(1, 2));
  const Dist p = point_mass(kZ4, 3);
  EXPECT_EQ(p.prob(3), 1);
  EXPECT_EQ(p.support(), ElementSet{3});
  EXPECT_EQ(kU01.prob(2), 0);
  EXPECT_THROW(uniform_on(kZ4, {}), ShapeError);
  EXPECT_THROW(Dist::from_probabilities(kZ4, {{0, mpq_class(1, 2)}}), ShapeError);
  EXPECT_THROW(Dist::from_probabilities(kZ4, {{0, mpq_class(1)}, {1, mpq_class(0)}}), ShapeError);
  EXPECT_EQ(Dist::from_probabilities(kZ4, {{0, mpq_class(1, 2)}, {1, mpq_class(1, 2)}}), kU01);
}

TEST(Dist, Convolution) {
  const Dist s = convolve(kU01, kU01);
  EXPECT_EQ(s.prob(0), mpq_class(1, 4));
  EXPECT_EQ(s.prob(1), mpq_class(1, 2));
  EXPECT_EQ(s.prob(2), mpq_class(1, 4));
  EXPECT_EQ(convolve(point_mass(kZ4, 1), point_mass(kZ4, 2)), point_mass(kZ4, 3));
  const Dist h = uniform_on(kZ4, {0, 2});
  EXPECT_EQ(convolve(h, h), h);
  EXPECT_EQ(convolve(kU01, kU01, Sign::Minus), convolve(kU01, negate(kU01)));
  EXPECT_THROW(convolve(kU01, uniform_on(Z({2}), {0})), ShapeError);
}

TEST(Dist, ConvolutionLaws) {
  Rng rng(7);
  for (const auto& g : {Z({5}), Z({2, 4}), Z({3, 3})}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Dist a = random_dist(rng, g), b = random_dist(rng, g), c = random_dist(rng, g);
      EXPECT_EQ(convolve(a, b), convolve(b, a));
      EXPECT_EQ(convolve(convolve(a, b), c), convolve(a, convolve(b, c)));
      EXPECT_EQ(convolve(a, point_mass(g, 0)), a);
    }
  }
}

TEST(Dist, Pushforward) {
  EXPECT_EQ(pushforward(kU01, LinearMap::zero(kZ4, kZ4)), point_mass(kZ4, 0));
  EXPECT_EQ(pushforward(kU01, LinearMap::identity(kZ4)), kU01);
  const Dist full = uniform_on(Subgroup::whole(kZ4));
  EXPECT_EQ(pushforward(full, LinearMap::scalar(kZ4, 2)), uniform_on(kZ4, {0, 2}));
  EXPECT_THROW(pushforward(kU01, LinearMap::identity(Z({2}))), ShapeError);
}

TEST(Dist, LiftedJoint) {
  const GroupSpec f2 = Z({2});
  const Dist bit = uniform_on(Subgroup::whole(f2));
  {
    // One variable copied into two blocks lands on the diagonal.
    const std::vector<LinearMap> maps{LinearMap(f2, Z({2, 2}), {{1}, {1}})};
    const Dist members[] = {bit};
    const JointDist j = lifted_joint(members, maps, {f2, f2});
    EXPECT_EQ(j.pmf().size(), 2u);
    EXPECT_EQ(j.pmf().prob(j.join(std::vector<Code>{1, 1})), mpq_class(1, 2));
  }
  {
    const std::vector<LinearMap> maps{LinearMap(f2, Z({2, 2}), {{1}, {0}}),
                                      LinearMap(f2, Z({2, 2}), {{0}, {1}})};
    const Dist members[] = {bit, bit};
    const JointDist j = lifted_joint(members, maps, {f2, f2});
    EXPECT_EQ(j.flat(), uniform_on(Subgroup::whole(Z({2, 2}))));
  }
  {
    // (Z1, Z2, W) for the 2x2 grid of uniform bits: y_ij -> (i y, j y, y).
    std::vector<LinearMap> maps;
    std::vector<Dist> members;
    for (int i = 1; i <= 2; ++i) {
      for (int j = 1; j <= 2; ++j) {
        maps.emplace_back(f2, Z({2, 2, 2}), std::vector<std::vector<std::int64_t>>{{i}, {j}, {1}});
        members.push_back(bit);
      }
    }
    const JointDist z = lifted_joint(members, maps, {f2, f2, f2});
    EXPECT_EQ(z.flat(), uniform_on(Subgroup::whole(Z({2, 2, 2}))));
  }
  {
    const std::vector<LinearMap> maps{LinearMap::identity(kZ4)};
    const Dist members[] = {kU01, kU01};
    EXPECT_THROW(lifted_joint(members, maps, {kZ4}), ShapeError);
  }
  {
    const GroupSpec big = Z({64});
    const Dist u = uniform_on(Subgroup::whole(big));
    const std::vector<LinearMap> maps{LinearMap(big, Z({64, 64}), {{1}, {0}}),
                                      LinearMap(big, Z({64, 64}), {{0}, {1}})};
    const Dist members[] = {u, u};
    EXPECT_THROW(lifted_joint(members, maps, {big, big}, 1000), CapExceeded);
  }
}

TEST(Dist, LiftedJointMarginalsMatchConvolution) {
  Rng rng(11);
  const GroupSpec g = Z({2, 4});
  for (int trial = 0; trial < 10; ++trial) {
    const RVTuple t{random_dist(rng, g), random_dist(rng, g), random_dist(rng, g)};
    // (X1 + X2 + X3, X1 - X3) as a lifted joint.
    std::vector<LinearMap> maps;
    const std::int64_t second[] = {1, 0, -1};
    for (int k = 0; k < 3; ++k) {
      const std::vector<LinearMap> parts{LinearMap::identity(g), LinearMap::scalar(g, second[k])};
      maps.push_back(LinearMap::stacked(g, parts));
    }
    const JointDist j = lifted_joint(t, maps, {g, g});
    EXPECT_EQ(j.coordinate(0), convolve_all(t));
    EXPECT_EQ(j.coordinate(1), convolve(t[0], t[2], Sign::Minus));
  }
}

TEST(Dist, ConditionAndMarginal) {
  const GroupSpec f2 = Z({2});
  const JointDist diag({f2, f2}, Pmf::from_weights({{0, 1}, {3, 1}}));
  EXPECT_EQ(diag.condition(0, 1).flat(), point_mass(f2, 1));
  EXPECT_THROW(Z({2}).decode(2), ShapeError);

  const Dist a = uniform_on(kZ4, {0, 1, 2});
  const JointDist prod = independent_product(JointDist::of(a), JointDist::of(kU01));
  EXPECT_EQ(prod.coordinate(0), a);
  EXPECT_EQ(prod.coordinate(1), kU01);

  // (X, X + Y) with X, Y iid uniform{0,1} on Z/4, conditioned on X + Y = 1.
  const std::vector<LinearMap> maps{LinearMap(kZ4, Z({4, 4}), {{1}, {1}}),
                                    LinearMap(kZ4, Z({4, 4}), {{0}, {1}})};
  const Dist members[] = {kU01, kU01};
  const JointDist j = lifted_joint(members, maps, {kZ4, kZ4});
  EXPECT_EQ(j.condition(1, 1).flat(), kU01);
  EXPECT_THROW(j.condition(1, 3), NullEventError);
}

TEST(Dist, ConditioningThenMixingReconstructsTheJoint) {
  Rng rng(3);
  const GroupSpec g = Z({3});
  const GroupSpec h = Z({2, 2});
  for (int trial = 0; trial < 20; ++trial) {
    const JointDist j = random_joint(rng, {g, h, g});
    const std::size_t target[] = {0, 2};
    const std::size_t given[] = {1};
    std::vector<Atom> rebuilt;
    mpz_class scale = 1;
    const auto parts = slices(j, target, given);
    for (const auto& s : parts) scale *= s.prob.get_den() * s.law.pmf().total();
    for (const auto& s : parts) {
      for (const auto& a : s.law.pmf().atoms()) {
        const Code parts3[] = {s.law.coordinate_code(a.code, 0), s.value,
                               s.law.coordinate_code(a.code, 1)};
        const mpq_class w = s.prob * mpq_class(a.weight, s.law.pmf().total()) * scale;
        ASSERT_EQ(w.get_den(), 1);
        rebuilt.push_back(Atom{j.join(parts3), w.get_num()});
      }
    }
    EXPECT_EQ(Pmf::from_weights(std::move(rebuilt)), j.pmf());
  }
}

TEST(Entropy, Values) {
  EXPECT_EQ(entropy(point_mass(kZ4, 2)), 0.0);
  EXPECT_NEAR(entropy(uniform_on(Subgroup::whole(kZ4))), std::log(4.0), 1e-15);
  EXPECT_NEAR(entropy(convolve(kU01, kU01)), 1.0397207708399179, 1e-12);

  const std::vector<LinearMap> maps{LinearMap(kZ4, Z({4, 4}), {{1}, {1}}),
                                    LinearMap(kZ4, Z({4, 4}), {{0}, {1}})};
  const Dist members[] = {kU01, kU01};
  const JointDist j = lifted_joint(members, maps, {kZ4, kZ4});
  const std::size_t x[] = {0}, s[] = {1};
  EXPECT_NEAR(cond_entropy(j, x, s), 0.3465735902799727, 1e-12);
  EXPECT_NEAR(cond_entropy(j, s, x), std::log(2.0), 1e-12);
  EXPECT_THROW(cond_entropy(j, x, x), ShapeError);
  EXPECT_NEAR(mutual_info(j, x, s), std::log(2.0) - 0.3465735902799727, 1e-12);

  const JointDist indep = independent_product(JointDist::of(kU01), JointDist::of(convolve(kU01, kU01)));
  EXPECT_NEAR(cond_entropy(indep, x, s), std::log(2.0), 1e-12);
  EXPECT_NEAR(mutual_info(indep, x, s), 0.0, 1e-12);
  const JointDist diag({kZ4, kZ4}, Pmf::from_weights({{0, 1}, {5, 1}, {10, 2}}));
  EXPECT_NEAR(mutual_info(diag, x, s), entropy(diag.coordinate(0)), 1e-12);
}

TEST(Entropy, ChainRulesAndSubmodularity) {
  Rng rng(5);
  const GroupSpec a = Z({2}), b = Z({3}), c = Z({2, 2});
  for (int trial = 0; trial < 200; ++trial) {
    const JointDist j = random_joint(rng, {a, b, c});
    const std::size_t x[] = {0}, y[] = {1}, z[] = {2}, xy[] = {0, 1}, yz[] = {1, 2};
    EXPECT_NEAR(entropy(j, xy), cond_entropy(j, x, y) + entropy(j, y), 1e-9);
    EXPECT_NEAR(cond_entropy(j, xy, z), cond_entropy(j, x, yz) + cond_entropy(j, y, z), 1e-9);
    EXPECT_GE(mutual_info(j, x, y, z), -1e-9);
    EXPECT_GE(mutual_info(j, x, z), -1e-9);
    const Dist m = j.coordinate(2);
    EXPECT_GE(entropy(m), 0.0);
    EXPECT_LE(entropy(m), std::log(static_cast<double>(m.pmf().size())) + 1e-12);
  }
}

TEST(Entropy, AgreesWithBruteForce) {
  Rng rng(9);
  const GroupSpec g = Z({3});
  for (int trial = 0; trial < 30; ++trial) {
    const Dist p = random_dist(rng, g), q = random_dist(rng, g);
    const auto lp = oracle::from(p), lq = oracle::from(q);
    // (P, P + Q) against the product-space enumeration.
    const std::vector<LinearMap> maps{LinearMap(g, Z({3, 3}), {{1}, {1}}),
                                      LinearMap(g, Z({3, 3}), {{0}, {1}})};
    const Dist members[] = {p, q};
    const JointDist j = lifted_joint(members, maps, {g, g});
    const std::size_t x[] = {0}, s[] = {1};
    const auto fx = [](const oracle::Outcome& o) { return *o[0]; };
    const auto fs = [](const oracle::Outcome& o) { return oracle::add({3}, *o[0], *o[1]); };
    EXPECT_NEAR(cond_entropy(j, x, s), oracle::Hc({lp, lq}, fx, fs), 1e-12);
    EXPECT_NEAR(entropy(j), oracle::H({lp, lq}, [&](const oracle::Outcome& o) {
                  return oracle::cat({fx(o), fs(o)});
                }), 1e-12);
  }
}

TEST(Ruzsa, Distances) {
  const Dist h = uniform_on(kZ4, {0, 2});
  EXPECT_NEAR(rdist(h, h), 0.0, 1e-15);
  EXPECT_NEAR(rdist(point_mass(kZ4, 1), point_mass(kZ4, 2)), 0.0, 1e-15);
  EXPECT_NEAR(rdist(kU01, kU01), 0.34657359027997253, 1e-12);
  EXPECT_THROW(rdist(kU01, uniform_on(Z({2}), {0})), ShapeError);
  // Difference form. For A = {0,1,3} in Z/8, U_A - U_A' puts 3/9 on 0 and
  // 1/9 on each of +-1, +-2, +-3, while U_A + U_A' puts 2/9 on 1, 3, 4 and
  // 1/9 on 0, 2, 6.
  const Dist ua = uniform_on(Z({8}), {0, 1, 3});
  const double h_diff = std::log(3.0) / 3.0 + 6.0 / 9.0 * std::log(9.0);
  const double h_sum = 3.0 / 9.0 * std::log(9.0) + 6.0 / 9.0 * std::log(4.5);
  EXPECT_NEAR(rdist(ua, ua), h_diff - std::log(3.0), 1e-12);
  EXPECT_NEAR(rdist(ua, negate(ua)), h_sum - std::log(3.0), 1e-12);
  const Dist u03 = uniform_on(kZ4, {0, 3});
  // The two-member multidistance is the distance to the negation.
  EXPECT_NEAR(multidist(RVTuple{kU01, u03}), rdist(kU01, negate(u03)), 1e-12);

  const RVTuple pts{point_mass(kZ4, 1), point_mass(kZ4, 3), point_mass(kZ4, 0)};
  EXPECT_NEAR(multidist(pts), 0.0, 1e-15);
  EXPECT_NEAR(multidist(RVTuple{h, h, h, h}), 0.0, 1e-15);
  EXPECT_NEAR(multidist(RVTuple{kU01, kU01}), 0.3465735902799727, 1e-12);
  EXPECT_THROW(multidist(RVTuple{}), ShapeError);
}

TEST(Ruzsa, ConditionalDistance) {
  // W constant.
  const Dist y = convolve(kU01, kU01);
  const JointDist yw_const = independent_product(JointDist::of(y), JointDist::of(point_mass(Z({2}), 0)));
  EXPECT_NEAR(cond_rdist(kU01, yw_const), rdist(kU01, y), 1e-12);
  // W = Y: every slice is a point mass, so the average is H(X)/2.
  const JointDist yy({kZ4, kZ4}, Pmf::from_weights({{0, 1}, {5, 1}}));
  EXPECT_NEAR(cond_rdist(kU01, yy), 0.346573590279972, 1e-12);
}

TEST(Ruzsa, Properties) {
  Rng rng(13);
  for (const auto& g : {Z({4}), Z({2, 2}), Z({5}), Z({3, 3})}) {
    const Dist full = uniform_on(Subgroup::whole(g));
    for (int trial = 0; trial < 25; ++trial) {
      const Dist x = random_dist(rng, g), y = random_dist(rng, g), z = random_dist(rng, g);
      EXPECT_NEAR(rdist(x, y), rdist(y, x), 1e-12);
      EXPECT_NEAR(rdist(x, y), oracle::rdist(oracle::from(x), oracle::from(y)), 1e-12);
      EXPECT_GE(rdist(x, y), -1e-9);
      EXPECT_NEAR(rdist(x, full), 0.5 * (std::log(static_cast<double>(g.size())) - entropy(x)), 1e-12);
      EXPECT_LE(0.5 * std::abs(entropy(x) - entropy(y)), rdist(x, y) + 1e-9);
      const RVTuple t{x, y, z};
      EXPECT_GE(multidist(t), -1e-9);
      EXPECT_NEAR(multidist(t), multidist(RVTuple{z, x, y}), 1e-12);
      EXPECT_NEAR(multidist(t),
                  oracle::multidist({oracle::from(x), oracle::from(y), oracle::from(z)}), 1e-12);
    }
  }
}

TEST(Ruzsa, ConditionalMultidistance) {
  const GroupSpec f2 = Z({2});
  // Constant conditioning reduces to the plain multidistance.
  const JointDist p1 = independent_product(JointDist::of(kU01), JointDist::of(point_mass(f2, 0)));
  const JointDist p2 = independent_product(JointDist::of(convolve(kU01, kU01)), JointDist::of(point_mass(f2, 1)));
  const JointDist pairs[] = {p1, p2};
  EXPECT_NEAR(cond_multidist(pairs), multidist(RVTuple{kU01, convolve(kU01, kU01)}), 1e-12);
  // Full conditioning and indicator coarsening both give point-mass slices.
  const JointDist full({kZ4, kZ4}, Pmf::from_weights({{0, 1}, {5, 1}}));
  const JointDist ind({kZ4, f2}, Pmf::from_weights({{0, 1}, {3, 1}}));
  const JointDist fulls[] = {full, full};
  const JointDist inds[] = {ind, ind};
  EXPECT_NEAR(cond_multidist(fulls), 0.0, 1e-12);
  EXPECT_NEAR(cond_multidist(inds), 0.0, 1e-12);

  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const GroupSpec g = trial % 2 ? Z({3}) : Z({2, 2});
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 2);
    std::vector<JointDist> ps;
    for (std::size_t i = 0; i < m; ++i) ps.push_back(random_joint(rng, {g, trial % 3 ? f2 : Z({3})}));
    EXPECT_NEAR(cond_multidist(ps), cond_multidist_averaged(ps), 1e-9);
  }
}
