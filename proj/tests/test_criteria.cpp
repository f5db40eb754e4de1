#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "hocm/criteria.hpp"
#include "hocm/linalg.hpp"

using namespace hocm;

namespace {

const std::vector<ModeId> kOut = {"a1", "a2", "b1", "b2"};

NormalPoly E(const std::string& s) { return parse_expression(s); }

// vacuum expectation of a normal-ordered polynomial is its constant term
Complex vacuum_moment(const NormalPoly& p) { return p.constant_term(); }

NetworkSpec fig2a() {
  NetworkSpec n;
  n.ops.push_back({"a", "vac", 0.75, std::make_pair("a1", "a2")});
  n.ops.push_back({"b", "vac", 0.75, std::make_pair("b1", "b2")});
  return n;
}

HOCMBundle fig2a_bundle(const std::string& name, const std::string& text, double xi) {
  HamiltonianSpec h;
  const auto psi0 = initial_state(native_cutoffs(h, 64, 128, 64), h);
  auto psi = std::make_shared<const StateVector>(evolve(psi0, h, h.tau(xi)).state);
  MomentEvaluator ev(psi);
  const auto net = compile_network(fig2a(), h.modes());
  return HocmPlan(parse_vector(name, text), net).evaluate(ev, xi);
}

double eigen_min(const Eigen::MatrixXcd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m).eigenvalues()(0);
}

const char* kR12 = "Q{1 a1}; P{1 a1}; Q{1 a2}; P{1 a2}; Q{2 b1}; P{2 b1}; Q{2 b2}; P{2 b2}";
const char* kI1 = "Q{1 a1}; P{1 a1}; Q{1 a2}; P{1 a2}; Q{1 b1, 1 b2}; P{1 b1, 1 b2}";
const char* kII1 = "Q{1 a1}; P{1 a1}; Q{1 a2, 1 b1, 3 b2}; P{1 a2, 1 b1, 3 b2}";
const char* kII5 = "Q{1 a1, 1 a2}; P{1 a1, 1 a2}; Q{1 b1, 3 b2}; P{1 b1, 3 b2}";

}  // namespace

TEST_CASE("quadrature_poly_examples") {
  CHECK(quadrature_poly({QuadratureElement::Kind::Q, {{"a", 1}}, 1}).distance(E("0.5*a + 0.5*a'")) < 1e-15);
  CHECK(quadrature_poly({QuadratureElement::Kind::P, {{"b", 2}}, 1}).distance(E("(0,0.5)*b'^2 - (0,0.5)*b^2")) <
        1e-15);
  CHECK(quadrature_poly({QuadratureElement::Kind::Q, {{"b1", 1}, {"b2", 1}}, 2})
            .distance(E("0.5*b1^2*b2^2 + 0.5*b1'^2*b2'^2")) < 1e-15);
  CHECK_THROWS(quadrature_poly({QuadratureElement::Kind::Q, {{"a", 0}}, 1}));
}

TEST_CASE("vector_grammar") {
  const auto v = parse_vector("v", "Q{1 a2, 3 b2}^2; P{1 a2, 3 b2}^2; Q{2 b1}; P{2 b1}");
  CHECK(v.dim() == 4);
  CHECK(v.elements[0].power == 2);
  CHECK(v.elements[0].order() == 8);
  CHECK(v.order() == 2 + 8);
  CHECK(parse_vector("r", kR12).order() == 3);
  CHECK(lift_power(parse_vector("r", kR12), 2, "r2").order() == 6);
  CHECK(parse_vector("v2", v.to_string()).to_string() == v.to_string());
  CHECK_THROWS_AS(parse_vector("x", "Q{1 a}"), QuadratureError);                // unpaired
  CHECK_THROWS_AS(parse_vector("x", "Q{1 a}; P{2 a}"), QuadratureError);        // factors differ
  CHECK_THROWS_AS(parse_vector("x", "P{1 a}; Q{1 a}"), QuadratureError);        // order
  CHECK_THROWS_AS(parse_vector("x", "Q{1 a, 1 a}; P{1 a, 1 a}"), QuadratureError);
  CHECK_THROWS_AS(parse_vector("x", "Q{1 a}; P{1 a}^"), QuadratureError);
  CHECK_THROWS_AS(parse_vector("x", "Q{a}; P{a}"), QuadratureError);
}

TEST_CASE("bipartition_enumeration_and_parsing") {
  const auto all = enumerate_bipartitions(kOut);
  std::vector<std::string> labels;
  for (const auto& b : all) labels.push_back(b.label);
  CHECK(labels == std::vector<std::string>{"a1|a2b1b2", "a2|a1b1b2", "b1|a1a2b2", "b2|a1a2b1", "a1a2|b1b2",
                                           "a1b1|a2b2", "a1b2|a2b1"});
  for (std::size_t m = 2; m <= 6; ++m) {
    std::vector<ModeId> modes;
    for (std::size_t i = 0; i < m; ++i) modes.push_back("m" + std::to_string(i));
    CHECK(enumerate_bipartitions(modes).size() == (std::size_t(1) << (m - 1)) - 1);
  }
  CHECK(parse_bipartition("b1a1|b2a2", kOut).label == "a1b1|a2b2");
  CHECK(parse_bipartition("a1b2|b1a2", kOut).label == "a1b2|a2b1");
  CHECK_THROWS_AS(parse_bipartition("a1|a2b1", kOut), CriteriaError);
  CHECK_THROWS_AS(parse_bipartition("a1a2b1b2|", kOut), CriteriaError);
  CHECK_THROWS_AS(parse_bipartition("a1|a1a2b1b2", kOut), CriteriaError);
}

TEST_CASE("vacuum_bundles") {
  const auto b1 = build_hocm(parse_vector("v", "Q{1 a}; P{1 a}"), vacuum_moment);
  CHECK((b1.V - Eigen::Matrix2d{{0.25, 0}, {0, 0.25}}).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((b1.Omega - Eigen::Matrix2d{{0, 0.5}, {-0.5, 0}}).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(uncertainty_check(b1)) < 1e-14);

  // [a^2, a^dag^2] = 4 a^dag a + 2, <a^2 a^dag^2> = 2 in vacuum
  const auto b2 = build_hocm(parse_vector("v", "Q{2 a}; P{2 a}"), vacuum_moment);
  CHECK((b2.V - Eigen::Matrix2d{{0.5, 0}, {0, 0.5}}).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(b2.Omega(0, 1) - 1.0) < 1e-15);

  HOCMBundle zero = b1;
  zero.V.setZero();
  CHECK(std::abs(uncertainty_check(zero) + 0.25) < 1e-14);  // -|Omega|/2
}

TEST_CASE("product_vacuum_has_no_cross_blocks") {
  const auto b = fig2a_bundle("r", kR12, 0.0);
  const auto bip = parse_bipartition("a1a2|b1b2", kOut);
  for (int i = 0; i < 4; ++i)
    for (int j = 4; j < 8; ++j) CHECK(std::abs(b.V(i, j)) < 1e-15);
  for (const auto& m : b.means) CHECK(std::abs(m) < 1e-15);
  const auto v = ppt_min_eig(b, bip);
  CHECK(v.nu_min >= -1e-8);
  CHECK_FALSE(v.entangled());
  CHECK(schur_bound(b, bip).min_eig >= -1e-8);
}

TEST_CASE("locality_examples") {
  const auto i1 = parse_vector("i1", kI1);
  CHECK_FALSE(validate_locality(i1, parse_bipartition("b1|a1a2b2", kOut)).empty());
  for (const char* ok : {"a1|a2b1b2", "a2|a1b1b2", "a1a2|b1b2"})
    CHECK(validate_locality(i1, parse_bipartition(ok, kOut)).empty());
  const auto r12 = parse_vector("r", kR12);
  for (const auto& b : enumerate_bipartitions(kOut)) CHECK(validate_locality(r12, b).empty());
  CHECK(validate_locality(parse_vector("ii5", kII5), parse_bipartition("a1a2|b1b2", kOut)).empty());
  CHECK_THROWS_AS(mirror_signs(i1, parse_bipartition("b1|a1a2b2", kOut)), CriteriaError);
}

TEST_CASE("mirror_matrix_properties") {
  const auto b = fig2a_bundle("r", kR12, 0.4);
  const auto bip = parse_bipartition("a1b1|a2b2", kOut);
  const auto t = mirror_signs(b.spec, bip);
  CHECK(t == Eigen::VectorXd((Eigen::VectorXd(8) << 1, 1, 1, -1, 1, 1, 1, -1).finished()));
  const auto twice = partial_transpose(partial_transpose(b, bip), bip);
  CHECK((twice.V - b.V).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(twice.Omega == b.Omega);

  // everything on side A: mirror is the identity
  const auto local = parse_vector("l", "Q{1 a1}; P{1 a1}");
  CHECK(mirror_signs(local, parse_bipartition("a1|a2b1b2", kOut)) == Eigen::Vector2d(1, 1));
}

TEST_CASE("ppt_single_photon_on_balanced_splitter_second_order") {
  // (|10> - |01>)/sqrt2 on (a1, a2); hand-derived covariance in order (Q1, P1, Q2, P2)
  const FockCutoffs cut({"a"}, {2});
  auto one = std::make_shared<const StateVector>(StateVector{cut, {0.0, 1.0, 0.0}});
  MomentEvaluator ev(one);
  NetworkSpec n;
  n.ops.push_back({"a", "vac", 0.5, std::nullopt});
  const auto net = compile_network(n, {"a"});
  const auto b = HocmPlan(parse_vector("k1", "Q{1 a1}; P{1 a1}; Q{1 a2}; P{1 a2}"), net).evaluate(ev);

  Eigen::Matrix4d v;
  v << 0.5, 0, -0.25, 0,
       0, 0.5, 0, -0.25,
       -0.25, 0, 0.5, 0,
       0, -0.25, 0, 0.5;
  CHECK((b.V - v).cwiseAbs().maxCoeff() < 1e-15);

  const auto bip = parse_bipartition("a1|a2", {"a1", "a2"});
  Eigen::Matrix4d vt = v;
  vt(1, 3) = vt(3, 1) = 0.25;
  Eigen::Matrix4cd m = vt.cast<Complex>();
  m(0, 1) += Complex(0, 0.25);
  m(1, 0) -= Complex(0, 0.25);
  m(2, 3) += Complex(0, 0.25);
  m(3, 2) -= Complex(0, 0.25);
  const double expected = eigen_min(m);
  const auto verdict = ppt_min_eig(b, bip);
  // second-order moments do not see this entanglement
  CHECK(expected > 0.1);
  CHECK(std::abs(verdict.nu_min - expected) < 1e-12);
  CHECK_FALSE(verdict.entangled());
  CHECK(verdict.sufficiency == SufficiencyClass::Iff1xN);
  CHECK(verdict.forms_agree);
  CHECK(verdict.residual < 1e-10);
}

TEST_CASE("fig2b_all_bipartitions_entangled_at_half") {
  const auto b = fig2a_bundle("r", kR12, 0.5);
  CHECK(uncertainty_check(b) >= -1e-8);
  for (const auto& bip : enumerate_bipartitions(kOut)) {
    const auto v = ppt_min_eig(b, bip);
    CHECK_MESSAGE(v.nu_min < 0, bip.label);
    CHECK(v.forms_agree);
    CHECK(v.hermiticity < 1e-12);
    CHECK(v.residual <= 1e-10 * std::max(1.0, std::abs(v.nu_min)));
  }
}

TEST_CASE("sufficiency_classes") {
  const auto ii1 = fig2a_bundle("ii1", kII1, 0.1);
  CHECK(classify_sufficiency(ii1.spec, parse_bipartition("a1|a2b1b2", kOut), ii1) == SufficiencyClass::Iff1xN);
  const auto ii5 = fig2a_bundle("ii5", kII5, 0.1);
  CHECK(classify_sufficiency(ii5.spec, parse_bipartition("a1a2|b1b2", kOut), ii5) ==
        SufficiencyClass::IffMultimodePairs);
  const auto r12 = fig2a_bundle("r", kR12, 0.3);
  CHECK(classify_sufficiency(r12.spec, parse_bipartition("a1b1|a2b2", kOut), r12) ==
        SufficiencyClass::NecessaryOnly);

  // block-swap invariant covariance: a1 <-> a2 and b1 <-> b2 leave V and Omega unchanged
  HOCMBundle sym = r12;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(8, 8);
  for (int i : {0, 1}) {
    v(i, i + 2) = v(i + 2, i) = 0.1;  // a1-a2
    v(i + 4, i + 6) = v(i + 6, i + 4) = 0.2;  // b1-b2
    for (int j : {4, 5, 6, 7}) v(i, j) = v(j, i) = v(i + 2, j) = v(j, i + 2) = 0.05;
  }
  sym.V = v;
  sym.Omega = Eigen::MatrixXd::Zero(8, 8);
  for (int k = 0; k < 4; ++k) {
    sym.Omega(2 * k, 2 * k + 1) = k < 2 ? 0.5 : 1.5;
    sym.Omega(2 * k + 1, 2 * k) = -sym.Omega(2 * k, 2 * k + 1);
  }
  CHECK(classify_sufficiency(sym.spec, parse_bipartition("a1a2|b1b2", kOut), sym) ==
        SufficiencyClass::IffBisymmetric);
  sym.V(0, 0) += 1e-3;
  CHECK(classify_sufficiency(sym.spec, parse_bipartition("a1a2|b1b2", kOut), sym) ==
        SufficiencyClass::NecessaryOnly);
}

TEST_CASE("verdict_rules") {
  const auto b = fig2a_bundle("r", kR12, 1.3);
  for (const auto& bip : enumerate_bipartitions(kOut)) {
    const auto v = ppt_min_eig(b, bip);
    CHECK(v.entangled() == (v.nu_min < -v.tol));
    if (v.verdict == Verdict::Separable) CHECK(v.sufficiency != SufficiencyClass::NecessaryOnly);
    if (!v.entangled() && v.sufficiency == SufficiencyClass::NecessaryOnly) CHECK(v.verdict == Verdict::Undecided);
  }
}

TEST_CASE("schur_bound_agrees_with_ppt_for_one_by_n") {
  const auto bip = parse_bipartition("a1|a2b1b2", kOut);
  for (double xi : {0.1, 0.5, 1.2}) {
    const auto b = fig2a_bundle("ii1", kII1, xi);
    const auto v = ppt_min_eig(b, bip);
    const auto s = schur_bound(b, bip);
    CHECK(s.dim_b == 2);
    CHECK_MESSAGE((s.min_eig < -1e-8) == v.entangled(), "xi " << xi << " schur " << s.min_eig << " nu " << v.nu_min);
  }
  const auto b = fig2a_bundle("ii1", kII1, 0.1);
  CHECK(ppt_min_eig(b, bip).nu_min < 0);

  // C = 0 gives A + (i/2) Omega_A
  HOCMBundle c0 = b;
  c0.V.block(0, 2, 2, 2).setZero();
  c0.V.block(2, 0, 2, 2).setZero();
  const auto s = schur_bound(c0, bip);
  Eigen::MatrixXcd expect = c0.V.block(0, 0, 2, 2).cast<Complex>() + Complex(0, 0.5) * c0.Omega.block(0, 0, 2, 2);
  CHECK((s.S - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s.min_eig >= -1e-8);
}

TEST_CASE("jacobi_matches_reference_eigensolver") {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 7;
    Eigen::MatrixXcd x(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x(i, j) = Complex(g(rng), g(rng));
    Eigen::MatrixXcd h = x + x.adjoint();
    if (trial % 4 == 0) {
      // repeated eigenvalues
      Eigen::VectorXd d(n);
      for (int i = 0; i < n; ++i) d(i) = double(i / 2);
      const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(x).householderQ();
      h = q * d.cast<Complex>().asDiagonal() * q.adjoint();
    }
    const auto ours = hermitian_eigen(h);
    const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues();
    for (int i = 0; i < n; ++i) CHECK(std::abs(ours.values[i] - ref(i)) < 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    CHECK(ours.residual < 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    const Eigen::MatrixXcd gram = ours.vectors.adjoint() * ours.vectors;
    CHECK((gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  }
}
