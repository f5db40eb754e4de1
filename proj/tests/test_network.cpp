#include <doctest.h>

#include <cmath>
#include <random>

#include "hocm/network.hpp"

using namespace hocm;

namespace {

NetworkSpec fig2a(BsConvention c = BsConvention::Real) {
  NetworkSpec n;
  n.convention = c;
  n.ops.push_back({"a", "vac", 0.75, std::make_pair("a1", "a2")});
  n.ops.push_back({"b", "vac", 0.75, std::make_pair("b1", "b2")});
  return n;
}

Complex amp(const CompiledNetwork& net, const ModeId& out, const ModeId& in) {
  for (const auto& [m, c] : net.map.rows.at(out))
    if (m == in) return c;
  return 0.0;
}

NormalPoly number(const ModeId& m) { return NormalPoly::monomial({{m, 1, 1}}); }

std::shared_ptr<const StateVector> evolved(double xi, int na, int nb, int np) {
  HamiltonianSpec h;
  const auto psi0 = initial_state(native_cutoffs(h, na, nb, np), h, false);
  return std::make_shared<const StateVector>(evolve(psi0, h, h.tau(xi)).state);
}

}  // namespace

TEST_CASE("compile_single_beam_splitter") {
  NetworkSpec n;
  n.ops.push_back({"a", "vac", 0.75, std::nullopt});
  const auto net = compile_network(n, {"a", "b", "p"});
  CHECK(net.ancillas == std::vector<ModeId>{"v1"});
  CHECK(std::abs(amp(net, "a1", "a") - Complex(std::sqrt(3.0) / 2)) < 1e-15);
  CHECK(std::abs(amp(net, "a1", "v1") - Complex(0.5)) < 1e-15);
  CHECK(std::abs(amp(net, "a2", "a") - Complex(-0.5)) < 1e-15);
  CHECK(std::abs(amp(net, "a2", "v1") - Complex(std::sqrt(3.0) / 2)) < 1e-15);
  CHECK(net.map.unitarity_residual() < 1e-12);
  CHECK(net.outputs() == std::vector<ModeId>{"a1", "a2", "b", "p"});
}

TEST_CASE("compile_identity_and_cascade") {
  NetworkSpec one;
  one.ops.push_back({"a", "vac", 1.0, std::make_pair("x", "y")});
  const auto id = compile_network(one, {"a"});
  CHECK(amp(id, "x", "a") == Complex(1.0));
  CHECK(amp(id, "y", "v1") == Complex(1.0));
  CHECK(id.map.rows.at("x").size() == 1);

  NetworkSpec twice;
  twice.ops.push_back({"a", "b", 0.5, std::make_pair("c", "d")});
  twice.ops.push_back({"c", "d", 0.5, std::make_pair("e", "f")});
  const auto net = compile_network(twice, {"a", "b"});
  const BsMatrix h = bs_matrix(0.5, BsConvention::Real);
  // product of the two 2x2 blocks by hand
  const Complex e_a = h[0][0] * h[0][0] + h[0][1] * h[1][0], e_b = h[0][0] * h[0][1] + h[0][1] * h[1][1];
  const Complex f_a = h[1][0] * h[0][0] + h[1][1] * h[1][0], f_b = h[1][0] * h[0][1] + h[1][1] * h[1][1];
  CHECK(std::abs(amp(net, "e", "a") - e_a) < 1e-15);
  CHECK(std::abs(amp(net, "e", "b") - e_b) < 1e-15);
  CHECK(std::abs(amp(net, "f", "a") - f_a) < 1e-15);
  CHECK(std::abs(amp(net, "f", "b") - f_b) < 1e-15);
  const BsMatrix swap = bs_matrix(0.0, BsConvention::Real);
  CHECK(std::abs(amp(net, "e", "b") - swap[0][1]) < 1e-15);
  CHECK(std::abs(amp(net, "f", "a") - swap[1][0]) < 1e-15);
  CHECK(std::abs(amp(net, "e", "a")) < 1e-15);
}

TEST_CASE("compile_errors") {
  NetworkSpec bad_t;
  bad_t.ops.push_back({"a", "vac", 1.5, std::nullopt});
  CHECK_THROWS_AS(compile_network(bad_t, {"a"}), NetworkError);
  NetworkSpec unknown;
  unknown.ops.push_back({"q", "vac", 0.5, std::nullopt});
  CHECK_THROWS_AS(compile_network(unknown, {"a"}), NetworkError);
  NetworkSpec reuse;
  reuse.ops.push_back({"a", "vac", 0.5, std::nullopt});
  reuse.ops.push_back({"a", "vac", 0.5, std::nullopt});  // a was consumed
  CHECK_THROWS_AS(compile_network(reuse, {"a"}), NetworkError);
  CHECK_THROWS_AS(parse_convention("mirror"), NetworkError);
  CHECK(parse_convention("symmetric") == BsConvention::Symmetric);
}

TEST_CASE("pushforward_examples") {
  const auto psi = evolved(0.3, 12, 24, 30);
  MomentEvaluator ev(psi);
  const auto net = compile_network(fig2a(), {"a", "b", "p"});
  const double n_a = ev(number("a")).real();
  CHECK(std::abs(pushforward_moment(ev, net, number("a1")).real() - 0.75 * n_a) < 1e-12);
  CHECK(std::abs(pushforward_moment(ev, net, number("a2")).real() - 0.25 * n_a) < 1e-12);

  NetworkSpec pass;
  pass.ops.push_back({"a", "vac", 1.0, std::nullopt});
  const auto p_net = compile_network(pass, {"a", "b", "p"});
  CHECK(pushforward(number("a2"), p_net).is_zero());  // a2 is the untouched ancilla

  // single photon on a, 50:50 splitter: <a1^dag a2> = -1/2
  const FockCutoffs cut({"a"}, {1});
  auto one = std::make_shared<const StateVector>(StateVector{cut, {0.0, 1.0}});
  MomentEvaluator e1(one);
  NetworkSpec half;
  half.ops.push_back({"a", "vac", 0.5, std::nullopt});
  const auto h_net = compile_network(half, {"a"});
  const NormalPoly q = NormalPoly::monomial({{"a1", 1, 0}, {"a2", 0, 1}});
  CHECK(std::abs(pushforward_moment(e1, h_net, q) - Complex(-0.5)) < 1e-15);
}

TEST_CASE("photon_number_conservation_and_linearity") {
  const auto psi = evolved(0.8, 12, 24, 30);
  MomentEvaluator ev(psi);
  const auto net = compile_network(fig2a(), {"a", "b", "p"});
  double out = 0, in = 0;
  for (const auto& o : net.outputs()) out += pushforward_moment(ev, net, number(o)).real();
  for (const char* m : {"a", "b", "p"}) in += ev(number(m)).real();
  CHECK(std::abs(out - in) < 1e-9);

  const NormalPoly x = NormalPoly::monomial({{"a1", 1, 0}, {"b2", 0, 2}});
  const NormalPoly y = NormalPoly::monomial({{"a2", 0, 1}, {"b1", 1, 1}});
  const Complex s(0.3, -1.2), t(-0.7, 0.4);
  const Complex lhs = pushforward_moment(ev, net, x * s + y * t);
  const Complex rhs = s * pushforward_moment(ev, net, x) + t * pushforward_moment(ev, net, y);
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("direct_oracle_trivial_cases") {
  const auto psi = evolved(0.5, 5, 10, 8);
  NetworkSpec pass;
  pass.ops.push_back({"a", "vac", 1.0, std::make_pair("a1", "a2")});
  const auto id = compile_network(pass, {"a", "b", "p"});
  const NormalPoly q_out = NormalPoly::monomial({{"a1", 1, 1}, {"b", 0, 2}});
  const NormalPoly q_in = NormalPoly::monomial({{"a", 1, 1}, {"b", 0, 2}});
  CHECK(std::abs(direct_oracle_moment(*psi, id, q_out) - moment(*psi, q_in)) < 1e-13);

  const FockCutoffs cut({"a", "b", "p"}, {3, 3, 3});
  StateVector vac{cut, std::vector<Complex>(cut.dim())};
  vac.amp[0] = 1.0;
  const auto net = compile_network(fig2a(), {"a", "b", "p"});
  CHECK(std::abs(direct_oracle_moment(vac, net, NormalPoly::monomial({{"a1", 2, 1}, {"b2", 0, 1}}))) < 1e-15);
  CHECK_THROWS_AS(DirectOracle(*psi, net, 1024), NetworkError);
}

TEST_CASE("pushforward_agrees_with_direct_oracle_on_random_polynomials") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> xi_dist(0.05, 1.4), u(-1, 1);
  std::uniform_int_distribution<int> e(0, 2);
  const std::vector<ModeId> outs = {"a1", "a2", "b1", "b2"};
  for (auto conv : {BsConvention::Real, BsConvention::Symmetric}) {
    const auto net = compile_network(fig2a(conv), {"a", "b", "p"});
    for (int trial = 0; trial < 10; ++trial) {
      const auto psi = evolved(xi_dist(rng), 5, 10, 8);
      MomentEvaluator ev(psi);
      DirectOracle oracle(*psi, net);
      for (int k = 0; k < 10; ++k) {
        NormalPoly q;
        for (int t = 0; t < 3; ++t) {
          MonomialKey key;
          int degree = 0;
          for (const auto& m : outs) {
            ModePower mp{m, e(rng), e(rng)};
            if (degree + mp.cre + mp.ann > 8) continue;
            degree += mp.cre + mp.ann;
            if (mp.cre || mp.ann) key.push_back(mp);
          }
          q.add_term(key, Complex(u(rng), u(rng)));
        }
        const Complex fast = pushforward_moment(ev, net, q), direct = oracle.moment(q);
        CHECK_MESSAGE(std::abs(fast - direct) < 1e-8, q.to_string());
      }
    }
  }
}
