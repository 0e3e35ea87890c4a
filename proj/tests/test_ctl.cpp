#include <catch_amalgamated.hpp>

#include "support/ctl_oracle.hpp"

using namespace mirela;

namespace {

/// One component "A"; state i sits at location names[loc[i]], edges as adjacency lists.
TransitionSystem hand_ts(const std::vector<LocId> &loc, const std::vector<std::vector<std::uint32_t>> &succ,
                         std::vector<std::string> names = {"a", "b", "c"}) {
	TransitionSystem ts;
	ts.components = {"A"};
	ts.location_names = {names};
	for (std::size_t s = 0; s < loc.size(); ++s) {
		ts.locs.push_back(loc[s]);
		ts.clocks.insert(ts.clocks.end(), 2, 0);
		ts.targets.insert(ts.targets.end(), succ[s].begin(), succ[s].end());
		ts.offsets.push_back(static_cast<std::uint32_t>(ts.targets.size()));
	}
	return ts;
}

std::vector<bool> bits(std::initializer_list<int> v) {
	std::vector<bool> out;
	for (int b : v)
		out.push_back(b != 0);
	return out;
}

} // namespace

TEST_CASE("three-state chain", "[ctl]") {
	// 0:a -> 1:b -> 2:c -> 2
	TransitionSystem ts = hand_ts({0, 1, 2}, {{1}, {2}, {2}});
	CtlChecker c(ts);
	auto a = ctl::at("A", "a"), b = ctl::at("A", "b"), cc = ctl::at("A", "c");
	CHECK(c.eval(*ctl::EX(b)) == bits({1, 0, 0}));
	CHECK(c.eval(*ctl::EF(cc)) == bits({1, 1, 1}));
	CHECK(c.eval(*ctl::EG(cc)) == bits({0, 0, 1}));
	CHECK(c.eval(*ctl::EG(ctl::neg(b))) == bits({0, 0, 1}));
	CHECK(c.eval(*ctl::AF(b)) == bits({1, 1, 0}));
	CHECK(c.eval(*ctl::EU(a, b)) == bits({1, 1, 0}));
	CHECK(c.eval(*ctl::AU(ctl::neg(cc), cc)) == bits({1, 1, 1}));
	CHECK(c.holds_initially(*ctl::phi("A", "c")));
	CHECK(c.holds_initially(*ctl::psi("A", "c")));
	CHECK_FALSE(c.holds_initially(*ctl::rho("A", "c")));
}

TEST_CASE("rho separates a trap from a recurrent visit", "[ctl]") {
	// 0:a -> 1:b, and 1 may linger or go back
	TransitionSystem recurrent = hand_ts({0, 1}, {{1}, {1, 0}});
	CHECK(holds_initially(recurrent, *ctl::phi("A", "b")));
	CHECK_FALSE(holds_initially(recurrent, *ctl::psi("A", "b")));
	CHECK(holds_initially(recurrent, *ctl::rho("A", "b")));

	// 2:b is a trap reachable from 1:b, which itself cannot linger
	TransitionSystem trap = hand_ts({0, 1, 1}, {{1}, {0, 2}, {2}});
	CHECK(holds_initially(trap, *ctl::psi("A", "b")));
	CHECK_FALSE(holds_initially(trap, *ctl::rho("A", "b")));

	TransitionSystem forced = hand_ts({0, 1}, {{1}, {1}});
	CHECK(holds_initially(forced, *ctl::psi("A", "b")));
	CHECK_FALSE(holds_initially(forced, *ctl::rho("A", "b")));

	TransitionSystem bouncing = hand_ts({0, 1}, {{1}, {0}});
	CHECK_FALSE(holds_initially(bouncing, *ctl::phi("A", "b")));
}

TEST_CASE("dualities hold on random systems", "[ctl][property]") {
	std::mt19937 rng(17);
	for (int i = 0; i < 60; ++i) {
		TransitionSystem ts = oracle::random_ts(rng, 50 + i * 10);
		CtlChecker c(ts);
		auto f = oracle::random_formula(rng, ts, 2);
		auto g = oracle::random_formula(rng, ts, 2);
		INFO(to_string(*f) << " / " << to_string(*g));
		CHECK(c.eval(*ctl::AG(f)) == c.eval(*ctl::neg(ctl::EF(ctl::neg(f)))));
		CHECK(c.eval(*ctl::AF(f)) == c.eval(*ctl::neg(ctl::EG(ctl::neg(f)))));
		CHECK(c.eval(*ctl::AX(f)) == c.eval(*ctl::neg(ctl::EX(ctl::neg(f)))));
		CHECK(c.eval(*ctl::EF(f)) == c.eval(*ctl::EU(ctl::top(), f)));
		// A[f U g] = !(E[!g U (!f & !g)] | EG !g)
		auto rhs = ctl::neg(ctl::disj(ctl::EU(ctl::neg(g), ctl::conj(ctl::neg(f), ctl::neg(g))), ctl::EG(ctl::neg(g))));
		CHECK(c.eval(*ctl::AU(f, g)) == c.eval(*rhs));
	}
}

TEST_CASE("fixpoint checker agrees with the brute-force oracle", "[ctl][oracle]") {
	std::mt19937 rng(99);
	int cases = 0;
	for (int i = 0; i < 120; ++i) {
		std::size_t n = std::uniform_int_distribution<std::size_t>(1, i < 100 ? 200 : 2000)(rng);
		TransitionSystem ts = oracle::random_ts(rng, n);
		CtlChecker c(ts);
		for (int k = 0; k < 3; ++k) {
			auto f = oracle::random_formula(rng, ts, 1 + (k + i) % 4);
			INFO(to_string(*f) << " on " << n << " states");
			REQUIRE(c.eval(*f) == oracle::eval(ts, *f));
			++cases;
		}
	}
	CHECK(cases == 360);
}

TEST_CASE("formula parser", "[ctl]") {
	auto f = parse_formula("EF EG at(B,s1')");
	CHECK(to_string(*f) == to_string(*ctl::phi("B", "s1'")));
	CHECK(to_string(*parse_formula("E[ at(A,a) U !at(A,b) ] & A[true U false] | not AX at(A,c)")) ==
	      "((E[at(A,a) U !at(A,b)] & A[true U false]) | !AX at(A,c))");
	CHECK(to_string(*parse_formula("\xC2\xAC at(A,a) \xE2\x88\xA7 EF (at(A,b) or false)")) ==
	      "(!at(A,a) & EF (at(A,b) | false))");

	std::mt19937 rng(4);
	TransitionSystem ts = oracle::random_ts(rng, 10);
	for (int i = 0; i < 200; ++i) {
		auto g = oracle::random_formula(rng, ts, 4);
		CHECK(to_string(*parse_formula(to_string(*g))) == to_string(*g));
	}

	CHECK_THROWS_AS(parse_formula(""), FormulaError);
	CHECK_THROWS_AS(parse_formula("EF"), FormulaError);
	CHECK_THROWS_AS(parse_formula("at(A)"), FormulaError);
	CHECK_THROWS_AS(parse_formula("E[at(A,a) at(A,b)]"), FormulaError);
	CHECK_THROWS_AS(parse_formula("at(A,a) )"), FormulaError);
	CHECK_THROWS_AS(parse_formula("XF at(A,a)"), FormulaError);
}

TEST_CASE("unknown atoms are rejected", "[ctl]") {
	TransitionSystem ts = hand_ts({0, 1}, {{1}, {1}});
	CHECK_THROWS_AS(holds_initially(ts, *ctl::at("A", "z")), FormulaError);
	CHECK_THROWS_AS(holds_initially(ts, *ctl::at("Q", "a")), FormulaError);
}

TEST_CASE("witness paths", "[ctl]") {
	// 0:a -> 1:a -> 2:b -> 3:b -> 2
	TransitionSystem ts = hand_ts({0, 0, 1, 1}, {{1}, {2}, {3}, {2}});
	auto w = witness(ts, *ctl::phi("A", "b"));
	REQUIRE(w);
	CHECK(w->stem == std::vector<std::uint32_t>{0, 1, 2});
	CHECK(w->cycle == std::vector<std::uint32_t>{2, 3});

	auto reach = witness(ts, *ctl::EF(ctl::at("A", "b")));
	REQUIRE(reach);
	CHECK(reach->stem == std::vector<std::uint32_t>{0, 1, 2});
	CHECK(reach->cycle.empty());

	CHECK_FALSE(witness(ts, *ctl::EF(ctl::at("A", "c"))));
	CHECK_THROWS_AS(witness(ts, *ctl::EG(ctl::at("A", "a"))), FormulaError);
}
