#include <catch_amalgamated.hpp>

#include "support/reference_verdicts.hpp"

using namespace mirela;

namespace {

Location wait(const std::string &name) { return {name, LocationKind::Wait, {}, false, {}}; }

Edge comm(LocId from, LocId to, ActionKind a, Channel ch) {
	Edge e;
	e.from = from;
	e.to = to;
	e.action = a;
	e.channel = std::move(ch);
	return e;
}

/// S sends a to R; R accepts a or b; N sends b.
Network srn() {
	Network net;
	net.name = "srn";
	Channel a{ChannelKind::Data, "S", "R"}, b{ChannelKind::Data, "N", "R"};
	Automaton s{"S", ComponentKind::Periodic, {wait("s0"), wait("s1")}, {comm(0, 1, ActionKind::Send, a)}, 0, false};
	Automaton r{"R",
	            ComponentKind::First,
	            {wait("r0"), wait("r1"), wait("r2")},
	            {comm(0, 1, ActionKind::Receive, a), comm(0, 2, ActionKind::Receive, b)},
	            0,
	            false};
	Automaton n{"N", ComponentKind::Periodic, {wait("n0"), wait("n1")}, {comm(0, 1, ActionKind::Send, b)}, 0, false};
	net.automata = {s, r, n};
	net.demultiplexed = true;
	return net;
}

const Edge *escape_of(const Automaton &a, const std::string &from) {
	for (const auto &e : a.edges)
		if (e.action == ActionKind::Escape && a.locations[e.from].name == from)
			return &e;
	return nullptr;
}

std::vector<std::string> comm_labels(const Automaton &a, const std::string &from) {
	std::vector<std::string> out;
	for (const auto &e : a.edges)
		if (a.locations[e.from].name == from && (e.action == ActionKind::Send || e.action == ActionKind::Receive))
			out.push_back(describe_action(e) + "->" + a.locations[e.to].name);
	std::sort(out.begin(), out.end());
	return out;
}

} // namespace

TEST_CASE("urgency emulation on the three-automaton example", "[transform]") {
	Network t = emulate_urgency(srn());
	CHECK(t.urgency_emulated);
	const Automaton &s = *t.find("S");
	const Automaton &r = *t.find("R");
	const Automaton &n = *t.find("N");

	CHECK(s.has_urgency_clock);
	CHECK(s.locations[s.at("s0")].urgent);
	CHECK_FALSE(s.locations[s.at("s1")].urgent);
	REQUIRE(s.find("s0'"));
	CHECK(s.locations[*s.find("s0'")].primed_of == s.at("s0"));
	CHECK_FALSE(s.locations[*s.find("s0'")].urgent);

	const Edge *es = escape_of(s, "s0");
	REQUIRE(es);
	CHECK(es->blocked_by == std::vector<std::vector<LocRef>>{{{"R", "r0"}, {"R", "r0'"}}});
	CHECK(comm_labels(s, "s0'") == comm_labels(s, "s0"));

	const Edge *er = escape_of(r, "r0");
	REQUIRE(er);
	CHECK(er->blocked_by ==
	      std::vector<std::vector<LocRef>>{{{"S", "s0"}, {"S", "s0'"}}, {{"N", "n0"}, {"N", "n0'"}}});
	CHECK(comm_labels(r, "r0'") == comm_labels(r, "r0"));
	CHECK(comm_labels(r, "r0'").size() == 2);

	const Edge *en = escape_of(n, "n0");
	REQUIRE(en);
	CHECK(en->blocked_by == std::vector<std::vector<LocRef>>{{{"R", "r0"}, {"R", "r0'"}}});

	// u resets exactly on the edges entering an urgent location (none here besides the initial state)
	for (const auto &a : t.automata)
		for (const auto &e : a.edges)
			CHECK(e.reset_urgency == a.locations[e.to].urgent);
}

TEST_CASE("emulation preconditions", "[transform]") {
	Network net = srn();
	net.demultiplexed = false;
	CHECK_THROWS_AS(emulate_urgency(net), Error);
	CHECK_THROWS_AS(emulate_urgency(emulate_urgency(srn())), Error);
}

TEST_CASE("demultiplexing Example 1", "[transform]") {
	Network net = demux_channels(elaborate(fixtures::model("ex1.mirela")));
	CHECK(net.demultiplexed);
	const Automaton &m = *net.find("M");
	CHECK(comm_labels(m, "s0") ==
	      std::vector<std::string>{"lock_{B-M}?->s1_B", "lock_{F1-M}?->s1_F1", "lock_{R-M}?->s1_R"});
	CHECK(comm_labels(m, "s1_F1") == std::vector<std::string>{"unlock_{F1-M}?->s0"});
	CHECK(comm_labels(m, "s1_B") == std::vector<std::string>{"unlock_{B-M}?->s0"});
	CHECK(comm_labels(m, "s1_R") == std::vector<std::string>{"unlock_{R-M}?->s0"});

	auto channels = net.channels();
	CHECK(channels.size() == 12);
	int locks = 0, unlocks = 0, data = 0;
	for (const auto &c : channels) {
		locks += c.kind == ChannelKind::Lock;
		unlocks += c.kind == ChannelKind::Unlock;
		data += c.kind == ChannelKind::Data;
	}
	CHECK(data == 6);
	CHECK(locks == 3);
	CHECK(unlocks == 3);

	const Automaton &f1 = *net.find("F1");
	CHECK(comm_labels(f1, "s2") == std::vector<std::string>{"lock_{F1-M}!->s3"});
	CHECK(comm_labels(f1, "s4") == std::vector<std::string>{"unlock_{F1-M}!->s0"});
}

TEST_CASE("single-client memory is a pure relabelling", "[transform]") {
	Network before = elaborate(parse_and_resolve("S = Periodic(1,2)[3,4]; M = Memory(S[1,2])."));
	Network after = demux_channels(before);
	for (std::size_t i = 0; i < before.automata.size(); ++i) {
		CHECK(before.automata[i].edges.size() == after.automata[i].edges.size());
		CHECK(before.automata[i].locations.size() == after.automata[i].locations.size());
	}
	const Automaton &m = *after.find("M");
	CHECK(comm_labels(m, "s0") == std::vector<std::string>{"lock_{S-M}?->s1"});
}

TEST_CASE("Example 1 after the full transform", "[transform]") {
	Network t = emulate_urgency(demux_channels(elaborate(fixtures::model("ex1.mirela"))));
	const Automaton &b = *t.find("B");
	std::vector<std::string> primed;
	for (const auto &l : b.locations)
		if (l.primed_of)
			primed.push_back(l.name);
	CHECK(primed == std::vector<std::string>{"s0'", "s1'", "s2'", "s4'", "s6'"});

	// escape from B.s4 waits for the memory to be idle
	const Edge *e = escape_of(b, "s4");
	REQUIRE(e);
	CHECK(e->blocked_by == std::vector<std::vector<LocRef>>{{{"M", "s0"}, {"M", "s0'"}}});

	// escape from B.s0 is blocked by either sender of B's inputs
	const Edge *e0 = escape_of(b, "s0");
	REQUIRE(e0);
	CHECK(e0->blocked_by ==
	      std::vector<std::vector<LocRef>>{{{"F2", "s2"}, {"F2", "s2'"}}, {{"S3", "s3"}, {"S3", "s3'"}}});

	Network original = demux_channels(elaborate(fixtures::model("ex1.mirela")));
	for (std::size_t i = 0; i < original.automata.size(); ++i) {
		const Automaton &o = original.automata[i];
		const Automaton &a = t.automata[i];
		CHECK(a.has_urgency_clock);
		for (std::size_t l = 0; l < o.locations.size(); ++l) {
			// activity locations, guards and invariants untouched
			CHECK(a.locations[l].invariant == o.locations[l].invariant);
			CHECK(a.locations[l].kind == o.locations[l].kind);
			bool communicates = !comm_labels(o, o.locations[l].name).empty();
			CHECK(a.locations[l].urgent == communicates);
			CHECK(a.find(o.locations[l].name + "'").has_value() == communicates);
		}
		for (std::size_t k = 0; k < o.edges.size(); ++k) {
			CHECK(a.edges[k].guard == o.edges[k].guard);
			CHECK(a.edges[k].reset == o.edges[k].reset);
		}
	}
	// deterministic output
	CHECK(dump_text(t) == dump_text(emulate_urgency(demux_channels(elaborate(fixtures::model("ex1.mirela"))))));
}
