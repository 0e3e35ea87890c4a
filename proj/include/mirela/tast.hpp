#pragma once

#include "spec.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mirela {

using LocId = std::uint16_t;

enum class LocationKind { Activity, Wait };

struct Location {
	std::string name;
	LocationKind kind = LocationKind::Wait;
	/// Strict upper bound `x < c` on the component clock.
	std::optional<Time> invariant;
	/// Urgency invariant `u <= 0` added by the urgency emulation.
	bool urgent = false;
	/// For a primed copy w', the id of w.
	std::optional<LocId> primed_of;

	friend bool operator==(const Location &, const Location &) = default;
};

/// Reference to a location of another automaton, by automaton id and location name.
struct LocRef {
	std::string automaton;
	std::string location;

	friend bool operator==(const LocRef &, const LocRef &) = default;
	friend auto operator<=>(const LocRef &, const LocRef &) = default;
};

enum class ActionKind { Internal, Send, Receive, Escape };

struct Edge {
	LocId from = 0;
	LocId to = 0;
	ActionKind action = ActionKind::Internal;
	/// Lower bound `x >= guard` for internal edges.
	Time guard = 0;
	/// Channel for send/receive edges.
	Channel channel;
	bool reset = false;
	bool reset_urgency = false;
	/// Escape guard: not(g_1 or ... or g_m) where each g_i is a disjunction of peer-location atoms.
	std::vector<std::vector<LocRef>> blocked_by;

	friend bool operator==(const Edge &, const Edge &) = default;
};

struct Automaton {
	std::string id;
	ComponentKind kind = ComponentKind::First;
	std::vector<Location> locations;
	std::vector<Edge> edges;
	LocId initial = 0;
	bool has_urgency_clock = false;

	std::optional<LocId> find(std::string_view name) const {
		for (std::size_t i = 0; i < locations.size(); ++i)
			if (locations[i].name == name)
				return static_cast<LocId>(i);
		return std::nullopt;
	}

	LocId at(std::string_view name) const {
		auto l = find(name);
		if (!l)
			throw Error("automaton '" + id + "' has no location '" + std::string(name) + "'");
		return *l;
	}

	friend bool operator==(const Automaton &, const Automaton &) = default;
};

struct Network {
	std::string name;
	std::vector<Automaton> automata;
	/// Intrinsic unbounded-waiting sites (activity locations of aperiodic sensors).
	std::vector<LocRef> aperiodic_sites;
	bool demultiplexed = false;
	bool urgency_emulated = false;

	const Automaton *find(std::string_view id) const {
		for (const auto &a : automata)
			if (a.id == id)
				return &a;
		return nullptr;
	}

	std::optional<std::size_t> index_of(std::string_view id) const {
		for (std::size_t i = 0; i < automata.size(); ++i)
			if (automata[i].id == id)
				return i;
		return std::nullopt;
	}

	/// Channels in order of first appearance on a send edge.
	std::vector<Channel> channels() const {
		std::vector<Channel> out;
		for (const auto &a : automata)
			for (const auto &e : a.edges)
				if (e.action == ActionKind::Send && std::find(out.begin(), out.end(), e.channel) == out.end())
					out.push_back(e.channel);
		return out;
	}

	friend bool operator==(const Network &, const Network &) = default;
};

inline std::string describe_action(const Edge &e) {
	switch (e.action) {
	case ActionKind::Internal: return "x>=" + std::to_string(e.guard);
	case ActionKind::Send: return e.channel.name() + "!";
	case ActionKind::Receive: return e.channel.name() + "?";
	case ActionKind::Escape: {
		std::string s;
		for (std::size_t i = 0; i < e.blocked_by.size(); ++i) {
			s += i ? " & !(" : "!(";
			for (std::size_t j = 0; j < e.blocked_by[i].size(); ++j)
				s += (j ? " | " : "") + e.blocked_by[i][j].automaton + "." + e.blocked_by[i][j].location;
			s += ")";
		}
		return s.empty() ? "true" : s;
	}
	}
	return "?";
}

/// Structured text dump, one block per automaton.
inline std::string dump_text(const Network &net) {
	std::ostringstream os;
	os << "network " << net.name << "\n";
	for (const auto &a : net.automata) {
		os << "automaton " << a.id << " : " << to_string(a.kind) << "\n";
		os << "  clocks x" << (a.has_urgency_clock ? " u" : "") << "\n";
		os << "  initial " << a.locations[a.initial].name << "\n";
		for (const auto &l : a.locations) {
			os << "  location " << l.name << (l.kind == LocationKind::Activity ? " activity" : " wait");
			if (l.invariant)
				os << " inv x<" << *l.invariant;
			if (l.urgent)
				os << " inv u<=0";
			os << "\n";
		}
		for (const auto &e : a.edges) {
			os << "  edge " << a.locations[e.from].name << " -> " << a.locations[e.to].name << " [" << describe_action(e)
			   << "]";
			if (e.reset)
				os << " x:=0";
			if (e.reset_urgency)
				os << " u:=0";
			os << "\n";
		}
		os << "end\n";
	}
	return os.str();
}

/// Graphviz rendering of the network, one cluster per automaton.
inline std::string dump_dot(const Network &net) {
	auto quote = [](std::string s) {
		std::string out = "\"";
		for (char c : s) {
			if (c == '"' || c == '\\')
				out.push_back('\\');
			out.push_back(c);
		}
		return out + "\"";
	};
	std::ostringstream os;
	os << "digraph " << quote(net.name) << " {\n  rankdir=LR;\n";
	for (std::size_t i = 0; i < net.automata.size(); ++i) {
		const auto &a = net.automata[i];
		os << "  subgraph cluster_" << i << " {\n    label=" << quote(a.id) << ";\n";
		for (std::size_t l = 0; l < a.locations.size(); ++l) {
			const auto &loc = a.locations[l];
			std::string label = loc.name;
			if (loc.invariant)
				label += "\\nx<" + std::to_string(*loc.invariant);
			if (loc.urgent)
				label += "\\nu<=0";
			os << "    n" << i << "_" << l << " [label=" << quote(label)
			   << (loc.kind == LocationKind::Activity ? ", style=filled, fillcolor=lightblue" : "")
			   << (l == a.initial ? ", peripheries=2" : "") << "];\n";
		}
		for (const auto &e : a.edges) {
			std::string label = describe_action(e);
			if (e.reset)
				label += " x:=0";
			os << "    n" << i << "_" << e.from << " -> n" << i << "_" << e.to << " [label=" << quote(label) << "];\n";
		}
		os << "  }\n";
	}
	os << "}\n";
	return os.str();
}

} // namespace mirela
