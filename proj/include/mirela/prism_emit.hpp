#pragma once

#include "elaborator.hpp"
#include "semantics.hpp"

#include <map>
#include <set>
#include <sstream>

namespace mirela {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Integer code of every (component, location) pair in the emitted model.
struct NameMap {
	std::vector<std::pair<LocRef, int>> codes;

	std::optional<int> code(std::string_view component, std::string_view location) const {
		for (const auto &[ref, c] : codes)
			if (ref.automaton == component && ref.location == location)
				return c;
		return std::nullopt;
	}
};

struct EmittedModel {
	std::string model;
	std::string properties;
	NameMap names;
};

struct EmitOptions {
	Time scale = 1;
	Bounds bounds = Bounds::Closed;
};

namespace detail {

inline std::string location_var(const std::string &id) { return "l_" + id; }
inline std::string clock_var(const std::string &id) { return "x_" + id; }
inline std::string urgency_var(const std::string &id) { return "u_" + id; }

inline std::string sanitize(const std::string &s) {
	std::string out;
	for (char c : s)
		out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_');
	return out;
}

/// Synchronisation label of a binary channel: k_S1_F1, lock_F1_M, unlock_F1_M.
inline std::string channel_label(const Channel &c) {
	std::string prefix = c.kind == ChannelKind::Data ? "k" : c.kind == ChannelKind::Lock ? "lock" : "unlock";
	if (c.sender.empty())
		return prefix + "_" + c.receiver;
	return prefix + "_" + c.sender + "_" + c.receiver;
}

} // namespace detail

/// Serialises the network as a PRISM MDP with digital clocks and an explicit global `tick` action.
inline EmittedModel emit_model(const Network &net, const EmitOptions &opts = {}) {
	using namespace detail;
	EmittedModel out;

	std::map<std::string, std::string> labels;
	std::set<std::string> used;
	for (const auto &c : net.channels()) {
		std::string base = channel_label(c);
		std::string name = base;
		for (int i = 2; used.count(name) || name == "tick"; ++i)
			name = base + "_" + std::to_string(i);
		used.insert(name);
		labels[c.name()] = name;
	}

	std::set<std::string> seen_codes;
	for (const auto &a : net.automata)
		for (std::size_t l = 0; l < a.locations.size(); ++l) {
			if (!seen_codes.insert(a.id + "." + a.locations[l].name).second)
				throw Error("duplicate location name " + a.id + "." + a.locations[l].name);
			out.names.codes.push_back({{a.id, a.locations[l].name}, static_cast<int>(l)});
		}

	std::ostringstream os;
	os << "// MIRELA network " << net.name << ", generated by mirela " << kToolVersion << "\n";
	os << "// time scale: constants divided by " << opts.scale << "\n";
	os << "// invariant bounds: " << to_string(opts.bounds) << "\n";
	os << "// digital clocks, unit delay on the synchronised action [tick]\n";
	os << "// location codes:\n";
	for (const auto &a : net.automata) {
		os << "//   " << a.id << ":";
		for (std::size_t l = 0; l < a.locations.size(); ++l)
			os << " " << a.locations[l].name << "=" << l;
		os << "\n";
	}
	os << "\nmdp\n";

	for (const auto &a : net.automata) {
		const std::string lv = location_var(a.id);
		const std::string xv = clock_var(a.id);
		const std::string uv = urgency_var(a.id);
		const Time ceiling = clock_ceiling(a);
		auto at = [&](LocId l) { return lv + "=" + std::to_string(l); };
		auto target_ok = [&](const Edge &e) -> std::string {
			const auto &t = a.locations[e.to];
			if (!t.invariant || e.reset)
				return "";
			return " & " + xv + "<=" + std::to_string(invariant_bound(*t.invariant, opts.bounds));
		};
		auto updates = [&](const Edge &e) {
			std::string u = "(" + lv + "'=" + std::to_string(e.to) + ")";
			if (e.reset)
				u += " & (" + xv + "'=0)";
			if (e.reset_urgency && a.has_urgency_clock)
				u += " & (" + uv + "'=0)";
			return u;
		};

		os << "\nmodule " << a.id << "\n";
		os << "  " << lv << " : [0.." << a.locations.size() - 1 << "] init " << a.initial << ";\n";
		os << "  " << xv << " : [0.." << ceiling << "] init 0;\n";
		if (a.has_urgency_clock)
			os << "  " << uv << " : [0.." << kUrgencyCeiling << "] init 0;\n";
		os << "\n";
		for (const auto &e : a.edges) {
			switch (e.action) {
			case ActionKind::Internal:
				os << "  [] " << at(e.from) << " & " << xv << ">=" << e.guard << target_ok(e) << " -> " << updates(e)
				   << ";\n";
				break;
			case ActionKind::Send:
			case ActionKind::Receive:
				os << "  [" << labels.at(e.channel.name()) << "] " << at(e.from) << target_ok(e) << " -> " << updates(e)
				   << ";\n";
				break;
			case ActionKind::Escape: {
				os << "  [] " << at(e.from);
				for (const auto &group : e.blocked_by) {
					os << " & !(";
					for (std::size_t i = 0; i < group.size(); ++i) {
						const Automaton *peer = net.find(group[i].automaton);
						os << (i ? " | " : "") << location_var(group[i].automaton) << "="
						   << (peer ? peer->at(group[i].location) : 0);
					}
					if (group.empty())
						os << "false";
					os << ")";
				}
				os << " -> " << updates(e) << ";\n";
				break;
			}
			}
		}

		std::string guard;
		for (std::size_t l = 0; l < a.locations.size(); ++l) {
			const auto &loc = a.locations[l];
			std::string clause;
			if (loc.urgent)
				clause = lv + "!=" + std::to_string(l);
			else if (loc.invariant) {
				// x+1 must still satisfy the invariant after the tick
				auto top = invariant_bound(*loc.invariant, opts.bounds) - 1;
				clause = lv + "!=" + std::to_string(l) + " | " + xv + "<=" + std::to_string(top);
			}
			if (!clause.empty())
				guard += (guard.empty() ? "(" : " & (") + clause + ")";
		}
		if (guard.empty())
			guard = "true";
		os << "  [tick] " << guard << " -> (" << xv << "'=min(" << xv << "+1," << ceiling << "))";
		if (a.has_urgency_clock)
			os << " & (" << uv << "'=min(" << uv << "+1," << kUrgencyCeiling << "))";
		os << ";\n";
		os << "endmodule\n";
	}
	out.model = os.str();
	return out;
}

/// phi / psi / rho for every primed wait location in onlyS and W, one named property per line.
inline std::string emit_properties(const StaticPartition &partition, const NameMap &names) {
	std::vector<LocRef> locations = partition.only_s;
	locations.insert(locations.end(), partition.w.begin(), partition.w.end());
	auto order = [&](const LocRef &r) {
		for (std::size_t i = 0; i < names.codes.size(); ++i)
			if (names.codes[i].first == r)
				return i;
		return names.codes.size();
	};
	std::stable_sort(locations.begin(), locations.end(),
	                 [&](const LocRef &a, const LocRef &b) { return order(a) < order(b); });
	if (locations.empty())
		return "";

	std::ostringstream os;
	os << "// phi = E[F E[G w']], psi = E[F A[G w']], rho = E[F E[G (w' & E[F !w'])]]\n";
	for (const auto &r : locations) {
		std::string primed = r.location + "'";
		auto code = names.code(r.automaton, primed);
		if (!code)
			code = names.code(r.automaton, r.location);
		if (!code)
			throw Error("no code for location " + r.automaton + "." + r.location);
		std::string atom = detail::location_var(r.automaton) + "=" + std::to_string(*code);
		std::string tag = detail::sanitize(r.automaton + "_" + r.location);
		os << "\"phi_" << tag << "\": E [ F (E [ G (" << atom << ") ]) ];\n";
		os << "\"psi_" << tag << "\": E [ F (A [ G (" << atom << ") ]) ];\n";
		os << "\"rho_" << tag << "\": E [ F (E [ G ((" << atom << ") & E [ F !(" << atom << ") ]) ]) ];\n";
	}
	return os.str();
}

} // namespace mirela
