#pragma once

#include "spec.hpp"
#include "tast.hpp"

#include <functional>

namespace mirela {

class ElaborationError : public Error {
public:
	using Error::Error;
};

namespace detail {

class AutomatonBuilder {
public:
	AutomatonBuilder(std::string id, ComponentKind kind) {
		a_.id = std::move(id);
		a_.kind = kind;
	}

	LocId wait() { return add(LocationKind::Wait, std::nullopt); }
	LocId activity(std::optional<Time> bound) { return add(LocationKind::Activity, bound); }

	void internal(LocId from, LocId to, Time guard, bool reset) {
		Edge e;
		e.from = from;
		e.to = to;
		e.action = ActionKind::Internal;
		e.guard = guard;
		e.reset = reset;
		a_.edges.push_back(std::move(e));
	}

	void sync(LocId from, LocId to, ActionKind action, Channel channel, bool reset) {
		Edge e;
		e.from = from;
		e.to = to;
		e.action = action;
		e.channel = std::move(channel);
		e.reset = reset;
		a_.edges.push_back(std::move(e));
	}

	Automaton finish() { return std::move(a_); }

private:
	LocId add(LocationKind kind, std::optional<Time> bound) {
		Location l;
		l.name = "s" + std::to_string(a_.locations.size());
		l.kind = kind;
		if (bound && *bound != kUnbounded)
			l.invariant = bound;
		a_.locations.push_back(std::move(l));
		return static_cast<LocId>(a_.locations.size() - 1);
	}

	Automaton a_;
};

/// Interval of each source after inheriting from the nearest following source with one.
inline std::vector<Interval> source_intervals(const ComponentDecl &c) {
	std::vector<Interval> out(c.sources.size());
	std::optional<Interval> next;
	for (std::size_t i = c.sources.size(); i-- > 0;) {
		if (c.sources[i].interval)
			next = c.sources[i].interval;
		if (!next)
			throw ElaborationError("source '" + c.sources[i].id + "' of '" + c.id +
			                       "' has no interval and no later source provides one");
		out[i] = *next;
	}
	return out;
}

class Elaborator {
public:
	explicit Elaborator(const ResolvedSpec &spec) : spec_(spec) {}

	Network run() {
		Network net;
		net.name = spec_.name;
		for (const auto &c : spec_.components) {
			net.automata.push_back(component(c));
			if (c.kind == ComponentKind::Aperiodic)
				net.aperiodic_sites.push_back({c.id, "s0"});
		}
		return net;
	}

private:
	struct Exit {
		LocId from;
		Time guard;
	};

	Interval memory_interval(const ComponentDecl &client, const ComponentDecl &memory) const {
		auto intervals = source_intervals(memory);
		for (std::size_t i = 0; i < memory.sources.size(); ++i)
			if (memory.sources[i].id == client.id)
				return intervals[i];
		throw ElaborationError("memory '" + memory.id + "' does not list '" + client.id + "' as a source");
	}

	// Output sequence over the resolved target list; every exit leaves an activity location
	// through its guard and the sequence returns to `back`.
	void outputs(AutomatonBuilder &b, const ComponentDecl &c, const std::vector<Exit> &exits, LocId back,
	             bool reset_last) {
		if (c.targets.empty()) {
			for (const auto &x : exits)
				b.internal(x.from, back, x.guard, reset_last);
			return;
		}
		LocId cur = b.wait();
		for (const auto &x : exits)
			b.internal(x.from, cur, x.guard, false);
		for (std::size_t i = 0; i < c.targets.size(); ++i) {
			bool last = i + 1 == c.targets.size();
			const ComponentDecl &t = *spec_.find(c.targets[i]);
			if (t.kind == ComponentKind::Memory) {
				Interval iv = memory_interval(c, t);
				LocId hold = b.activity(iv.max);
				b.sync(cur, hold, ActionKind::Send, {ChannelKind::Lock, "", t.id}, true);
				LocId release = b.wait();
				b.internal(hold, release, iv.min, false);
				LocId next = last ? back : b.wait();
				b.sync(release, next, ActionKind::Send, {ChannelKind::Unlock, "", t.id}, last && reset_last);
				cur = next;
			} else {
				LocId next = last ? back : b.wait();
				b.sync(cur, next, ActionKind::Send, {ChannelKind::Data, c.id, t.id}, last && reset_last);
				cur = next;
			}
		}
	}

	Channel feed(const std::string &from, const ComponentDecl &c) const { return {ChannelKind::Data, from, c.id}; }

	Automaton component(const ComponentDecl &c) {
		AutomatonBuilder b(c.id, c.kind);
		switch (c.kind) {
		case ComponentKind::Periodic: {
			LocId start = b.activity(c.start->max);
			LocId capture = b.activity(c.work->max);
			b.internal(start, capture, c.start->min, true);
			outputs(b, c, {{capture, c.work->min}}, capture, true);
			break;
		}
		case ComponentKind::Aperiodic: {
			LocId event = b.activity(std::nullopt);
			outputs(b, c, {{event, c.work->min}}, event, true);
			break;
		}
		case ComponentKind::First: {
			LocId idle = b.wait();
			auto intervals = source_intervals(c);
			std::vector<Interval> groups;
			std::vector<LocId> group_loc;
			std::vector<LocId> proc(c.sources.size());
			for (std::size_t i = 0; i < c.sources.size(); ++i) {
				auto it = std::find(groups.begin(), groups.end(), intervals[i]);
				if (it == groups.end()) {
					groups.push_back(intervals[i]);
					group_loc.push_back(b.activity(intervals[i].max));
					proc[i] = group_loc.back();
				} else {
					proc[i] = group_loc[static_cast<std::size_t>(it - groups.begin())];
				}
			}
			for (std::size_t i = 0; i < c.sources.size(); ++i)
				b.sync(idle, proc[i], ActionKind::Receive, feed(c.sources[i].id, c), true);
			std::vector<Exit> exits;
			for (std::size_t g = 0; g < groups.size(); ++g)
				exits.push_back({group_loc[g], groups[g].min});
			outputs(b, c, exits, idle, false);
			break;
		}
		case ComponentKind::Both: {
			const auto &first = c.sources[0].id;
			const auto &second = c.sources[1].id;
			LocId idle = b.wait();
			LocId got_second = b.wait();
			LocId got_first = b.wait();
			LocId proc = b.activity(c.work->max);
			b.sync(idle, got_second, ActionKind::Receive, feed(second, c), false);
			b.sync(got_second, proc, ActionKind::Receive, feed(first, c), true);
			b.sync(idle, got_first, ActionKind::Receive, feed(first, c), false);
			b.sync(got_first, proc, ActionKind::Receive, feed(second, c), true);
			outputs(b, c, {{proc, c.work->min}}, idle, false);
			break;
		}
		case ComponentKind::Priority: {
			const auto &master = c.sources[0];
			const auto &slave = c.sources[1];
			if (!master.interval || !slave.interval)
				throw ElaborationError("Priority '" + c.id + "' needs intervals for master and slave");
			LocId idle = b.wait();
			LocId proc = b.activity(master.interval->max);
			LocId slave_ready = b.wait();
			bool merged = *master.interval == *slave.interval;
			LocId proc_slave = merged ? proc : b.activity(slave.interval->max);
			b.sync(idle, proc, ActionKind::Receive, feed(master.id, c), true);
			b.sync(idle, slave_ready, ActionKind::Receive, feed(slave.id, c), false);
			b.sync(slave_ready, proc_slave, ActionKind::Receive, feed(master.id, c), true);
			std::vector<Exit> exits{{proc, master.interval->min}};
			if (!merged)
				exits.push_back({proc_slave, slave.interval->min});
			outputs(b, c, exits, idle, false);
			break;
		}
		case ComponentKind::Memory: {
			LocId idle = b.wait();
			LocId held = b.wait();
			b.sync(idle, held, ActionKind::Receive, {ChannelKind::Lock, "", c.id}, false);
			b.sync(held, idle, ActionKind::Receive, {ChannelKind::Unlock, "", c.id}, false);
			break;
		}
		case ComponentKind::Rendering: {
			const auto &mem = c.sources[0];
			LocId idle = b.wait();
			LocId reading = b.activity(mem.interval->max);
			LocId release = b.wait();
			LocId render = b.activity(c.start->max);
			b.sync(idle, reading, ActionKind::Send, {ChannelKind::Lock, "", mem.id}, true);
			b.internal(reading, release, mem.interval->min, false);
			b.sync(release, render, ActionKind::Send, {ChannelKind::Unlock, "", mem.id}, true);
			b.internal(render, idle, c.start->min, false);
			break;
		}
		}
		return b.finish();
	}

	const ResolvedSpec &spec_;
};

} // namespace detail

/// Structural TAST well-formedness problems of one automaton (empty when well formed).
inline std::vector<std::string> validate(const Automaton &a) {
	std::vector<std::string> problems;
	auto where = [&](LocId l) { return a.id + "." + a.locations[l].name; };
	if (a.initial >= a.locations.size()) {
		problems.push_back(a.id + ": initial location out of range");
		return problems;
	}

	std::vector<bool> seen(a.locations.size(), false);
	std::vector<LocId> stack{a.initial};
	seen[a.initial] = true;
	while (!stack.empty()) {
		LocId l = stack.back();
		stack.pop_back();
		for (const auto &e : a.edges)
			if (e.from == l && !seen[e.to]) {
				seen[e.to] = true;
				stack.push_back(e.to);
			}
	}
	for (std::size_t l = 0; l < a.locations.size(); ++l)
		if (!seen[l])
			problems.push_back(where(static_cast<LocId>(l)) + " is unreachable from the initial location");

	for (std::size_t li = 0; li < a.locations.size(); ++li) {
		auto l = static_cast<LocId>(li);
		const Location &loc = a.locations[l];
		bool has_out = false;
		for (const auto &e : a.edges) {
			if (e.from == l) {
				has_out = true;
				if (loc.kind == LocationKind::Activity) {
					if (e.action != ActionKind::Internal)
						problems.push_back(where(l) + ": activity location with a communication edge");
					else if (e.guard == 0)
						problems.push_back(where(l) + ": guard x>=0 (constant must be positive)");
					else if (loc.invariant && e.guard >= *loc.invariant)
						problems.push_back(where(l) + ": guard x>=" + std::to_string(e.guard) +
						                   " not below invariant x<" + std::to_string(*loc.invariant));
				} else if (e.action == ActionKind::Internal) {
					problems.push_back(where(l) + ": wait location with a guarded edge");
				}
			}
			if (e.to == l && loc.kind == LocationKind::Activity && !e.reset)
				problems.push_back(where(l) + ": incoming edge from " + a.locations[e.from].name + " does not reset x");
		}
		if (!has_out)
			problems.push_back(where(l) + " has no outgoing edge");
		if (loc.kind == LocationKind::Wait && loc.invariant)
			problems.push_back(where(l) + ": wait location with an invariant");
	}
	return problems;
}

/// Builds one automaton per component following the component templates.
inline Network elaborate(const ResolvedSpec &spec) {
	Network net = detail::Elaborator(spec).run();
	std::string report;
	for (const auto &a : net.automata)
		for (const auto &p : validate(a))
			report += "\n  " + p;
	if (!report.empty())
		throw ElaborationError("elaborated network violates TAST rules:" + report);
	return net;
}

struct ZenoViolation {
	std::string automaton;
	/// Location names along the cycle, first location repeated at the end.
	std::vector<std::string> cycle;
};

/// Every cycle must carry a guard x>=e with e>0 and a reset of x, or consist of inputs only.
inline std::vector<ZenoViolation> check_zeno_free(const Network &net) {
	std::vector<ZenoViolation> out;
	for (const auto &a : net.automata) {
		const std::size_t n = a.locations.size();

		// Tarjan SCCs.
		std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
		std::vector<bool> on_stack(n, false);
		std::vector<std::size_t> stack;
		int counter = 0, ncomp = 0;
		std::function<void(std::size_t)> strong = [&](std::size_t v) {
			index[v] = low[v] = counter++;
			stack.push_back(v);
			on_stack[v] = true;
			for (const auto &e : a.edges) {
				if (e.from != v)
					continue;
				if (index[e.to] < 0) {
					strong(e.to);
					low[v] = std::min(low[v], low[e.to]);
				} else if (on_stack[e.to]) {
					low[v] = std::min(low[v], index[e.to]);
				}
			}
			if (low[v] == index[v]) {
				std::size_t w;
				do {
					w = stack.back();
					stack.pop_back();
					on_stack[w] = false;
					comp[w] = ncomp;
				} while (w != v);
				++ncomp;
			}
		};
		for (std::size_t v = 0; v < n; ++v)
			if (index[v] < 0)
				strong(v);

		// Elementary cycles, each enumerated once from its smallest location.
		std::vector<const Edge *> path;
		std::vector<bool> blocked(n, false);
		auto cycle_ok = [&]() {
			bool guard = false, reset = false, inputs_only = true;
			for (const Edge *e : path) {
				guard |= e->action == ActionKind::Internal && e->guard > 0;
				reset |= e->reset;
				inputs_only &= e->action == ActionKind::Receive;
			}
			return (guard && reset) || inputs_only;
		};
		std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t start, std::size_t v) {
			blocked[v] = true;
			for (const auto &e : a.edges) {
				if (e.from != v || comp[e.to] != comp[start] || e.to < start)
					continue;
				path.push_back(&e);
				if (e.to == start) {
					if (!cycle_ok()) {
						ZenoViolation z{a.id, {}};
						for (const Edge *pe : path)
							z.cycle.push_back(a.locations[pe->from].name);
						z.cycle.push_back(a.locations[start].name);
						out.push_back(std::move(z));
					}
				} else if (!blocked[e.to]) {
					walk(start, e.to);
				}
				path.pop_back();
			}
			blocked[v] = false;
		};
		for (std::size_t s = 0; s < n; ++s)
			walk(s, s);
	}
	return out;
}

enum class StaticSet { N, OnlyS, W };

inline std::string_view to_string(StaticSet s) {
	switch (s) {
	case StaticSet::N: return "N";
	case StaticSet::OnlyS: return "onlyS";
	case StaticSet::W: return "W";
	}
	return "?";
}

struct StaticPartition {
	std::vector<LocRef> n;
	std::vector<LocRef> only_s;
	std::vector<LocRef> w;

	std::optional<StaticSet> set_of(const LocRef &r) const {
		if (std::find(n.begin(), n.end(), r) != n.end())
			return StaticSet::N;
		if (std::find(only_s.begin(), only_s.end(), r) != only_s.end())
			return StaticSet::OnlyS;
		if (std::find(w.begin(), w.end(), r) != w.end())
			return StaticSet::W;
		return std::nullopt;
	}
};

inline StaticSet classify_wait(const Automaton &a, LocId l) {
	bool lock_send = false;
	for (const auto &e : a.edges) {
		if (e.from != l)
			continue;
		if ((e.action == ActionKind::Send || e.action == ActionKind::Receive) && e.channel.kind == ChannelKind::Unlock)
			return StaticSet::N;
		lock_send |= e.action == ActionKind::Send && e.channel.kind == ChannelKind::Lock;
	}
	return lock_send ? StaticSet::OnlyS : StaticSet::W;
}

/// Splits the (unprimed) wait locations into N (unlock origins), onlyS (lock! origins) and W.
inline StaticPartition static_partition(const Network &net) {
	StaticPartition p;
	for (const auto &a : net.automata) {
		for (std::size_t li = 0; li < a.locations.size(); ++li) {
			const auto &loc = a.locations[li];
			if (loc.kind != LocationKind::Wait || loc.primed_of)
				continue;
			LocRef ref{a.id, loc.name};
			switch (classify_wait(a, static_cast<LocId>(li))) {
			case StaticSet::N: p.n.push_back(ref); break;
			case StaticSet::OnlyS: p.only_s.push_back(ref); break;
			case StaticSet::W: p.w.push_back(ref); break;
			}
		}
	}
	return p;
}

} // namespace mirela
