#pragma once

#include "tast.hpp"

#include <cstring>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <unordered_map>

namespace mirela {

class ScaleError : public Error {
public:
	using Error::Error;
};

/// Raised when exploration exceeds the configured transition budget.
class StateCapExceeded : public Error {
public:
	StateCapExceeded(std::uint64_t cap, std::size_t states, std::size_t frontier)
	    : Error("state cap exceeded: explored " + std::to_string(cap) + " transitions, " + std::to_string(states) +
	            " states stored, frontier " + std::to_string(frontier)),
	      states_(states), frontier_(frontier) {}

	std::size_t states() const { return states_; }
	std::size_t frontier() const { return frontier_; }

private:
	std::size_t states_;
	std::size_t frontier_;
};

using ClockValue = std::uint16_t;

inline constexpr std::uint64_t kDefaultStateCap = 50'000'000;

/// 1 + the largest constant compared against the component clock.
inline Time clock_ceiling(const Automaton &a) {
	Time m = 0;
	for (const auto &l : a.locations)
		if (l.invariant)
			m = std::max(m, *l.invariant);
	for (const auto &e : a.edges)
		if (e.action == ActionKind::Internal)
			m = std::max(m, e.guard);
	return m + 1;
}

/// How an invariant x<c is read over integer clocks. Closed keeps x<=c, the weakening
/// used by digital-clock engines that reject strict bounds; Strict uses the exact
/// integer reading x<=c-1.
enum class Bounds { Closed, Strict };

inline std::string_view to_string(Bounds b) { return b == Bounds::Closed ? "closed" : "strict"; }

/// Largest admissible clock value under invariant x<c; negative when nothing is admissible.
inline std::int64_t invariant_bound(Time c, Bounds b) {
	return b == Bounds::Closed ? std::int64_t{c} : std::int64_t{c} - 1;
}

/// The urgency clock is only ever compared with 0.
inline constexpr Time kUrgencyCeiling = 1;

/// gcd of every timing constant in the network (1 when there are none).
inline Time timing_gcd(const Network &net) {
	Time g = 0;
	for (const auto &a : net.automata) {
		for (const auto &e : a.edges)
			if (e.action == ActionKind::Internal)
				g = std::gcd(g, e.guard);
		for (const auto &l : a.locations)
			if (l.invariant)
				g = std::gcd(g, *l.invariant);
	}
	return g == 0 ? 1 : g;
}

/// Divides every guard and invariant constant by `divisor`.
inline Network scale_constants(const Network &in, Time divisor) {
	if (divisor == 0)
		throw ScaleError("scale divisor must be positive");
	Network net = in;
	auto divide = [&](Time &c, const std::string &where) {
		if (c % divisor != 0)
			throw ScaleError("constant " + std::to_string(c) + " in " + where + " is not divisible by " +
			                 std::to_string(divisor));
		c /= divisor;
	};
	for (auto &a : net.automata) {
		for (auto &e : a.edges)
			if (e.action == ActionKind::Internal)
				divide(e.guard, a.id + " guard " + a.locations[e.from].name + "->" + a.locations[e.to].name);
		for (auto &l : a.locations)
			if (l.invariant)
				divide(*l.invariant, a.id + " invariant of " + l.name);
	}
	return net;
}

/// Location vector plus clamped clocks, interleaved as x_0, u_0, x_1, u_1, ...
struct GlobalState {
	std::vector<LocId> locs;
	std::vector<ClockValue> clocks;

	ClockValue x(std::size_t i) const { return clocks[2 * i]; }
	ClockValue u(std::size_t i) const { return clocks[2 * i + 1]; }

	friend bool operator==(const GlobalState &, const GlobalState &) = default;
};

/// Reachable discrete state space: a Kripke structure whose atoms are `at(component, location)`.
struct TransitionSystem {
	std::vector<std::string> components;
	std::vector<std::vector<std::string>> location_names;
	/// Flat per-state storage, `components.size()` locations and twice as many clocks per state.
	std::vector<LocId> locs;
	std::vector<ClockValue> clocks;
	std::vector<std::uint32_t> offsets{0};
	std::vector<std::uint32_t> targets;
	std::uint32_t initial = 0;

	std::size_t size() const { return offsets.size() - 1; }
	std::size_t transitions() const { return targets.size(); }
	std::size_t width() const { return components.size(); }

	std::span<const std::uint32_t> successors(std::size_t s) const {
		return {targets.data() + offsets[s], targets.data() + offsets[s + 1]};
	}

	LocId location(std::size_t s, std::size_t component) const { return locs[s * width() + component]; }

	GlobalState state(std::size_t s) const {
		GlobalState g;
		g.locs.assign(locs.begin() + static_cast<std::ptrdiff_t>(s * width()),
		              locs.begin() + static_cast<std::ptrdiff_t>((s + 1) * width()));
		g.clocks.assign(clocks.begin() + static_cast<std::ptrdiff_t>(2 * s * width()),
		                clocks.begin() + static_cast<std::ptrdiff_t>(2 * (s + 1) * width()));
		return g;
	}

	std::optional<std::pair<std::size_t, LocId>> resolve(std::string_view component, std::string_view location) const {
		for (std::size_t c = 0; c < components.size(); ++c) {
			if (components[c] != component)
				continue;
			for (std::size_t l = 0; l < location_names[c].size(); ++l)
				if (location_names[c][l] == location)
					return std::pair{c, static_cast<LocId>(l)};
		}
		return std::nullopt;
	}
};

struct BuildOptions {
	std::uint64_t state_cap = kDefaultStateCap;
	Bounds bounds = Bounds::Closed;
	/// Zero clocks that are reset before being read again. Yields a bisimilar, smaller system.
	bool reduce_dead_clocks = true;
};

namespace detail {

struct CompiledEdge {
	LocId to;
	ActionKind action;
	ClockValue guard;
	std::uint32_t channel;
	bool reset;
	bool reset_urgency;
	std::vector<std::vector<std::pair<std::uint32_t, LocId>>> blocked_by;
};

struct CompiledAutomaton {
	ClockValue ceiling;
	/// Largest admissible x per location, or ceiling when unconstrained.
	std::vector<std::int32_t> x_max;
	std::vector<bool> urgent;
	std::vector<std::vector<CompiledEdge>> out;
	std::vector<bool> x_live;
	std::vector<bool> u_live;
};

/// Network lowered to index form, shared by both successor relations.
class CompiledNetwork {
public:
	explicit CompiledNetwork(const Network &net, Bounds bounds = Bounds::Closed) : net_(net) {
		std::map<std::string, std::uint32_t> channel_ids;
		auto channel_id = [&](const Channel &c) {
			auto [it, fresh] = channel_ids.emplace(c.name(), static_cast<std::uint32_t>(channel_ids.size()));
			if (fresh) {
				sender_.push_back(kNone);
				receiver_.push_back(kNone);
			}
			return it->second;
		};
		for (std::size_t i = 0; i < net.automata.size(); ++i) {
			const auto &a = net.automata[i];
			CompiledAutomaton ca;
			Time ceil = clock_ceiling(a);
			if (ceil > 0xFFFE)
				throw Error("clock ceiling of " + a.id + " (" + std::to_string(ceil) +
				            ") is too large; scale the constants down");
			ca.ceiling = static_cast<ClockValue>(ceil);
			for (const auto &l : a.locations) {
				ca.x_max.push_back(l.invariant ? static_cast<std::int32_t>(invariant_bound(*l.invariant, bounds)) : ca.ceiling);
				ca.urgent.push_back(l.urgent);
			}
			ca.out.resize(a.locations.size());
			for (const auto &e : a.edges) {
				CompiledEdge ce{e.to, e.action, static_cast<ClockValue>(e.guard), kNone, e.reset, e.reset_urgency, {}};
				if (e.action == ActionKind::Send || e.action == ActionKind::Receive) {
					ce.channel = channel_id(e.channel);
					auto &owner = e.action == ActionKind::Send ? sender_[ce.channel] : receiver_[ce.channel];
					if (owner != kNone && owner != i)
						throw Error("channel " + e.channel.name() + " has more than one " +
						            (e.action == ActionKind::Send ? "sender" : "receiver"));
					owner = static_cast<std::uint32_t>(i);
				}
				for (const auto &group : e.blocked_by) {
					std::vector<std::pair<std::uint32_t, LocId>> g;
					for (const auto &r : group) {
						auto idx = net.index_of(r.automaton);
						if (!idx)
							throw Error("escape guard refers to unknown automaton " + r.automaton);
						auto loc = net.automata[*idx].find(r.location);
						if (loc)
							g.emplace_back(static_cast<std::uint32_t>(*idx), *loc);
					}
					ce.blocked_by.push_back(std::move(g));
				}
				ca.out[e.from].push_back(std::move(ce));
			}
			compute_liveness(ca);
			automata_.push_back(std::move(ca));
		}
		for (std::size_t c = 0; c < sender_.size(); ++c)
			if (sender_[c] != kNone && receiver_[c] != kNone && sender_[c] == receiver_[c])
				throw Error("channel used for self-synchronisation");
	}

	static constexpr std::uint32_t kNone = 0xFFFFFFFF;

	const Network &network() const { return net_; }
	std::size_t size() const { return automata_.size(); }
	const CompiledAutomaton &automaton(std::size_t i) const { return automata_[i]; }
	std::uint32_t receiver(std::uint32_t channel) const { return receiver_[channel]; }

	bool admissible(std::size_t i, LocId l, ClockValue x, ClockValue u) const {
		const auto &a = automata_[i];
		return std::int32_t{x} <= a.x_max[l] && (!a.urgent[l] || u == 0);
	}

	GlobalState initial() const {
		GlobalState s;
		for (const auto &a : net_.automata)
			s.locs.push_back(a.initial);
		s.clocks.assign(2 * size(), 0);
		return s;
	}

	void normalize(GlobalState &s, bool reduce) const {
		if (!reduce)
			return;
		for (std::size_t i = 0; i < size(); ++i) {
			if (!automata_[i].x_live[s.locs[i]])
				s.clocks[2 * i] = 0;
			if (!automata_[i].u_live[s.locs[i]])
				s.clocks[2 * i + 1] = 0;
		}
	}

	/// Applies one automaton's edge; false when the target invariant fails.
	bool take(GlobalState &s, std::size_t i, const CompiledEdge &e) const {
		ClockValue x = e.reset ? 0 : s.clocks[2 * i];
		ClockValue u = e.reset_urgency ? 0 : s.clocks[2 * i + 1];
		if (!admissible(i, e.to, x, u))
			return false;
		s.locs[i] = e.to;
		s.clocks[2 * i] = x;
		s.clocks[2 * i + 1] = u;
		return true;
	}

	/// Unit delay, or nullopt when some invariant would be violated.
	std::optional<GlobalState> tick(const GlobalState &s) const {
		GlobalState t = s;
		for (std::size_t i = 0; i < size(); ++i) {
			const auto &a = automata_[i];
			ClockValue x = static_cast<ClockValue>(std::min<int>(s.clocks[2 * i] + 1, a.ceiling));
			ClockValue u = static_cast<ClockValue>(std::min<int>(s.clocks[2 * i + 1] + 1, kUrgencyCeiling));
			if (!admissible(i, s.locs[i], x, u))
				return std::nullopt;
			t.clocks[2 * i] = x;
			t.clocks[2 * i + 1] = u;
		}
		return t;
	}

	/// Discrete moves common to both semantics: internal edges and binary synchronisations.
	template <class Emit>
	bool discrete(const GlobalState &s, Emit &&emit) const {
		bool synced = false;
		for (std::size_t i = 0; i < size(); ++i) {
			for (const auto &e : automata_[i].out[s.locs[i]]) {
				if (e.action == ActionKind::Internal) {
					if (s.clocks[2 * i] < e.guard)
						continue;
					GlobalState t = s;
					if (take(t, i, e))
						emit(std::move(t));
				} else if (e.action == ActionKind::Send) {
					std::uint32_t j = receiver_[e.channel];
					if (j == kNone)
						continue;
					for (const auto &f : automata_[j].out[s.locs[j]]) {
						if (f.action != ActionKind::Receive || f.channel != e.channel)
							continue;
						GlobalState t = s;
						if (take(t, i, e) && take(t, j, f)) {
							synced = true;
							emit(std::move(t));
						}
					}
				}
			}
		}
		return synced;
	}

private:
	static void compute_liveness(CompiledAutomaton &a) {
		const std::size_t n = a.out.size();
		a.x_live.assign(n, false);
		a.u_live.assign(n, false);
		for (std::size_t l = 0; l < n; ++l) {
			a.x_live[l] = a.x_max[l] < a.ceiling;
			a.u_live[l] = a.urgent[l];
		}
		for (bool changed = true; changed;) {
			changed = false;
			for (std::size_t l = 0; l < n; ++l) {
				for (const auto &e : a.out[l]) {
					bool x = (e.action == ActionKind::Internal) || (!e.reset && a.x_live[e.to]);
					bool u = !e.reset_urgency && a.u_live[e.to];
					if (x && !a.x_live[l]) {
						a.x_live[l] = true;
						changed = true;
					}
					if (u && !a.u_live[l]) {
						a.u_live[l] = true;
						changed = true;
					}
				}
			}
		}
	}

	Network net_;
	std::vector<CompiledAutomaton> automata_;
	std::vector<std::uint32_t> sender_;
	std::vector<std::uint32_t> receiver_;
};

/// Open-addressing set of fixed-width states, indexed in insertion order.
class StateStore {
public:
	explicit StateStore(std::size_t width) : width_(width), table_(1024, kEmpty) {}

	std::size_t size() const { return count_; }
	std::span<const std::uint16_t> get(std::size_t i) const { return {data_.data() + i * width_, width_}; }

	/// Returns (index, inserted).
	std::pair<std::uint32_t, bool> insert(std::span<const std::uint16_t> key) {
		if ((count_ + 1) * 4 > table_.size() * 3)
			grow();
		std::uint64_t h = hash(key);
		std::size_t mask = table_.size() - 1;
		for (std::size_t p = h & mask;; p = (p + 1) & mask) {
			std::uint32_t slot = table_[p];
			if (slot == kEmpty) {
				auto idx = static_cast<std::uint32_t>(count_++);
				data_.insert(data_.end(), key.begin(), key.end());
				table_[p] = idx;
				return {idx, true};
			}
			if (std::memcmp(data_.data() + slot * width_, key.data(), width_ * sizeof(std::uint16_t)) == 0)
				return {slot, false};
		}
	}

private:
	static constexpr std::uint32_t kEmpty = 0xFFFFFFFF;

	static std::uint64_t hash(std::span<const std::uint16_t> key) {
		std::uint64_t h = 0xcbf29ce484222325ULL;
		for (auto v : key) {
			h ^= v;
			h *= 0x100000001b3ULL;
		}
		h ^= h >> 29;
		h *= 0xbf58476d1ce4e5b9ULL;
		h ^= h >> 32;
		return h;
	}

	void grow() {
		std::vector<std::uint32_t> bigger(table_.size() * 2, kEmpty);
		std::size_t mask = bigger.size() - 1;
		for (std::uint32_t idx = 0; idx < count_; ++idx) {
			std::size_t p = hash(get(idx)) & mask;
			while (bigger[p] != kEmpty)
				p = (p + 1) & mask;
			bigger[p] = idx;
		}
		table_ = std::move(bigger);
	}

	std::size_t width_;
	std::size_t count_ = 0;
	std::vector<std::uint16_t> data_;
	std::vector<std::uint32_t> table_;
};

} // namespace detail

/// Successor relation of a network whose urgency is emulated structurally (escape edges
/// plus u<=0 invariants): delays, internal moves, binary synchronisations and escapes.
class DigitalSemantics {
public:
	explicit DigitalSemantics(const Network &net, bool reduce_dead_clocks = true, Bounds bounds = Bounds::Closed)
	    : compiled_(net, bounds), reduce_(reduce_dead_clocks) {}

	const detail::CompiledNetwork &compiled() const { return compiled_; }

	GlobalState initial() const {
		GlobalState s = compiled_.initial();
		compiled_.normalize(s, reduce_);
		return s;
	}

	bool admissible(const GlobalState &s) const {
		for (std::size_t i = 0; i < compiled_.size(); ++i)
			if (!compiled_.admissible(i, s.locs[i], s.x(i), s.u(i)))
				return false;
		return true;
	}

	template <class Emit>
	void for_each_successor(const GlobalState &s, Emit &&emit) const {
		auto out = [&](GlobalState t) {
			compiled_.normalize(t, reduce_);
			emit(std::move(t));
		};
		compiled_.discrete(s, out);
		for (std::size_t i = 0; i < compiled_.size(); ++i) {
			for (const auto &e : compiled_.automaton(i).out[s.locs[i]]) {
				if (e.action != ActionKind::Escape)
					continue;
				bool open = true;
				for (const auto &group : e.blocked_by)
					for (const auto &[aut, loc] : group)
						open &= s.locs[aut] != loc;
				GlobalState t = s;
				if (open && compiled_.take(t, i, e))
					out(std::move(t));
			}
		}
		if (auto t = compiled_.tick(s))
			out(std::move(*t));
	}

	std::vector<GlobalState> successors(const GlobalState &s) const {
		std::vector<GlobalState> out;
		for_each_successor(s, [&](GlobalState t) {
			if (std::find(out.begin(), out.end(), t) == out.end())
				out.push_back(std::move(t));
		});
		return out;
	}

private:
	detail::CompiledNetwork compiled_;
	bool reduce_;
};

/// Reference semantics on the untransformed network: binary synchronisation is urgent
/// natively, so a delay is forbidden while any synchronisation is enabled.
class UrgentNativeSemantics {
public:
	explicit UrgentNativeSemantics(const Network &net, bool reduce_dead_clocks = true, Bounds bounds = Bounds::Closed)
	    : compiled_(net, bounds), reduce_(reduce_dead_clocks) {
		if (net.urgency_emulated)
			throw Error("the urgent-native semantics expects a network without urgency emulation");
	}

	const detail::CompiledNetwork &compiled() const { return compiled_; }

	GlobalState initial() const {
		GlobalState s = compiled_.initial();
		compiled_.normalize(s, reduce_);
		return s;
	}

	bool admissible(const GlobalState &s) const {
		for (std::size_t i = 0; i < compiled_.size(); ++i)
			if (!compiled_.admissible(i, s.locs[i], s.x(i), s.u(i)))
				return false;
		return true;
	}

	template <class Emit>
	void for_each_successor(const GlobalState &s, Emit &&emit) const {
		auto out = [&](GlobalState t) {
			compiled_.normalize(t, reduce_);
			emit(std::move(t));
		};
		bool synced = compiled_.discrete(s, out);
		if (!synced)
			if (auto t = compiled_.tick(s))
				out(std::move(*t));
	}

	std::vector<GlobalState> successors(const GlobalState &s) const {
		std::vector<GlobalState> out;
		for_each_successor(s, [&](GlobalState t) {
			if (std::find(out.begin(), out.end(), t) == out.end())
				out.push_back(std::move(t));
		});
		return out;
	}

private:
	detail::CompiledNetwork compiled_;
	bool reduce_;
};

/// Successors of `s` under the digital-clocks semantics of an urgency-emulated network.
inline std::vector<GlobalState> successors(const Network &net, const GlobalState &s, Bounds bounds = Bounds::Closed) {
	return DigitalSemantics(net, false, bounds).successors(s);
}

/// Breadth-first closure from the initial state. Terminal states get a self-loop.
template <class Semantics>
TransitionSystem explore(const Semantics &sem, const BuildOptions &opts = {}) {
	const Network &net = sem.compiled().network();
	const std::size_t n = net.automata.size();
	const std::size_t width = 3 * n;

	TransitionSystem ts;
	for (const auto &a : net.automata) {
		ts.components.push_back(a.id);
		std::vector<std::string> names;
		for (const auto &l : a.locations)
			names.push_back(l.name);
		ts.location_names.push_back(std::move(names));
	}

	GlobalState init = sem.initial();
	if (!sem.admissible(init))
		throw Error("initial state violates a location invariant");

	std::vector<std::uint16_t> key(width);
	auto pack = [&](const GlobalState &s) {
		for (std::size_t i = 0; i < n; ++i)
			key[i] = s.locs[i];
		for (std::size_t i = 0; i < 2 * n; ++i)
			key[n + i] = s.clocks[i];
		return std::span<const std::uint16_t>(key);
	};
	auto unpack = [&](std::span<const std::uint16_t> k) {
		GlobalState s;
		s.locs.assign(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(n));
		s.clocks.assign(k.begin() + static_cast<std::ptrdiff_t>(n), k.end());
		return s;
	};

	detail::StateStore store(width);
	store.insert(pack(init));
	std::uint64_t explored = 0;
	std::vector<std::uint32_t> local;
	for (std::size_t cur = 0; cur < store.size(); ++cur) {
		GlobalState s = unpack(store.get(cur));
		local.clear();
		sem.for_each_successor(s, [&](GlobalState t) {
			if (++explored > opts.state_cap)
				throw StateCapExceeded(opts.state_cap, store.size(), store.size() - cur);
			auto [idx, fresh] = store.insert(pack(t));
			(void)fresh;
			if (std::find(local.begin(), local.end(), idx) == local.end())
				local.push_back(idx);
		});
		if (local.empty())
			local.push_back(static_cast<std::uint32_t>(cur));
		ts.targets.insert(ts.targets.end(), local.begin(), local.end());
		ts.offsets.push_back(static_cast<std::uint32_t>(ts.targets.size()));
	}

	ts.locs.resize(store.size() * n);
	ts.clocks.resize(store.size() * 2 * n);
	for (std::size_t s = 0; s < store.size(); ++s) {
		auto k = store.get(s);
		std::copy(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(n), ts.locs.begin() + static_cast<std::ptrdiff_t>(s * n));
		std::copy(k.begin() + static_cast<std::ptrdiff_t>(n), k.end(),
		          ts.clocks.begin() + static_cast<std::ptrdiff_t>(2 * s * n));
	}
	ts.initial = 0;
	return ts;
}

/// Transition system of an urgency-emulated network under digital clocks.
inline TransitionSystem build_ts(const Network &net, const BuildOptions &opts = {}) {
	if (!net.urgency_emulated)
		throw Error("build_ts expects a network with urgency emulated; use build_urgent_native_ts otherwise");
	return explore(DigitalSemantics(net, opts.reduce_dead_clocks, opts.bounds), opts);
}

/// Transition system of an untransformed network under native urgent synchronisation.
inline TransitionSystem build_urgent_native_ts(const Network &net, const BuildOptions &opts = {}) {
	return explore(UrgentNativeSemantics(net, opts.reduce_dead_clocks, opts.bounds), opts);
}

/// Reachable (component, location) pairs; with `merge_primes`, w' is reported as w.
inline std::set<LocRef> reachable_locations(const TransitionSystem &ts, bool merge_primes = false) {
	std::set<LocRef> out;
	std::vector<std::vector<bool>> seen(ts.width());
	for (std::size_t c = 0; c < ts.width(); ++c)
		seen[c].assign(ts.location_names[c].size(), false);
	for (std::size_t s = 0; s < ts.size(); ++s)
		for (std::size_t c = 0; c < ts.width(); ++c)
			seen[c][ts.location(s, c)] = true;
	for (std::size_t c = 0; c < ts.width(); ++c)
		for (std::size_t l = 0; l < seen[c].size(); ++l)
			if (seen[c][l]) {
				std::string name = ts.location_names[c][l];
				if (merge_primes && !name.empty() && name.back() == '\'')
					name.pop_back();
				out.insert({ts.components[c], name});
			}
	return out;
}

/// One line per transition: `src dst`.
inline void export_transitions(const TransitionSystem &ts, std::ostream &os) {
	os << ts.size() << ' ' << ts.transitions() << '\n';
	for (std::size_t s = 0; s < ts.size(); ++s)
		for (auto t : ts.successors(s))
			os << s << ' ' << t << '\n';
}

/// One line per state: `index:(loc,...):(x,u,...)` with location names.
inline void export_states(const TransitionSystem &ts, std::ostream &os) {
	os << "(";
	for (std::size_t c = 0; c < ts.width(); ++c)
		os << (c ? "," : "") << ts.components[c];
	os << ")\n";
	for (std::size_t s = 0; s < ts.size(); ++s) {
		os << s << ":(";
		for (std::size_t c = 0; c < ts.width(); ++c)
			os << (c ? "," : "") << ts.location_names[c][ts.location(s, c)];
		os << "):(";
		for (std::size_t k = 0; k < 2 * ts.width(); ++k)
			os << (k ? "," : "") << ts.clocks[2 * s * ts.width() + k];
		os << ")\n";
	}
}

} // namespace mirela
