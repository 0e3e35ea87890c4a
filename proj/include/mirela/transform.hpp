#pragma once

#include "tast.hpp"

#include <map>
#include <set>

namespace mirela {

/// Gives every (client, memory) pair its own lock/unlock channels. A memory with several
/// clients gets one held location per client so each unlock pairs with the matching lock.
inline Network demux_channels(const Network &in) {
	Network net = in;
	for (auto &mem : net.automata) {
		if (mem.kind != ComponentKind::Memory)
			continue;
		std::vector<std::string> clients;
		for (auto &a : net.automata) {
			for (auto &e : a.edges) {
				if (e.action != ActionKind::Send || e.channel.kind == ChannelKind::Data || e.channel.receiver != mem.id ||
				    !e.channel.sender.empty())
					continue;
				e.channel.sender = a.id;
				if (std::find(clients.begin(), clients.end(), a.id) == clients.end())
					clients.push_back(a.id);
			}
		}
		if (clients.empty())
			continue;

		Automaton m;
		m.id = mem.id;
		m.kind = mem.kind;
		m.initial = 0;
		Location idle = mem.locations[mem.initial];
		idle.name = "s0";
		m.locations.push_back(idle);
		for (const auto &c : clients) {
			Location held;
			held.name = clients.size() == 1 ? "s1" : "s1_" + c;
			held.kind = LocationKind::Wait;
			m.locations.push_back(held);
			auto h = static_cast<LocId>(m.locations.size() - 1);
			Edge lock;
			lock.from = 0;
			lock.to = h;
			lock.action = ActionKind::Receive;
			lock.channel = {ChannelKind::Lock, c, mem.id};
			Edge unlock;
			unlock.from = h;
			unlock.to = 0;
			unlock.action = ActionKind::Receive;
			unlock.channel = {ChannelKind::Unlock, c, mem.id};
			m.edges.push_back(lock);
			m.edges.push_back(unlock);
		}
		mem = std::move(m);
	}
	net.demultiplexed = true;
	return net;
}

/// Emulates urgent binary synchronisation with ordinary transitions: each communicating
/// location w gets invariant u<=0, a primed copy w' reached when no peer can answer yet,
/// and w' offers the same communications as w.
inline Network emulate_urgency(const Network &in) {
	if (!in.demultiplexed)
		throw Error("emulate_urgency expects a demultiplexed network");
	if (in.urgency_emulated)
		throw Error("urgency is already emulated in this network");

	// (channel, action) -> locations offering it.
	std::map<std::pair<std::string, ActionKind>, std::vector<LocRef>> offers;
	std::map<std::string, std::string> sender_of, receiver_of;
	for (const auto &a : in.automata) {
		for (const auto &e : a.edges) {
			if (e.action != ActionKind::Send && e.action != ActionKind::Receive)
				continue;
			std::string ch = e.channel.name();
			auto &v = offers[{ch, e.action}];
			LocRef r{a.id, a.locations[e.from].name};
			if (std::find(v.begin(), v.end(), r) == v.end())
				v.push_back(r);
			auto &owner = e.action == ActionKind::Send ? sender_of : receiver_of;
			auto [it, fresh] = owner.emplace(ch, a.id);
			if (!fresh && it->second != a.id)
				throw Error("channel " + ch + " is not binary: used by " + it->second + " and " + a.id);
		}
	}

	Network net = in;
	for (auto &a : net.automata) {
		a.has_urgency_clock = true;
		const std::size_t original = a.locations.size();
		const std::vector<Edge> edges = a.edges;
		for (std::size_t li = 0; li < original; ++li) {
			auto l = static_cast<LocId>(li);
			std::vector<const Edge *> comms;
			for (const auto &e : edges)
				if (e.from == l && (e.action == ActionKind::Send || e.action == ActionKind::Receive))
					comms.push_back(&e);
			if (comms.empty())
				continue;

			a.locations[l].urgent = true;
			Location primed;
			primed.name = a.locations[l].name + "'";
			primed.kind = LocationKind::Wait;
			primed.primed_of = l;
			a.locations.push_back(primed);
			auto p = static_cast<LocId>(a.locations.size() - 1);

			Edge escape;
			escape.from = l;
			escape.to = p;
			escape.action = ActionKind::Escape;
			std::set<std::string> seen;
			for (const Edge *e : comms) {
				std::string ch = e->channel.name();
				if (!seen.insert(ch).second)
					continue;
				ActionKind peer = e->action == ActionKind::Send ? ActionKind::Receive : ActionKind::Send;
				std::vector<LocRef> group;
				auto it = offers.find({ch, peer});
				if (it != offers.end()) {
					for (const auto &r : it->second) {
						group.push_back(r);
						group.push_back({r.automaton, r.location + "'"});
					}
				}
				escape.blocked_by.push_back(std::move(group));
			}
			a.edges.push_back(std::move(escape));
			for (const Edge *e : comms) {
				Edge copy = *e;
				copy.from = p;
				a.edges.push_back(copy);
			}
		}
		for (auto &e : a.edges)
			if (a.locations[e.to].urgent)
				e.reset_urgency = true;
	}
	net.urgency_emulated = true;
	return net;
}

} // namespace mirela
