#pragma once

#include "ctl.hpp"
#include "elaborator.hpp"
#include "parser.hpp"
#include "transform.hpp"

namespace mirela {

enum class Status {
	Safe,
	Starvation,
	StarvationOrUnbounded,
	Deadlock,
	DeadlockAndStarvation,
	DeadlockAndStarvationOrUnbounded,
	IntrinsicUnbounded,
};

/// Compact machine-readable code.
inline std::string_view code(Status s) {
	switch (s) {
	case Status::Safe: return "safe";
	case Status::Starvation: return "S";
	case Status::StarvationOrUnbounded: return "S/U";
	case Status::Deadlock: return "D";
	case Status::DeadlockAndStarvation: return "D+S";
	case Status::DeadlockAndStarvationOrUnbounded: return "D+S/U";
	case Status::IntrinsicUnbounded: return "U";
	}
	return "?";
}

/// Table-style label (empty for safe locations).
inline std::string_view label(Status s) {
	switch (s) {
	case Status::Safe: return "";
	case Status::Starvation: return "S";
	case Status::StarvationOrUnbounded: return "S and/or U";
	case Status::Deadlock: return "D";
	case Status::DeadlockAndStarvation: return "D and S";
	case Status::DeadlockAndStarvationOrUnbounded: return "D and S and/or U";
	case Status::IntrinsicUnbounded: return "U";
	}
	return "?";
}

inline std::string_view describe(Status s) {
	switch (s) {
	case Status::Safe: return "no indefinite waiting";
	case Status::Starvation: return "starvation";
	case Status::StarvationOrUnbounded: return "starvation or unbounded waiting";
	case Status::Deadlock: return "local deadlock";
	case Status::DeadlockAndStarvation: return "local deadlock in some environments, starvation in others";
	case Status::DeadlockAndStarvationOrUnbounded:
		return "local deadlock in some environments, starvation or unbounded waiting in others";
	case Status::IntrinsicUnbounded: return "unbounded waiting (aperiodic event)";
	}
	return "?";
}

struct LocationVerdict {
	std::string component;
	std::string location;
	std::string primed;
	StaticSet set = StaticSet::W;
	std::optional<bool> phi;
	std::optional<bool> psi;
	std::optional<bool> rho;
	Status status = Status::Safe;
};

struct SkippedLocation {
	std::string component;
	std::string location;
	std::string reason;
};

struct ClassificationReport {
	std::string spec;
	Time scale = 1;
	std::size_t states = 0;
	std::size_t transitions = 0;
	std::vector<LocationVerdict> verdicts;
	std::vector<LocRef> aperiodic;
	std::vector<SkippedLocation> skipped;

	const LocationVerdict *find(std::string_view component, std::string_view location) const {
		for (const auto &v : verdicts)
			if (v.component == component && (v.location == location || v.primed == location))
				return &v;
		return nullptr;
	}
};

/// Status as a function of the static set and the formula results.
inline Status decide(StaticSet set, std::optional<bool> phi, std::optional<bool> psi, std::optional<bool> rho,
                     bool has_aperiodic) {
	if (set == StaticSet::N || !phi.value_or(false))
		return Status::Safe;
	if (set == StaticSet::OnlyS)
		return Status::Starvation;
	if (!psi.value())
		return has_aperiodic ? Status::StarvationOrUnbounded : Status::Starvation;
	if (!rho.value())
		return Status::Deadlock;
	return has_aperiodic ? Status::DeadlockAndStarvationOrUnbounded : Status::DeadlockAndStarvation;
}

/// Runs the phi / psi / rho cascade for one wait location of the transformed system.
/// With `full`, psi and rho are evaluated even when the cascade would stop earlier.
inline LocationVerdict classify_location(CtlChecker &checker, const std::string &component,
                                         const std::string &primed, StaticSet set, bool has_aperiodic,
                                         bool full = false) {
	if (!checker.system().resolve(component, primed))
		throw FormulaError("location " + component + "." + primed + " is not part of the transition system");
	LocationVerdict v;
	v.component = component;
	v.primed = primed;
	v.location = primed.ends_with('\'') ? primed.substr(0, primed.size() - 1) : primed;
	v.set = set;
	if (set == StaticSet::N && !full)
		return v;

	v.phi = checker.holds_initially(*ctl::phi(component, primed));
	bool need_psi = full || (*v.phi && set == StaticSet::W);
	if (need_psi)
		v.psi = checker.holds_initially(*ctl::psi(component, primed));
	bool need_rho = full || (need_psi && *v.psi);
	if (need_rho)
		v.rho = checker.holds_initially(*ctl::rho(component, primed));
	v.status = decide(set, v.phi, v.psi, v.rho, has_aperiodic);
	return v;
}

struct ClassifyOptions {
	enum class Scale { Auto, Explicit, None };
	Scale scale = Scale::Auto;
	Time divisor = 1;
	bool include_memories = false;
	bool full_formulas = false;
	BuildOptions build;
};

/// Network fed to the state-space builder: demultiplexed, urgency emulated, scaled.
inline Network analysis_network(const ResolvedSpec &spec, const ClassifyOptions &opts, Time *used_scale = nullptr) {
	Network net = emulate_urgency(demux_channels(elaborate(spec)));
	Time divisor = 1;
	switch (opts.scale) {
	case ClassifyOptions::Scale::Auto: divisor = timing_gcd(net); break;
	case ClassifyOptions::Scale::Explicit: divisor = opts.divisor; break;
	case ClassifyOptions::Scale::None: divisor = 1; break;
	}
	if (used_scale)
		*used_scale = divisor;
	return divisor == 1 ? net : scale_constants(net, divisor);
}

/// True for a memory that some rendering loop reads; such memories are not analysed by default.
inline bool read_by_rendering(const ResolvedSpec &spec, std::string_view memory) {
	for (const auto &c : spec.components)
		if (c.kind == ComponentKind::Rendering && c.sources[0].id == memory)
			return true;
	return false;
}

/// Static partition restricted to the locations the classifier checks.
inline StaticPartition checked_partition(const ResolvedSpec &spec, const Network &net, bool include_memories) {
	StaticPartition p = static_partition(net);
	if (include_memories)
		return p;
	auto drop = [&](std::vector<LocRef> &v) {
		std::erase_if(v, [&](const LocRef &r) { return read_by_rendering(spec, r.automaton); });
	};
	drop(p.n);
	drop(p.only_s);
	drop(p.w);
	return p;
}

/// Classifies every wait location of the specification.
inline ClassificationReport classify_spec(const ResolvedSpec &spec, const ClassifyOptions &opts = {}) {
	ClassificationReport report;
	report.spec = spec.name;
	Network net = analysis_network(spec, opts, &report.scale);
	TransitionSystem ts = build_ts(net, opts.build);
	report.states = ts.size();
	report.transitions = ts.transitions();
	CtlChecker checker(ts);
	const bool aperiodic = spec.has_aperiodic();
	report.aperiodic = net.aperiodic_sites;

	for (const auto &a : net.automata) {
		bool skip = !opts.include_memories && read_by_rendering(spec, a.id);
		for (std::size_t li = 0; li < a.locations.size(); ++li) {
			const Location &loc = a.locations[li];
			if (loc.kind != LocationKind::Wait || loc.primed_of)
				continue;
			if (skip) {
				report.skipped.push_back({a.id, loc.name, "memory read by a rendering loop"});
				continue;
			}
			StaticSet set = classify_wait(a, static_cast<LocId>(li));
			std::string primed = loc.name;
			for (std::size_t p = 0; p < a.locations.size(); ++p)
				if (a.locations[p].primed_of == li)
					primed = a.locations[p].name;
			report.verdicts.push_back(classify_location(checker, a.id, primed, set, aperiodic, opts.full_formulas));
		}
	}
	return report;
}

} // namespace mirela
