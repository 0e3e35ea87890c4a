#pragma once

#include "classifier.hpp"

#include <json.hpp>

#include <iomanip>
#include <sstream>

namespace mirela {

using Json = nlohmann::ordered_json;

namespace detail {
inline Json tri(const std::optional<bool> &b) { return b ? Json(*b) : Json(nullptr); }
inline std::string cell(const std::optional<bool> &b) { return b ? (*b ? "true" : "false") : "-"; }
} // namespace detail

/// Stable-ordered JSON document; schema in README.md.
inline Json to_json(const ClassificationReport &r, bool has_aperiodic) {
	Json j;
	j["spec"] = r.spec;
	j["scale"] = r.scale;
	j["states"] = r.states;
	j["transitions"] = r.transitions;
	j["has_aperiodic"] = has_aperiodic;
	j["verdicts"] = Json::array();
	for (const auto &v : r.verdicts) {
		Json e;
		e["component"] = v.component;
		e["location"] = v.location;
		e["primed"] = v.primed;
		e["set"] = to_string(v.set);
		e["phi"] = detail::tri(v.phi);
		e["psi"] = detail::tri(v.psi);
		e["rho"] = detail::tri(v.rho);
		e["status"] = code(v.status);
		e["status_text"] = describe(v.status);
		j["verdicts"].push_back(std::move(e));
	}
	j["skipped"] = Json::array();
	for (const auto &s : r.skipped)
		j["skipped"].push_back({{"component", s.component}, {"location", s.location}, {"reason", s.reason}});
	j["aperiodic"] = Json::array();
	for (const auto &a : r.aperiodic)
		j["aperiodic"].push_back({{"component", a.automaton}, {"location", a.location}, {"status", code(Status::IntrinsicUnbounded)}});
	return j;
}

/// Plain table: component, location, static set, phi, psi, rho, status.
inline std::string to_table(const ClassificationReport &r) {
	std::ostringstream os;
	os << "spec " << r.spec << ", scale " << r.scale << ", " << r.states << " states, " << r.transitions
	   << " transitions\n\n";
	os << std::left << std::setw(8) << "comp" << std::setw(10) << "location" << std::setw(7) << "set" << std::setw(7)
	   << "phi" << std::setw(7) << "psi" << std::setw(7) << "rho" << "status\n";
	for (const auto &v : r.verdicts) {
		std::string status{label(v.status)};
		os << std::setw(8) << v.component << std::setw(10) << v.primed << std::setw(7) << to_string(v.set) << std::setw(7)
		   << detail::cell(v.phi) << std::setw(7) << detail::cell(v.psi) << std::setw(7) << detail::cell(v.rho)
		   << (status.empty() ? "-" : status) << "\n";
	}
	for (const auto &a : r.aperiodic)
		os << std::setw(8) << a.automaton << std::setw(10) << a.location << std::setw(7) << "act" << std::setw(21) << ""
		   << label(Status::IntrinsicUnbounded) << "\n";
	for (const auto &s : r.skipped)
		os << std::setw(8) << s.component << std::setw(10) << s.location << "skipped (" << s.reason << ")\n";
	return os.str();
}

} // namespace mirela
