#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mirela {

using Time = std::uint32_t;

inline constexpr Time kUnbounded = std::numeric_limits<Time>::max();

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

struct SourcePos {
	int line = 0;
	int column = 0;

	friend bool operator==(const SourcePos &, const SourcePos &) = default;
};

/// Error carrying a position in the specification text.
class SpecError : public Error {
public:
	SpecError(SourcePos pos, const std::string &message)
	    : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
	      pos_(pos), message_(message) {}

	SourcePos pos() const { return pos_; }
	const std::string &message() const { return message_; }

private:
	SourcePos pos_;
	std::string message_;
};

/// Lexical and syntactic errors.
class ParseError : public SpecError {
public:
	using SpecError::SpecError;
};

/// Closed-open time interval [min, max) as written `[min,max]` in specifications.
struct Interval {
	Time min = 0;
	Time max = 0;

	bool bounded() const { return max != kUnbounded; }
	friend bool operator==(const Interval &, const Interval &) = default;
};

enum class ComponentKind { Periodic, Aperiodic, First, Both, Priority, Memory, Rendering };

inline std::string_view to_string(ComponentKind kind) {
	switch (kind) {
	case ComponentKind::Periodic: return "Periodic";
	case ComponentKind::Aperiodic: return "Aperiodic";
	case ComponentKind::First: return "First";
	case ComponentKind::Both: return "Both";
	case ComponentKind::Priority: return "Priority";
	case ComponentKind::Memory: return "Memory";
	case ComponentKind::Rendering: return "Rendering";
	}
	return "?";
}

inline bool is_sensor(ComponentKind k) {
	return k == ComponentKind::Periodic || k == ComponentKind::Aperiodic;
}

inline bool is_processing_unit(ComponentKind k) {
	return k == ComponentKind::First || k == ComponentKind::Both || k == ComponentKind::Priority;
}

struct Source {
	std::string id;
	std::optional<Interval> interval;

	friend bool operator==(const Source &, const Source &) = default;
};

/// One `id = Comp -> TList` declaration.
///
/// Parameter placement per kind:
///  - Periodic(a,b)[m,M]: start = [a,b], work = [m,M]
///  - Aperiodic(e): work = [e, unbounded)
///  - Both(i1,i2)[m,M]: work = [m,M]
///  - Priority(m[..],s[..]): sources[0] is the master, sources[1] the slave
///  - Rendering(r,R)(M[m,Mx]): start = [r,R], sources = {M[m,Mx]}
struct ComponentDecl {
	std::string id;
	ComponentKind kind = ComponentKind::First;
	std::optional<Interval> start;
	std::optional<Interval> work;
	std::vector<Source> sources;
	std::vector<std::string> targets;
	SourcePos pos;

	bool lists_source(std::string_view name) const {
		for (const auto &s : sources)
			if (s.id == name)
				return true;
		return false;
	}

	// Positions are deliberately not part of equality.
	friend bool operator==(const ComponentDecl &a, const ComponentDecl &b) {
		return a.id == b.id && a.kind == b.kind && a.start == b.start && a.work == b.work &&
		       a.sources == b.sources && a.targets == b.targets;
	}
};

struct SpecAst {
	std::string name;
	std::vector<ComponentDecl> components;

	friend bool operator==(const SpecAst &, const SpecAst &) = default;
};

enum class ChannelKind { Data, Lock, Unlock };

/// Synchronisation channel. Data channels are `k_{sender-receiver}`; memory channels are
/// `lock_{client-memory}` / `unlock_{client-memory}`, or `lock_{memory}` while still shared
/// by all clients (sender empty).
struct Channel {
	ChannelKind kind = ChannelKind::Data;
	std::string sender;
	std::string receiver;

	std::string name() const {
		std::string prefix = kind == ChannelKind::Data   ? "k"
		                     : kind == ChannelKind::Lock ? "lock"
		                                                 : "unlock";
		if (sender.empty())
			return prefix + "_{" + receiver + "}";
		return prefix + "_{" + sender + "-" + receiver + "}";
	}

	friend bool operator==(const Channel &, const Channel &) = default;
	friend auto operator<=>(const Channel &, const Channel &) = default;
};

struct Diagnostic {
	SourcePos pos;
	std::string message;
};

struct ResolvedSpec {
	std::string name;
	std::vector<ComponentDecl> components;
	std::vector<Channel> channels;
	std::vector<Diagnostic> warnings;

	const ComponentDecl *find(std::string_view id) const {
		for (const auto &c : components)
			if (c.id == id)
				return &c;
		return nullptr;
	}

	bool has_aperiodic() const {
		for (const auto &c : components)
			if (c.kind == ComponentKind::Aperiodic)
				return true;
		return false;
	}
};

} // namespace mirela
