#pragma once

#include "semantics.hpp"

#include <cctype>
#include <deque>
#include <memory>
#include <unordered_map>

namespace mirela {

class FormulaError : public Error {
public:
	using Error::Error;
};

enum class CtlOp { True, False, Atom, Not, And, Or, EX, EF, EG, AX, AF, AG, EU, AU };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// CTL syntax tree over `at(component, location)` atoms.
struct Formula {
	CtlOp op = CtlOp::True;
	std::string component;
	std::string location;
	FormulaPtr lhs;
	FormulaPtr rhs;
};

namespace ctl {

inline FormulaPtr make(CtlOp op, FormulaPtr l = nullptr, FormulaPtr r = nullptr) {
	auto f = std::make_shared<Formula>();
	f->op = op;
	f->lhs = std::move(l);
	f->rhs = std::move(r);
	return f;
}

inline FormulaPtr top() { return make(CtlOp::True); }
inline FormulaPtr bottom() { return make(CtlOp::False); }
inline FormulaPtr at(std::string component, std::string location) {
	auto f = std::make_shared<Formula>();
	f->op = CtlOp::Atom;
	f->component = std::move(component);
	f->location = std::move(location);
	return f;
}
inline FormulaPtr neg(FormulaPtr f) { return make(CtlOp::Not, std::move(f)); }
inline FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return make(CtlOp::And, std::move(a), std::move(b)); }
inline FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return make(CtlOp::Or, std::move(a), std::move(b)); }
inline FormulaPtr EX(FormulaPtr f) { return make(CtlOp::EX, std::move(f)); }
inline FormulaPtr EF(FormulaPtr f) { return make(CtlOp::EF, std::move(f)); }
inline FormulaPtr EG(FormulaPtr f) { return make(CtlOp::EG, std::move(f)); }
inline FormulaPtr AX(FormulaPtr f) { return make(CtlOp::AX, std::move(f)); }
inline FormulaPtr AF(FormulaPtr f) { return make(CtlOp::AF, std::move(f)); }
inline FormulaPtr AG(FormulaPtr f) { return make(CtlOp::AG, std::move(f)); }
inline FormulaPtr EU(FormulaPtr a, FormulaPtr b) { return make(CtlOp::EU, std::move(a), std::move(b)); }
inline FormulaPtr AU(FormulaPtr a, FormulaPtr b) { return make(CtlOp::AU, std::move(a), std::move(b)); }

/// phi_w = EF EG w
inline FormulaPtr phi(const std::string &c, const std::string &w) { return EF(EG(at(c, w))); }
/// psi_w = EF AG w
inline FormulaPtr psi(const std::string &c, const std::string &w) { return EF(AG(at(c, w))); }
/// rho_w = EF EG (w & EF !w)
inline FormulaPtr rho(const std::string &c, const std::string &w) {
	return EF(EG(conj(at(c, w), EF(neg(at(c, w))))));
}

} // namespace ctl

/// Canonical, fully parenthesised text; re-parses to the same tree.
inline std::string to_string(const Formula &f) {
	switch (f.op) {
	case CtlOp::True: return "true";
	case CtlOp::False: return "false";
	case CtlOp::Atom: return "at(" + f.component + "," + f.location + ")";
	case CtlOp::Not: return "!" + to_string(*f.lhs);
	case CtlOp::And: return "(" + to_string(*f.lhs) + " & " + to_string(*f.rhs) + ")";
	case CtlOp::Or: return "(" + to_string(*f.lhs) + " | " + to_string(*f.rhs) + ")";
	case CtlOp::EX: return "EX " + to_string(*f.lhs);
	case CtlOp::EF: return "EF " + to_string(*f.lhs);
	case CtlOp::EG: return "EG " + to_string(*f.lhs);
	case CtlOp::AX: return "AX " + to_string(*f.lhs);
	case CtlOp::AF: return "AF " + to_string(*f.lhs);
	case CtlOp::AG: return "AG " + to_string(*f.lhs);
	case CtlOp::EU: return "E[" + to_string(*f.lhs) + " U " + to_string(*f.rhs) + "]";
	case CtlOp::AU: return "A[" + to_string(*f.lhs) + " U " + to_string(*f.rhs) + "]";
	}
	return "?";
}

namespace detail {

/// Recursive-descent parser for the CLI formula syntax.
///
///   or    := and (('|' | '∨' | 'or') and)*
///   and   := unary (('&' | '∧' | 'and') unary)*
///   unary := ('!' | '¬' | 'not') unary | ('EX'|'EF'|'EG'|'AX'|'AF'|'AG') unary
///          | ('E'|'A') '[' or 'U' or ']' | 'true' | 'false'
///          | 'at' '(' ident ',' ident "'"* ')' | '(' or ')'
class FormulaParser {
public:
	explicit FormulaParser(std::string_view text) : text_(text) {}

	FormulaPtr run() {
		FormulaPtr f = disjunction();
		skip();
		if (pos_ != text_.size())
			fail("unexpected trailing input");
		return f;
	}

private:
	[[noreturn]] void fail(const std::string &what) const {
		throw FormulaError("formula column " + std::to_string(pos_ + 1) + ": " + what);
	}

	void skip() {
		while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
			++pos_;
	}

	bool symbol(std::string_view s) {
		skip();
		if (text_.substr(pos_, s.size()) == s) {
			pos_ += s.size();
			return true;
		}
		return false;
	}

	std::string word() {
		skip();
		std::size_t b = pos_;
		while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
			++pos_;
		return std::string(text_.substr(b, pos_ - b));
	}

	bool keyword(std::string_view kw) {
		skip();
		std::size_t save = pos_;
		if (word() == kw)
			return true;
		pos_ = save;
		return false;
	}

	void expect(std::string_view s) {
		if (!symbol(s))
			fail("expected '" + std::string(s) + "'");
	}

	FormulaPtr disjunction() {
		FormulaPtr f = conjunction();
		while (symbol("|") || symbol("\xE2\x88\xA8") || keyword("or"))
			f = ctl::disj(f, conjunction());
		return f;
	}

	FormulaPtr conjunction() {
		FormulaPtr f = unary();
		while (symbol("&") || symbol("\xE2\x88\xA7") || keyword("and"))
			f = ctl::conj(f, unary());
		return f;
	}

	FormulaPtr until(CtlOp op) {
		expect("[");
		FormulaPtr a = disjunction();
		if (!keyword("U"))
			fail("expected 'U'");
		FormulaPtr b = disjunction();
		expect("]");
		return ctl::make(op, a, b);
	}

	FormulaPtr unary() {
		if (symbol("!") || symbol("\xC2\xAC") || keyword("not"))
			return ctl::neg(unary());
		if (symbol("(")) {
			FormulaPtr f = disjunction();
			expect(")");
			return f;
		}
		skip();
		std::size_t save = pos_;
		std::string w = word();
		if (w.empty())
			fail("expected a formula");
		if (w == "true")
			return ctl::top();
		if (w == "false")
			return ctl::bottom();
		if (w == "E" || w == "A")
			return until(w == "E" ? CtlOp::EU : CtlOp::AU);
		static const std::pair<const char *, CtlOp> temporal[] = {{"EX", CtlOp::EX}, {"EF", CtlOp::EF},
		                                                          {"EG", CtlOp::EG}, {"AX", CtlOp::AX},
		                                                          {"AF", CtlOp::AF}, {"AG", CtlOp::AG}};
		for (const auto &[name, op] : temporal)
			if (w == name)
				return ctl::make(op, unary());
		if (w == "at") {
			expect("(");
			std::string c = word();
			if (c.empty())
				fail("expected a component name");
			expect(",");
			std::string l = word();
			if (l.empty())
				fail("expected a location name");
			while (pos_ < text_.size() && text_[pos_] == '\'') {
				l.push_back('\'');
				++pos_;
			}
			expect(")");
			return ctl::at(c, l);
		}
		pos_ = save;
		fail("unknown operator '" + w + "'");
	}

	std::string_view text_;
	std::size_t pos_ = 0;
};

} // namespace detail

inline FormulaPtr parse_formula(std::string_view text) { return detail::FormulaParser(text).run(); }

using StateSet = std::vector<bool>;

/// Fixpoint CTL evaluation over a transition system, memoising satisfaction sets per subformula.
class CtlChecker {
public:
	explicit CtlChecker(const TransitionSystem &ts) : ts_(ts) {
		const std::size_t n = ts.size();
		pred_offsets_.assign(n + 1, 0);
		for (auto t : ts.targets)
			++pred_offsets_[t + 1];
		for (std::size_t s = 0; s < n; ++s)
			pred_offsets_[s + 1] += pred_offsets_[s];
		preds_.resize(ts.targets.size());
		std::vector<std::uint32_t> fill(pred_offsets_.begin(), pred_offsets_.end() - 1);
		for (std::size_t s = 0; s < n; ++s)
			for (auto t : ts.successors(s))
				preds_[fill[t]++] = static_cast<std::uint32_t>(s);
	}

	const TransitionSystem &system() const { return ts_; }

	const StateSet &eval(const Formula &f) {
		std::string key = to_string(f);
		if (auto it = memo_.find(key); it != memo_.end())
			return it->second;
		StateSet result = compute(f);
		return memo_.emplace(std::move(key), std::move(result)).first->second;
	}

	bool holds_initially(const Formula &f) { return eval(f)[ts_.initial]; }

private:
	std::span<const std::uint32_t> predecessors(std::size_t s) const {
		return {preds_.data() + pred_offsets_[s], preds_.data() + pred_offsets_[s + 1]};
	}

	StateSet complement(StateSet s) const {
		s.flip();
		return s;
	}

	StateSet exists_next(const StateSet &f) const {
		StateSet out(ts_.size(), false);
		for (std::size_t s = 0; s < ts_.size(); ++s)
			for (auto t : ts_.successors(s))
				if (f[t]) {
					out[s] = true;
					break;
				}
		return out;
	}

	// Least fixpoint of g | (f & EX Z).
	StateSet exists_until(const StateSet &f, const StateSet &g) const {
		StateSet out = g;
		std::vector<std::uint32_t> work;
		for (std::size_t s = 0; s < ts_.size(); ++s)
			if (g[s])
				work.push_back(static_cast<std::uint32_t>(s));
		while (!work.empty()) {
			auto t = work.back();
			work.pop_back();
			for (auto p : predecessors(t))
				if (!out[p] && f[p]) {
					out[p] = true;
					work.push_back(p);
				}
		}
		return out;
	}

	// Least fixpoint of g | (f & AX Z); successors are duplicate free, so counting works.
	StateSet always_until(const StateSet &f, const StateSet &g) const {
		StateSet out = g;
		std::vector<std::uint32_t> pending(ts_.size());
		std::vector<std::uint32_t> work;
		for (std::size_t s = 0; s < ts_.size(); ++s) {
			pending[s] = static_cast<std::uint32_t>(ts_.successors(s).size());
			if (g[s])
				work.push_back(static_cast<std::uint32_t>(s));
		}
		while (!work.empty()) {
			auto t = work.back();
			work.pop_back();
			for (auto p : predecessors(t)) {
				if (out[p])
					continue;
				if (--pending[p] == 0 && f[p]) {
					out[p] = true;
					work.push_back(p);
				}
			}
		}
		return out;
	}

	// Greatest fixpoint of f & EX Z.
	StateSet exists_globally(const StateSet &f) const {
		StateSet out = f;
		std::vector<std::uint32_t> count(ts_.size(), 0);
		std::vector<std::uint32_t> work;
		for (std::size_t s = 0; s < ts_.size(); ++s) {
			if (!f[s])
				continue;
			for (auto t : ts_.successors(s))
				count[s] += f[t] ? 1 : 0;
			if (count[s] == 0) {
				out[s] = false;
				work.push_back(static_cast<std::uint32_t>(s));
			}
		}
		while (!work.empty()) {
			auto t = work.back();
			work.pop_back();
			for (auto p : predecessors(t)) {
				if (!out[p])
					continue;
				if (--count[p] == 0) {
					out[p] = false;
					work.push_back(p);
				}
			}
		}
		return out;
	}

	StateSet compute(const Formula &f) {
		const std::size_t n = ts_.size();
		switch (f.op) {
		case CtlOp::True: return StateSet(n, true);
		case CtlOp::False: return StateSet(n, false);
		case CtlOp::Atom: {
			auto r = ts_.resolve(f.component, f.location);
			if (!r)
				throw FormulaError("unknown atom at(" + f.component + "," + f.location + ")");
			StateSet out(n, false);
			for (std::size_t s = 0; s < n; ++s)
				out[s] = ts_.location(s, r->first) == r->second;
			return out;
		}
		case CtlOp::Not: return complement(eval(*f.lhs));
		case CtlOp::And: {
			StateSet a = eval(*f.lhs);
			const StateSet &b = eval(*f.rhs);
			for (std::size_t s = 0; s < n; ++s)
				a[s] = a[s] && b[s];
			return a;
		}
		case CtlOp::Or: {
			StateSet a = eval(*f.lhs);
			const StateSet &b = eval(*f.rhs);
			for (std::size_t s = 0; s < n; ++s)
				a[s] = a[s] || b[s];
			return a;
		}
		case CtlOp::EX: return exists_next(eval(*f.lhs));
		case CtlOp::AX: return complement(exists_next(complement(eval(*f.lhs))));
		case CtlOp::EF: return exists_until(StateSet(n, true), eval(*f.lhs));
		case CtlOp::AF: return always_until(StateSet(n, true), eval(*f.lhs));
		case CtlOp::EG: return exists_globally(eval(*f.lhs));
		case CtlOp::AG: return complement(exists_until(StateSet(n, true), complement(eval(*f.lhs))));
		case CtlOp::EU: {
			StateSet a = eval(*f.lhs);
			return exists_until(a, eval(*f.rhs));
		}
		case CtlOp::AU: {
			StateSet a = eval(*f.lhs);
			return always_until(a, eval(*f.rhs));
		}
		}
		throw FormulaError("unsupported operator");
	}

	const TransitionSystem &ts_;
	std::vector<std::uint32_t> pred_offsets_;
	std::vector<std::uint32_t> preds_;
	std::unordered_map<std::string, StateSet> memo_;
};

inline StateSet eval(const TransitionSystem &ts, const Formula &f) { return CtlChecker(ts).eval(f); }

inline bool holds_initially(const TransitionSystem &ts, const Formula &f) {
	return CtlChecker(ts).holds_initially(f);
}

/// Finite stem from the initial state and, for EF EG / EF AG, a cycle staying inside.
struct Witness {
	std::vector<std::uint32_t> stem;
	std::vector<std::uint32_t> cycle;
};

/// Witness for a formula of shape `EF g`; nullopt when it does not hold initially.
inline std::optional<Witness> witness(CtlChecker &checker, const Formula &f) {
	if (f.op != CtlOp::EF)
		throw FormulaError("witnesses are produced for EF formulas only, got " + to_string(f));
	const TransitionSystem &ts = checker.system();
	if (!checker.holds_initially(f))
		return std::nullopt;
	const StateSet goal = checker.eval(*f.lhs);

	std::vector<std::int64_t> parent(ts.size(), -1);
	std::deque<std::uint32_t> queue{ts.initial};
	parent[ts.initial] = ts.initial;
	std::int64_t hit = -1;
	while (!queue.empty()) {
		auto s = queue.front();
		queue.pop_front();
		if (goal[s]) {
			hit = s;
			break;
		}
		for (auto t : ts.successors(s))
			if (parent[t] < 0) {
				parent[t] = s;
				queue.push_back(t);
			}
	}
	Witness w;
	for (auto s = static_cast<std::uint32_t>(hit);; s = static_cast<std::uint32_t>(parent[s])) {
		w.stem.push_back(s);
		if (s == ts.initial)
			break;
	}
	std::reverse(w.stem.begin(), w.stem.end());

	if (f.lhs->op == CtlOp::EG || f.lhs->op == CtlOp::AG) {
		std::vector<std::uint32_t> walk;
		std::unordered_map<std::uint32_t, std::size_t> index;
		std::uint32_t cur = w.stem.back();
		while (!index.count(cur)) {
			index[cur] = walk.size();
			walk.push_back(cur);
			for (auto t : ts.successors(cur))
				if (goal[t]) {
					cur = t;
					break;
				}
		}
		std::size_t loop = index[cur];
		w.stem.insert(w.stem.end(), walk.begin() + 1, walk.begin() + static_cast<std::ptrdiff_t>(loop) + 1);
		w.cycle.assign(walk.begin() + static_cast<std::ptrdiff_t>(loop), walk.end());
	}
	return w;
}

inline std::optional<Witness> witness(const TransitionSystem &ts, const Formula &f) {
	CtlChecker checker(ts);
	return witness(checker, f);
}

} // namespace mirela
