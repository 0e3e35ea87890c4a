#pragma once

#include "spec.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace mirela {

namespace detail {

enum class TokenKind { Ident, Number, LParen, RParen, LBracket, RBracket, Comma, Semicolon, Dot, Colon, Equals, Arrow, End };

struct Token {
	TokenKind kind = TokenKind::End;
	std::string text;
	std::uint64_t value = 0;
	SourcePos pos;
};

inline std::string_view describe(TokenKind k) {
	switch (k) {
	case TokenKind::Ident: return "identifier";
	case TokenKind::Number: return "number";
	case TokenKind::LParen: return "'('";
	case TokenKind::RParen: return "')'";
	case TokenKind::LBracket: return "'['";
	case TokenKind::RBracket: return "']'";
	case TokenKind::Comma: return "','";
	case TokenKind::Semicolon: return "';'";
	case TokenKind::Dot: return "'.'";
	case TokenKind::Colon: return "':'";
	case TokenKind::Equals: return "'='";
	case TokenKind::Arrow: return "'->'";
	case TokenKind::End: return "end of input";
	}
	return "?";
}

class Lexer {
public:
	explicit Lexer(std::string_view text) : text_(text) {}

	std::vector<Token> run() {
		std::vector<Token> out;
		for (;;) {
			skip_blanks();
			Token t;
			t.pos = {line_, column_};
			if (at_end()) {
				out.push_back(t);
				return out;
			}
			char c = peek();
			if (std::isalpha(static_cast<unsigned char>(c))) {
				while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
					t.text.push_back(advance());
				t.kind = TokenKind::Ident;
			} else if (std::isdigit(static_cast<unsigned char>(c))) {
				while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
					t.text.push_back(advance());
					if (t.text.size() > 9)
						throw ParseError(t.pos, "number too large");
				}
				t.kind = TokenKind::Number;
				t.value = std::stoull(t.text);
			} else if (c == '-' && peek(1) == '>') {
				advance();
				advance();
				t.kind = TokenKind::Arrow;
			} else if (text_.substr(offset_, 3) == "\xE2\x86\x92") { // U+2192
				offset_ += 3;
				++column_;
				t.kind = TokenKind::Arrow;
			} else {
				switch (c) {
				case '(': t.kind = TokenKind::LParen; break;
				case ')': t.kind = TokenKind::RParen; break;
				case '[': t.kind = TokenKind::LBracket; break;
				case ']': t.kind = TokenKind::RBracket; break;
				case ',': t.kind = TokenKind::Comma; break;
				case ';': t.kind = TokenKind::Semicolon; break;
				case '.': t.kind = TokenKind::Dot; break;
				case ':': t.kind = TokenKind::Colon; break;
				case '=': t.kind = TokenKind::Equals; break;
				default: {
					std::string shown = std::isprint(static_cast<unsigned char>(c))
					                        ? std::string(1, c)
					                        : "\\x" + std::to_string(static_cast<unsigned char>(c));
					throw ParseError(t.pos, "unexpected character '" + shown + "'");
				}
				}
				advance();
			}
			out.push_back(std::move(t));
		}
	}

private:
	bool at_end() const { return offset_ >= text_.size(); }
	char peek(std::size_t ahead = 0) const {
		return offset_ + ahead < text_.size() ? text_[offset_ + ahead] : '\0';
	}
	char advance() {
		char c = text_[offset_++];
		if (c == '\n') {
			++line_;
			column_ = 1;
		} else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
			++column_;
		}
		return c;
	}
	void skip_blanks() {
		while (!at_end()) {
			if (std::isspace(static_cast<unsigned char>(peek()))) {
				advance();
			} else if (peek() == '/' && peek(1) == '/') {
				while (!at_end() && peek() != '\n')
					advance();
			} else {
				return;
			}
		}
	}

	std::string_view text_;
	std::size_t offset_ = 0;
	int line_ = 1;
	int column_ = 1;
};

class Parser {
public:
	explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

	SpecAst run() {
		SpecAst ast;
		ast.name = "spec";
		if (peek().kind == TokenKind::Ident && peek(1).kind == TokenKind::Colon) {
			ast.name = advance().text;
			advance();
		}
		std::set<std::string> seen;
		for (;;) {
			ComponentDecl decl = declaration();
			if (!seen.insert(decl.id).second)
				throw ParseError(decl.pos, "duplicate component '" + decl.id + "'");
			ast.components.push_back(std::move(decl));
			if (peek().kind == TokenKind::Dot) {
				advance();
				break;
			}
			expect(TokenKind::Semicolon);
			if (peek().kind == TokenKind::Dot) {
				advance();
				break;
			}
		}
		if (peek().kind != TokenKind::End)
			throw ParseError(peek().pos, "unexpected " + std::string(describe(peek().kind)) + " after '.'");
		return ast;
	}

private:
	const Token &peek(std::size_t ahead = 0) const {
		return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
	}
	const Token &advance() {
		const Token &t = tokens_[pos_];
		if (pos_ + 1 < tokens_.size())
			++pos_;
		return t;
	}
	const Token &expect(TokenKind k) {
		if (peek().kind != k)
			throw ParseError(peek().pos, "expected " + std::string(describe(k)) + ", found " +
			                                 std::string(describe(peek().kind)));
		return advance();
	}
	Time number() { return static_cast<Time>(expect(TokenKind::Number).value); }

	Interval interval() {
		SourcePos at = expect(TokenKind::LBracket).pos;
		Interval iv;
		iv.min = number();
		expect(TokenKind::Comma);
		iv.max = number();
		expect(TokenKind::RBracket);
		if (iv.min > iv.max)
			throw ParseError(at, "interval [" + std::to_string(iv.min) + "," + std::to_string(iv.max) +
			                         "] has min > max");
		return iv;
	}

	Interval pair() {
		SourcePos at = expect(TokenKind::LParen).pos;
		Interval iv;
		iv.min = number();
		expect(TokenKind::Comma);
		iv.max = number();
		expect(TokenKind::RParen);
		if (iv.min > iv.max)
			throw ParseError(at, "interval (" + std::to_string(iv.min) + "," + std::to_string(iv.max) +
			                         ") has min > max");
		return iv;
	}

	std::vector<Source> source_list() {
		expect(TokenKind::LParen);
		std::vector<Source> out;
		for (;;) {
			Source s;
			s.id = expect(TokenKind::Ident).text;
			if (peek().kind == TokenKind::LBracket)
				s.interval = interval();
			out.push_back(std::move(s));
			if (peek().kind != TokenKind::Comma)
				break;
			advance();
		}
		expect(TokenKind::RParen);
		return out;
	}

	ComponentDecl declaration() {
		ComponentDecl d;
		const Token &id = expect(TokenKind::Ident);
		d.id = id.text;
		d.pos = id.pos;
		expect(TokenKind::Equals);
		const Token &kw = expect(TokenKind::Ident);
		const std::string &k = kw.text;
		if (k == "Periodic") {
			d.kind = ComponentKind::Periodic;
			d.start = pair();
			d.work = interval();
		} else if (k == "Aperiodic") {
			d.kind = ComponentKind::Aperiodic;
			expect(TokenKind::LParen);
			d.work = Interval{number(), kUnbounded};
			expect(TokenKind::RParen);
		} else if (k == "First" || k == "Memory") {
			d.kind = k == "First" ? ComponentKind::First : ComponentKind::Memory;
			d.sources = source_list();
			// earlier sources inherit the next interval, so the last one must carry it
			if (!d.sources.back().interval)
				throw ParseError(kw.pos, k + " source '" + d.sources.back().id + "' needs an interval");
		} else if (k == "Both") {
			d.kind = ComponentKind::Both;
			d.sources = source_list();
			if (d.sources.size() != 2)
				throw ParseError(kw.pos, "Both expects exactly 2 sources, got " + std::to_string(d.sources.size()));
			for (const auto &s : d.sources)
				if (s.interval)
					throw ParseError(kw.pos, "Both sources take no interval; use Both(a,b)[min,max]");
			d.work = interval();
		} else if (k == "Priority") {
			d.kind = ComponentKind::Priority;
			d.sources = source_list();
			if (d.sources.size() != 2)
				throw ParseError(kw.pos,
				                 "Priority expects exactly 2 sources (master, slave), got " + std::to_string(d.sources.size()));
			for (const auto &s : d.sources)
				if (!s.interval)
					throw ParseError(kw.pos, "Priority source '" + s.id + "' needs an interval");
		} else if (k == "Rendering") {
			d.kind = ComponentKind::Rendering;
			d.start = pair();
			d.sources = source_list();
			if (d.sources.size() != 1)
				throw ParseError(kw.pos, "Rendering expects exactly 1 source, got " + std::to_string(d.sources.size()));
			if (!d.sources[0].interval)
				throw ParseError(kw.pos, "Rendering source '" + d.sources[0].id + "' needs an interval");
		} else {
			throw ParseError(kw.pos, "unknown component kind '" + k + "'");
		}

		std::set<std::string> distinct;
		for (const auto &s : d.sources)
			if (!distinct.insert(s.id).second)
				throw ParseError(d.pos, "component '" + d.id + "' lists source '" + s.id + "' twice");

		if (peek().kind == TokenKind::Arrow) {
			advance();
			if (peek().kind == TokenKind::Ident) {
				d.targets.push_back(advance().text);
			} else {
				expect(TokenKind::LParen);
				if (peek().kind != TokenKind::RParen) {
					for (;;) {
						d.targets.push_back(expect(TokenKind::Ident).text);
						if (peek().kind != TokenKind::Comma)
							break;
						advance();
					}
				}
				expect(TokenKind::RParen);
			}
			std::set<std::string> t;
			for (const auto &name : d.targets)
				if (!t.insert(name).second)
					throw ParseError(d.pos, "component '" + d.id + "' lists target '" + name + "' twice");
		}
		return d;
	}

	std::vector<Token> tokens_;
	std::size_t pos_ = 0;
};

inline void print_interval(std::ostream &os, const Interval &iv, char open, char close) {
	os << open << iv.min << ',' << iv.max << close;
}

inline void print_sources(std::ostream &os, const std::vector<Source> &sources) {
	os << '(';
	for (std::size_t i = 0; i < sources.size(); ++i) {
		if (i)
			os << ',';
		os << sources[i].id;
		if (sources[i].interval)
			print_interval(os, *sources[i].interval, '[', ']');
	}
	os << ')';
}

inline std::string print_components(const std::string &name, const std::vector<ComponentDecl> &components) {
	std::ostringstream os;
	os << name << ":\n";
	for (std::size_t i = 0; i < components.size(); ++i) {
		const auto &c = components[i];
		os << "  " << c.id << " = " << to_string(c.kind);
		switch (c.kind) {
		case ComponentKind::Periodic:
			print_interval(os, *c.start, '(', ')');
			print_interval(os, *c.work, '[', ']');
			break;
		case ComponentKind::Aperiodic: os << '(' << c.work->min << ')'; break;
		case ComponentKind::First:
		case ComponentKind::Memory:
		case ComponentKind::Priority: print_sources(os, c.sources); break;
		case ComponentKind::Both:
			print_sources(os, c.sources);
			print_interval(os, *c.work, '[', ']');
			break;
		case ComponentKind::Rendering:
			print_interval(os, *c.start, '(', ')');
			print_sources(os, c.sources);
			break;
		}
		if (!c.targets.empty()) {
			os << " -> (";
			for (std::size_t t = 0; t < c.targets.size(); ++t)
				os << (t ? "," : "") << c.targets[t];
			os << ')';
		}
		os << (i + 1 == components.size() ? ".\n" : ";\n");
	}
	return os.str();
}

} // namespace detail

/// Parses MIRELA text. Implicit targets are left implicit; see resolve_targets().
inline SpecAst parse(std::string_view text) {
	detail::Lexer lexer(text);
	detail::Parser parser(lexer.run());
	return parser.run();
}

/// Completes target lists and validates the cross-component rules.
inline ResolvedSpec resolve_targets(const SpecAst &ast) {
	ResolvedSpec out;
	out.name = ast.name;
	out.components = ast.components;

	std::map<std::string, const ComponentDecl *, std::less<>> by_id;
	for (const auto &c : ast.components)
		by_id[c.id] = &c;

	auto kind_of = [&](const std::string &id) { return by_id.at(id)->kind; };

	for (const auto &c : ast.components) {
		for (const auto &s : c.sources) {
			if (!by_id.count(s.id))
				throw SpecError(c.pos, "component '" + c.id + "' has unknown source '" + s.id + "'");
			if (s.id == c.id)
				throw SpecError(c.pos, "component '" + c.id + "' lists itself as a source");
			ComponentKind sk = kind_of(s.id);
			switch (c.kind) {
			case ComponentKind::First:
			case ComponentKind::Both:
			case ComponentKind::Priority:
			case ComponentKind::Memory:
				if (!is_sensor(sk) && !is_processing_unit(sk))
					throw SpecError(c.pos, std::string(to_string(c.kind)) + " '" + c.id + "' cannot take " +
					                           std::string(to_string(sk)) + " '" + s.id +
					                           "' as a source (sensors or processing units only)");
				break;
			case ComponentKind::Rendering:
				if (sk != ComponentKind::Memory)
					throw SpecError(c.pos, "Rendering '" + c.id + "' must read a Memory, not " +
					                           std::string(to_string(sk)) + " '" + s.id + "'");
				break;
			default: break;
			}
		}
		for (const auto &t : c.targets) {
			auto it = by_id.find(t);
			if (it == by_id.end())
				throw SpecError(c.pos, "component '" + c.id + "' has unknown target '" + t + "'");
			if (!it->second->lists_source(c.id))
				throw SpecError(c.pos, "target '" + t + "' of '" + c.id + "' does not list '" + c.id + "' as a source");
			if (it->second->kind == ComponentKind::Memory && c.kind != ComponentKind::Memory)
				out.warnings.push_back({c.pos, "memory '" + t + "' listed explicitly as a target of '" + c.id + "'"});
		}
	}

	for (auto &c : out.components) {
		for (const auto &d : ast.components) {
			if (d.lists_source(c.id) && std::find(c.targets.begin(), c.targets.end(), d.id) == c.targets.end())
				c.targets.push_back(d.id);
		}
	}

	for (const auto &c : out.components) {
		for (const auto &t : c.targets) {
			ComponentKind tk = kind_of(t);
			if (is_processing_unit(tk)) {
				out.channels.push_back({ChannelKind::Data, c.id, t});
			} else if (tk == ComponentKind::Memory) {
				out.channels.push_back({ChannelKind::Lock, c.id, t});
				out.channels.push_back({ChannelKind::Unlock, c.id, t});
			}
		}
		if (c.kind == ComponentKind::Rendering) {
			out.channels.push_back({ChannelKind::Lock, c.id, c.sources[0].id});
			out.channels.push_back({ChannelKind::Unlock, c.id, c.sources[0].id});
		}
	}
	return out;
}

inline ResolvedSpec parse_and_resolve(std::string_view text) { return resolve_targets(parse(text)); }

/// Canonical text form; re-parses to an equal AST.
inline std::string pretty_print(const SpecAst &ast) { return detail::print_components(ast.name, ast.components); }

/// Canonical text form with every implicit target written out.
inline std::string pretty_print(const ResolvedSpec &spec) {
	return detail::print_components(spec.name, spec.components);
}

} // namespace mirela
