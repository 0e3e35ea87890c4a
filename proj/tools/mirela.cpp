// mirela: command-line driver for parsing, elaborating and checking MIRELA specifications.
#include <mirela/mirela.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace mirela;

namespace {

struct RunOptions {
	std::string input;
	std::string scale = "auto";
	bool include_memories = false;
	bool full_formulas = false;
	bool strict_bounds = false;
	bool dot = false;
	std::string format = "human";
	std::uint64_t state_cap = kDefaultStateCap;
	std::string output_dir = ".";
	std::string formula;
	bool witness = false;
	std::string export_ts;
};

std::string read_file(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error("cannot open " + path);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_file(const fs::path &path, const std::string &text) {
	std::ofstream out(path, std::ios::binary);
	if (!out || !(out << text))
		throw Error("cannot write " + path.string());
}

ResolvedSpec load(const RunOptions &o) {
	ResolvedSpec spec = parse_and_resolve(read_file(o.input));
	for (const auto &w : spec.warnings)
		std::cerr << o.input << ":" << w.pos.line << ":" << w.pos.column << ": warning: " << w.message << "\n";
	return spec;
}

ClassifyOptions classify_options(const RunOptions &o) {
	ClassifyOptions c;
	if (o.scale == "auto") {
		c.scale = ClassifyOptions::Scale::Auto;
	} else if (o.scale == "none") {
		c.scale = ClassifyOptions::Scale::None;
	} else {
		c.scale = ClassifyOptions::Scale::Explicit;
		std::size_t used = 0;
		unsigned long v = 0;
		try {
			v = std::stoul(o.scale, &used);
		} catch (const std::exception &) {
			used = 0;
		}
		if (used != o.scale.size() || v == 0 || v > kUnbounded)
			throw ScaleError("--scale expects auto, none or a positive integer, got '" + o.scale + "'");
		c.divisor = static_cast<Time>(v);
	}
	c.include_memories = o.include_memories;
	c.full_formulas = o.full_formulas;
	c.build.state_cap = o.state_cap;
	c.build.bounds = o.strict_bounds ? Bounds::Strict : Bounds::Closed;
	return c;
}

std::string describe_state(const TransitionSystem &ts, std::size_t s) {
	std::ostringstream os;
	GlobalState g = ts.state(s);
	os << "#" << s << " (";
	for (std::size_t c = 0; c < ts.width(); ++c) {
		os << (c ? ", " : "") << ts.components[c] << "." << ts.location_names[c][g.locs[c]] << " x=" << g.x(c);
		if (g.u(c))
			os << " u=" << g.u(c);
	}
	os << ")";
	return os.str();
}

int cmd_parse(const RunOptions &o) {
	std::cout << pretty_print(load(o));
	return 0;
}

int cmd_elaborate(const RunOptions &o) {
	Network net = elaborate(load(o));
	for (const auto &v : check_zeno_free(net)) {
		std::cerr << "warning: " << v.automaton << " has a cycle without progress:";
		for (const auto &l : v.cycle)
			std::cerr << " " << l;
		std::cerr << "\n";
	}
	std::cout << (o.dot ? dump_dot(net) : dump_text(net));
	return 0;
}

int cmd_transform(const RunOptions &o) {
	ResolvedSpec spec = load(o);
	Time scale = 1;
	Network net = analysis_network(spec, classify_options(o), &scale);
	if (o.dot) {
		std::cout << dump_dot(net);
		return 0;
	}
	std::cout << "// scale " << scale << "\n" << dump_text(net);
	StaticPartition p = static_partition(net);
	std::cout << "\nstatic partition\n";
	auto list = [](const char *name, const std::vector<LocRef> &v) {
		std::cout << "  " << name << ":";
		for (const auto &r : v)
			std::cout << " " << r.automaton << "." << r.location;
		std::cout << "\n";
	};
	list("N", p.n);
	list("onlyS", p.only_s);
	list("W", p.w);
	return 0;
}

int cmd_emit(const RunOptions &o) {
	ResolvedSpec spec = load(o);
	ClassifyOptions c = classify_options(o);
	Time scale = 1;
	Network net = analysis_network(spec, c, &scale);
	EmittedModel m = emit_model(net, {scale, c.build.bounds});
	m.properties = emit_properties(checked_partition(spec, net, o.include_memories), m.names);
	fs::path dir(o.output_dir);
	fs::create_directories(dir);
	std::string stem = fs::path(o.input).stem().string();
	write_file(dir / (stem + ".prism"), m.model);
	write_file(dir / (stem + ".props"), m.properties);
	std::cout << "wrote " << (dir / (stem + ".prism")).string() << " and " << (dir / (stem + ".props")).string()
	          << "\n";
	return 0;
}

int cmd_classify(const RunOptions &o) {
	ResolvedSpec spec = load(o);
	ClassificationReport r = classify_spec(spec, classify_options(o));
	if (o.format == "json")
		std::cout << to_json(r, spec.has_aperiodic()).dump(2) << "\n";
	else
		std::cout << to_table(r);
	return 0;
}

int cmd_check(const RunOptions &o) {
	ResolvedSpec spec = load(o);
	ClassifyOptions c = classify_options(o);
	Network net = analysis_network(spec, c);
	FormulaPtr f = parse_formula(o.formula);
	TransitionSystem ts = build_ts(net, c.build);
	if (!o.export_ts.empty()) {
		std::ofstream tra(o.export_ts + ".tra"), sta(o.export_ts + ".sta");
		if (!tra || !sta)
			throw Error("cannot write " + o.export_ts + ".tra/.sta");
		export_transitions(ts, tra);
		export_states(ts, sta);
	}
	CtlChecker checker(ts);
	bool holds = checker.holds_initially(*f);
	std::cout << to_string(*f) << ": " << (holds ? "true" : "false") << " (" << ts.size() << " states)\n";
	if (o.witness && holds) {
		auto w = witness(checker, *f);
		if (w) {
			std::cout << "stem:\n";
			for (auto s : w->stem)
				std::cout << "  " << describe_state(ts, s) << "\n";
			if (!w->cycle.empty()) {
				std::cout << "cycle:\n";
				for (auto s : w->cycle)
					std::cout << "  " << describe_state(ts, s) << "\n";
			}
		}
	}
	return 0;
}

} // namespace

int main(int argc, char **argv) {
	RunOptions o;
	if (const char *env = std::getenv("MIRELA_STATE_CAP")) {
		try {
			o.state_cap = std::stoull(env);
		} catch (const std::exception &) {
			std::cerr << "error: MIRELA_STATE_CAP must be a number\n";
			return 1;
		}
	}

	CLI::App app{"Deadlock and starvation analysis for MIRELA specifications"};
	app.require_subcommand(1);
	app.set_version_flag("--version", std::string(kToolVersion));

	auto add_input = [&](CLI::App *sub) { sub->add_option("input", o.input, "Specification file")->required(); };
	auto add_analysis = [&](CLI::App *sub) {
		sub->add_option("--scale", o.scale, "Time scale: auto (gcd), none, or a divisor")->capture_default_str();
		sub->add_option("--state-cap", o.state_cap, "Abort after exploring this many transitions")
		    ->capture_default_str();
		sub->add_flag("--strict-bounds", o.strict_bounds, "Read invariants x<c as x<=c-1 instead of x<=c");
		sub->add_flag("--include-memories", o.include_memories, "Also analyse memories read by a rendering loop");
	};

	auto *parse = app.add_subcommand("parse", "Print the specification with implicit targets made explicit");
	add_input(parse);
	auto *elab = app.add_subcommand("elaborate", "Print one timed automaton per component");
	add_input(elab);
	elab->add_flag("--dot", o.dot, "Graphviz output");
	auto *transform = app.add_subcommand("transform", "Print the demultiplexed, urgency-free network");
	add_input(transform);
	add_analysis(transform);
	transform->add_flag("--dot", o.dot, "Graphviz output");
	auto *emit = app.add_subcommand("emit", "Write <stem>.prism and <stem>.props");
	add_input(emit);
	add_analysis(emit);
	emit->add_option("--output-dir,-o", o.output_dir, "Destination directory")->capture_default_str();
	auto *classify = app.add_subcommand("classify", "Classify every wait location");
	add_input(classify);
	add_analysis(classify);
	classify->add_flag("--full-formulas", o.full_formulas, "Evaluate psi and rho even where the cascade stops");
	classify->add_option("--format", o.format, "human or json")
	    ->check(CLI::IsMember({"human", "json"}))
	    ->capture_default_str();
	auto *check = app.add_subcommand("check", "Evaluate a CTL formula on the transformed network");
	add_input(check);
	add_analysis(check);
	check->add_option("--formula,-f", o.formula, "e.g. EF EG at(B,s1')")->required();
	check->add_flag("--witness", o.witness, "Print a witness path for EF formulas");
	check->add_option("--export-ts", o.export_ts, "Write PREFIX.tra and PREFIX.sta");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		return app.exit(e) == 0 ? 0 : 1;
	}

	try {
		if (*parse)
			return cmd_parse(o);
		if (*elab)
			return cmd_elaborate(o);
		if (*transform)
			return cmd_transform(o);
		if (*emit)
			return cmd_emit(o);
		if (*classify)
			return cmd_classify(o);
		if (*check)
			return cmd_check(o);
	} catch (const StateCapExceeded &e) {
		std::cerr << "error: " << e.what() << "\n";
		return 2;
	} catch (const SpecError &e) {
		std::cerr << o.input << ":" << e.what() << "\n";
		return 1;
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	}
	return 1;
}
