#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stackpeg/effects.hpp"
#include "stackpeg/engine.hpp"
#include "stackpeg/grammar_text.hpp"
#include "stackpeg/optimizer.hpp"

namespace stackpeg::cli {

namespace {

using nlohmann::json;

struct Config {
    std::string grammar_path;
    std::string start;
    std::string input;
    std::string input_file;
    bool has_input = false;
    bool no_optimize = false;
    std::vector<std::string> passes;
    bool trace = false;
    bool json = false;
    bool no_caret = false;
};

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

json value_json(const Value& v) {
    if (v.is_text())
        return v.as_text();
    if (v.is_node()) {
        json children = json::array();
        for (const auto& c : v.as_node().children)
            children.push_back(value_json(c));
        return {{"label", v.as_node().label}, {"tag", v.tag().name()}, {"children", children}};
    }
    return {{"opaque", v.tag().name()}};
}

json tags_json(const std::vector<Tag>& ts) {
    json out = json::array();
    for (const auto& t : ts)
        out.push_back(t.name());
    return out;
}

std::string kind_name(const Diagnostic& d) {
    return d.effect_kind ? std::string(to_string(*d.effect_kind)) : std::string(to_string(d.kind));
}

int report_diagnostics(const grammar_error& e, const Config& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.json) {
        json ds = json::array();
        for (const auto& d : e.diagnostics()) {
            json j{{"kind", kind_name(d)}, {"message", d.message}};
            if (d.offset)
                j["offset"] = *d.offset;
            ds.push_back(j);
        }
        out << json{{"result", "invalid"}, {"diagnostics", ds}}.dump() << "\n";
    }
    for (const auto& d : e.diagnostics())
        err << d.message << "\n";
    return usage;
}

// Loads and checks the grammar; throws grammar_error.
Grammar load(const Config& cfg) {
    GrammarSource src;
    src.file_name = cfg.grammar_path;
    if (!read_file(cfg.grammar_path, src.text))
        throw grammar_error({Diagnostic{DiagnosticKind::syntax, cfg.grammar_path + ": cannot read grammar file", {}, {}, {}}});
    ParseOptions opts;
    if (!cfg.start.empty())
        opts.start = cfg.start;
    return parse_grammar(src, opts);
}

int cmd_check(const Config& cfg, std::ostream& out, std::ostream& err) {
    try {
        auto g = load(cfg);
        auto report = check_grammar(g);
        if (cfg.json) {
            json rules = json::array();
            for (const auto& [name, eff] : report.rules)
                rules.push_back({{"name", name}, {"pops", tags_json(eff.pops)}, {"pushes", tags_json(eff.pushes)}});
            out << json{{"result", "ok"}, {"start", g.start()}, {"rules", rules}}.dump() << "\n";
        } else {
            for (const auto& [name, eff] : report.rules)
                out << name << ": " << to_string(eff) << "\n";
        }
        return ok;
    } catch (const grammar_error& e) {
        return report_diagnostics(e, cfg, out, err);
    }
}

int cmd_run(const Config& cfg, std::ostream& out, std::ostream& err) {
    Grammar g;
    try {
        g = load(cfg);
    } catch (const grammar_error& e) {
        return report_diagnostics(e, cfg, out, err);
    }

    std::vector<RewritePass> passes;
    if (!cfg.passes.empty()) {
        for (const auto& name : cfg.passes) {
            auto p = pass_by_name(name);
            if (!p) {
                err << "unknown pass '" << name << "'\n";
                return usage;
            }
            passes.push_back(*p);
        }
    } else if (!cfg.no_optimize && !cfg.trace) {
        // The trace shows the grammar as written unless passes are asked for.
        passes = default_passes();
    }
    g = optimize(g, passes);

    std::string input = cfg.input;
    if (!cfg.input_file.empty()) {
        if (!read_file(cfg.input_file, input)) {
            err << cfg.input_file << ": cannot read input file\n";
            return usage;
        }
    } else if (!cfg.has_input) {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        input = ss.str();
    }

    RunOptions opts;
    if (cfg.trace)
        opts.events = [&](const TraceEvent& e) { out << format_event(e) << "\n"; };
    auto result = run(g, input, std::nullopt, opts);

    if (auto* s = std::get_if<Success>(&result.outcome)) {
        if (cfg.json) {
            json values = json::array();
            for (const auto& v : s->values)
                values.push_back(value_json(v));
            out << json{{"result", "success"}, {"values", values}}.dump() << "\n";
        } else {
            for (const auto& v : s->values)
                out << to_string(v) << "\n";
        }
        return ok;
    }
    if (auto* f = std::get_if<ParseFailure>(&result.outcome)) {
        auto message = format_error(f->error, input, FormatOptions{!cfg.no_caret});
        if (cfg.json) {
            const auto& p = f->error.position;
            out << json{{"result", "error"},
                        {"position", {{"index", p.index}, {"line", p.line}, {"column", p.column}}},
                        {"expected", f->error.expected()},
                        {"message", message}}
                       .dump()
                << "\n";
        } else {
            out << message << "\n";
        }
        return parse_failure;
    }
    const auto& fault = std::get<InternalFault>(result.outcome);
    if (cfg.json)
        out << json{{"result", "fault"}, {"kind", std::string(to_string(fault.kind))}, {"message", fault.description}}.dump()
            << "\n";
    err << "internal fault (" << to_string(fault.kind) << "): " << fault.description << "\n";
    return internal;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Run and check PEG grammars", "stackpeg"};
    app.require_subcommand(1);
    Config cfg;

    auto* run_cmd = app.add_subcommand("run", "Parse an input with a grammar");
    run_cmd->add_option("-g,--grammar", cfg.grammar_path, "Grammar file (.peg)")->required();
    run_cmd->add_option("-s,--start", cfg.start, "Start rule (default: first definition)");
    auto* in_opt = run_cmd->add_option("-i,--input", cfg.input, "Input text");
    auto* file_opt = run_cmd->add_option("-f,--input-file", cfg.input_file, "Read the input from a file");
    in_opt->excludes(file_opt);
    auto* no_opt = run_cmd->add_flag("--no-optimize", cfg.no_optimize, "Run the grammar without rewrite passes");
    run_cmd->add_option("--passes", cfg.passes, "Comma-separated rewrite passes to apply")->delimiter(',')->excludes(no_opt);
    run_cmd->add_flag("--trace", cfg.trace, "Print the step log of the parse");
    run_cmd->add_flag("--json", cfg.json, "Print the result as JSON");
    run_cmd->add_flag("--no-caret", cfg.no_caret, "Omit the caret line in error messages");

    auto* check_cmd = app.add_subcommand("check", "Check a grammar and print rule stack effects");
    check_cmd->add_option("-g,--grammar", cfg.grammar_path, "Grammar file (.peg)")->required();
    check_cmd->add_option("-s,--start", cfg.start, "Start rule (default: first definition)");
    check_cmd->add_flag("--json", cfg.json, "Print the result as JSON");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        if (!app.get_subcommands().empty())
            err << app.get_subcommands().front()->help();
        return usage;
    }

    cfg.has_input = in_opt->count() > 0;
    try {
        if (run_cmd->parsed())
            return cmd_run(cfg, out, err);
        return cmd_check(cfg, out, err);
    } catch (const std::exception& e) {
        err << "internal fault: " << e.what() << "\n";
        return internal;
    }
}

} // namespace stackpeg::cli
