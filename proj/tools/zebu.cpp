// SPDX-License-Identifier: Apache-2.0
// zebu: check, compile, parse, mutate and bench front end.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "zebu/artifact.hpp"
#include "zebu/engine.hpp"
#include "zebu/mutation.hpp"
#include "zebu/verifier.hpp"

namespace fs = std::filesystem;
using namespace zebu;

namespace {

enum Exit { Ok = 0, Diagnostics = 1, Unreadable = 2, WriteFailed = 3 };

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return ss.str();
}

bool write_file(const fs::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    return static_cast<bool>(out);
}

std::string default_protocol(const std::string& path) {
    std::string stem = fs::path(path).stem().string();
    std::replace(stem.begin(), stem.end(), '-', '_');
    return stem.empty() ? "zebu" : stem;
}

// Parses and verifies; prints diagnostics to stderr. Returns the grammar when it has no errors.
std::optional<AnnotatedGrammar> checked(const std::string& path, const std::string& source) {
    AnnotatedGrammar g;
    try {
        g = parse_zebu(source, default_protocol(path));
    } catch (const SyntaxError& e) {
        std::string msg = e.what();
        std::string loc = to_string(e.span()) + ": ";
        if (msg.rfind(loc, 0) == 0) msg.erase(0, loc.size());
        std::cerr << path << ":" << to_string(e.span()) << ": error[SYNTAX]: " << msg << "\n";
        return std::nullopt;
    }
    auto diags = verify_all(g);
    for (const auto& d : diags) std::cerr << format_diagnostic(d, path) << "\n";
    if (has_errors(diags)) return std::nullopt;
    return g;
}

// An artifact (JSON document) or a grammar source.
std::optional<CompiledGrammar> load_grammar(const std::string& path) {
    auto text = read_file(path);
    if (!text) {
        std::cerr << "zebu: cannot read " << path << "\n";
        return std::nullopt;
    }
    auto first = text->find_first_not_of(" \t\r\n");
    try {
        if (first != std::string::npos && (*text)[first] == '{') return load_artifact(*text);
        auto g = checked(path, *text);
        if (!g) return std::nullopt;
        return compile_grammar(*g, *text);
    } catch (const std::exception& e) {
        std::cerr << "zebu: " << path << ": " << e.what() << "\n";
        return std::nullopt;
    }
}

int cmd_check(const std::string& spec) {
    auto text = read_file(spec);
    if (!text) {
        std::cerr << "zebu: cannot read " << spec << "\n";
        return Unreadable;
    }
    return checked(spec, *text) ? Ok : Diagnostics;
}

int cmd_compile(const std::string& spec, const std::string& out) {
    auto text = read_file(spec);
    if (!text) {
        std::cerr << "zebu: cannot read " << spec << "\n";
        return Unreadable;
    }
    auto g = checked(spec, *text);
    if (!g) return Diagnostics;
    std::string artifact;
    try {
        artifact = serialize_artifact(compile_grammar(*g, *text));
    } catch (const std::exception& e) {
        std::cerr << "zebu: " << spec << ": " << e.what() << "\n";
        return Diagnostics;
    }
    if (!write_file(out, artifact)) {
        std::cerr << "zebu: cannot write " << out << "\n";
        return WriteFailed;
    }
    return Ok;
}

int cmd_parse(const std::string& artifact, const std::string& message, const std::vector<std::string>& fields) {
    auto g = load_grammar(artifact);
    if (!g) return Unreadable;
    auto raw = read_file(message);
    if (!raw) {
        std::cerr << "zebu: cannot read " << message << "\n";
        return Unreadable;
    }
    Session s(*g, *raw);
    Verdict v = validate(*g, s);
    for (const auto& f : fields) {
        try {
            TypedValue val = s.select(f);
            std::cout << f << " = " << (val.is<Absent>() ? std::string("ABSENT") : to_string(val)) << "\n";
        } catch (const UnknownSubfield& e) {
            std::cerr << "zebu: " << e.what() << "\n";
            return 2;
        } catch (const ParseFailure& e) {
            std::cout << f << " = UNAVAILABLE " << to_string(e.reason().code) << "\n";
        }
    }
    std::cout << v.render();
    std::cout << "exec_counter " << s.exec_counter() << "\n";
    return v.accept ? 0 : 1;
}

int cmd_mutate(const std::string& grammar, std::size_t count, std::uint64_t seed, const std::string& mixText,
               const std::string& outDir, unsigned jobs) {
    auto g = load_grammar(grammar);
    if (!g) return 2;
    Mix mix;
    try {
        if (!mixText.empty()) mix = Mix::parse(mixText);
    } catch (const std::invalid_argument& e) {
        std::cerr << "zebu: --mix: " << e.what() << "\n";
        return 2;
    }
    std::ofstream manifest;
    bool ioFailed = false;
    if (!outDir.empty()) {
        std::error_code ec;
        fs::create_directories(outDir, ec);
        manifest.open(fs::path(outDir) / "manifest.txt", std::ios::binary | std::ios::trunc);
        if (ec || !manifest) {
            std::cerr << "zebu: cannot write to " << outDir << "\n";
            return 2;
        }
    }
    auto target = [&](std::string_view m) { return validate(*g, m).accept; };
    auto sink = [&](const CampaignItem& item) {
        if (outDir.empty() || ioFailed) return;
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.raw", item.index);
        if (!write_file(fs::path(outDir) / name, item.mutant.bytes)) ioFailed = true;
        manifest << manifest_line(item) << "\n";
    };
    MutationReport report = run_campaign(*g, target, count, seed, mix, jobs, sink);
    std::string table = report.render();
    std::cout << table;
    if (!outDir.empty()) {
        manifest.close();
        if (ioFailed || !manifest || !write_file(fs::path(outDir) / "report.txt", table)) {
            std::cerr << "zebu: cannot write to " << outDir << "\n";
            return 2;
        }
    }
    return report.missed() == 0 && report.false_rejects() == 0 ? 0 : 1;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int cmd_bench(const std::string& artifact, const std::string& corpus, const std::string& headerList,
              std::size_t iters) {
    auto g = load_grammar(artifact);
    if (!g) return 2;
    auto headers = split_list(headerList);
    for (const auto& h : headers)
        if (!g->find_header(h)) {
            std::cerr << "zebu: header '" << h << "' is not declared by the grammar\n";
            return 2;
        }
    const char* shapes[] = {"invite1.msg", "invite2.msg", "invite3.msg", "bye.msg"};
    std::vector<std::string> raws;
    for (const char* s : shapes) {
        auto raw = read_file((fs::path(corpus) / s).string());
        if (!raw) {
            std::cerr << "zebu: corpus shape " << s << " missing from " << corpus << "\n";
            return 2;
        }
        raws.push_back(*raw);
    }
    std::printf("%-12s %8s %13s %10s %10s\n", "message", "headers", "exec_counter", "mean_us", "median_us");
    std::vector<std::size_t> counters;
    for (std::size_t m = 0; m < raws.size(); ++m) {
        auto run = [&]() {
            Session s(*g, raws[m]);
            try {
                s.message_type();
            } catch (const ParseFailure&) {
            }
            for (const auto& h : headers) s.parse_header(h);
            return s.exec_counter();
        };
        for (std::size_t w = 0; w < std::max<std::size_t>(1, iters / 10); ++w) run();
        std::vector<double> times;
        std::size_t counter = 0;
        for (std::size_t i = 0; i < iters; ++i) {
            auto t0 = std::chrono::steady_clock::now();
            counter = run();
            times.push_back(std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count());
        }
        double mean = 0;
        for (double t : times) mean += t;
        mean /= static_cast<double>(times.size());
        std::sort(times.begin(), times.end());
        double median = times[times.size() / 2];
        counters.push_back(counter);
        std::printf("%-12s %8zu %13zu %10.2f %10.2f\n", shapes[m], index_message(raws[m]).headers.size(), counter,
                    mean, median);
    }
    if (counters[1] != counters[2]) {
        std::printf("exec_counter differs between invite2.msg and invite3.msg\n");
        return 1;
    }
    std::printf("exec_counter invite2.msg == invite3.msg\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zebu grammar toolchain"};
    app.require_subcommand(1);
    int status = 0;

    std::string spec, out, artifact, message, mixText, outDir, corpus, headerList;
    std::vector<std::string> fields;
    std::size_t count = 0, iters = 1000;
    std::uint64_t seed = 0;
    unsigned jobs = 1;

    auto* check = app.add_subcommand("check", "verify an annotated grammar");
    check->add_option("spec", spec, "grammar file")->required();
    check->callback([&] { status = cmd_check(spec); });

    auto* compile = app.add_subcommand("compile", "verify and write a grammar artifact");
    compile->add_option("spec", spec, "grammar file")->required();
    compile->add_option("-o,--output", out, "artifact path")->required();
    compile->callback([&] { status = cmd_compile(spec, out); });

    auto* parse = app.add_subcommand("parse", "validate a message and print selected fields");
    parse->add_option("artifact", artifact, "artifact or grammar file")->required();
    parse->add_option("message", message, "raw message file")->required();
    parse->add_option("--field", fields, "Header.sub selector (repeatable)");
    parse->callback([&] { status = cmd_parse(artifact, message, fields); });

    auto* mutate = app.add_subcommand("mutate", "run a mutation campaign against the grammar's own validator");
    mutate->add_option("artifact", artifact, "artifact or grammar file")->required();
    mutate->add_option("--count", count, "number of mutants")->required()->check(CLI::PositiveNumber);
    mutate->add_option("--seed", seed, "campaign seed")->required();
    mutate->add_option("--mix", mixText, "rule weights, e.g. charset=1,repetition=1,constraint=1,torture=1");
    mutate->add_option("--out", outDir, "directory for .raw mutants, manifest.txt and report.txt");
    mutate->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    mutate->callback([&] { status = cmd_mutate(artifact, count, seed, mixText, outDir, jobs); });

    auto* bench = app.add_subcommand("bench", "time header access on the canonical corpus shapes");
    bench->add_option("artifact", artifact, "artifact or grammar file")->required();
    bench->add_option("corpus", corpus, "directory with invite1/2/3.msg and bye.msg")->required();
    bench->add_option("--headers", headerList, "comma-separated header names")->required();
    bench->add_option("--iters", iters, "timed iterations per message")->check(CLI::PositiveNumber);
    bench->callback([&] { status = cmd_bench(artifact, corpus, headerList, iters); });

    CLI11_PARSE(app, argc, argv);
    return status;
}
