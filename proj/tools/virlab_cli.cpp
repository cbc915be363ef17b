// Command line front end; talks to the core through the C interface only.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "virlab.h"

namespace {

using Json = nlohmann::ordered_json;

const char* status_name(vl_status s) {
    switch (s) {
        case VL_OK: return "ok";
        case VL_FLAGGED: return "flagged";
        case VL_PARSE_ERROR: return "parse error";
        case VL_DOMAIN_ERROR: return "domain error";
        case VL_NUMERIC_ERROR: return "numeric error";
        default: return "internal error";
    }
}

int exit_code(vl_status s) { return s == VL_OK ? 0 : (s == VL_FLAGGED ? 1 : 2); }

std::string slurp(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text << "\n";
    return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact and sampled computations for circle symmetries"};
    app.require_subcommand(1);

    std::string op, request_path, inline_json, out_path;
    std::vector<std::string> sets;
    std::vector<std::pair<std::string, std::string>> knobs;

    auto add_knob = [&](const char* flag, const char* key, const char* help) {
        app.add_option_function<std::string>(
               flag, [&knobs, key](const std::string& v) { knobs.emplace_back(key, v); }, help)
            ->expected(1);
    };
    add_knob("--level", "level", "truncation level for graded computations");
    add_knob("--modes", "modes", "Fourier modes for sampled circle maps");
    add_knob("--max-iter", "max-iter", "cap on welding refinement passes");
    add_knob("--tol", "tol", "residual target for sampled welding");
    add_knob("--seed", "seed", "base seed for randomized checks");
    app.add_option("--out", out_path, "write the JSON reply to this file");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"mobius", "exact disk maps: compose, inverse, mantle, glue"},
        {"algebra", "trigonometric fields: bracket, virasoro, jacobi, gf2, gf3"},
        {"verma", "highest weight modules: gram, unitarizable"},
        {"qpft", "graded towers: build, primary, trinion, qr"},
        {"weld", "sampled circle welding: mul, scaling, mobius, triple, check"},
        {"train", "sewing words: genus, eval, defect"},
    };
    std::string picked;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->add_option("op", op, "operation to run")->required();
        sub->add_option("request", request_path, "JSON request file, '-' for stdin");
        sub->add_option("--json", inline_json, "inline JSON request");
        sub->add_option("--set", sets, "merge key=value into the request (value parsed as JSON)");
        sub->callback([&picked, name = name] { picked = name; });
    }
    CLI::App* conf = app.add_subcommand("conformance", "run the full identity suite");
    conf->fallthrough();
    conf->add_flag("--quiet", "print only the summary line");
    conf->callback([&picked] { picked = "conformance"; });

    CLI11_PARSE(app, argc, argv);

    vl_session* session = vl_session_new();
    if (!session) {
        std::cerr << "virlab: out of memory\n";
        return 2;
    }
    for (const auto& [key, value] : knobs)
        if (vl_session_set(session, key.c_str(), value.c_str()) != VL_OK) {
            std::cerr << "virlab: " << vl_last_error() << "\n";
            vl_session_free(session);
            return 2;
        }

    vl_status status = VL_OK;
    if (picked == "conformance") {
        char* report = nullptr;
        status = vl_conformance_run(session, &report);
        if (report) {
            Json rep = Json::parse(report);
            if (!conf->count("--quiet"))
                for (const Json& c : rep["checks"]) {
                    std::printf("[%-4s] %-28s %s\n", c["status"].get<std::string>().c_str(),
                                c["check"].get<std::string>().c_str(),
                                c["residual"].get<std::string>().c_str());
                }
            const Json& sum = rep["summary"];
            std::printf("%lld passed, %lld flagged, %lld failed\n",
                        sum["passed"].get<long long>(), sum["flagged"].get<long long>(),
                        sum["failed"].get<long long>());
            if (!out_path.empty() && !write_text(out_path, report)) {
                std::cerr << "virlab: cannot write " << out_path << "\n";
                status = VL_INTERNAL_ERROR;
            }
            vl_free(report);
        } else {
            std::cerr << "virlab: " << status_name(status) << ": " << vl_last_error() << "\n";
        }
        vl_session_free(session);
        return exit_code(status);
    }

    Json req = Json::object();
    try {
        if (!inline_json.empty()) {
            req = Json::parse(inline_json);
        } else if (request_path == "-") {
            req = Json::parse(slurp(std::cin));
        } else if (!request_path.empty()) {
            std::ifstream in(request_path);
            if (!in) {
                std::cerr << "virlab: cannot read " << request_path << "\n";
                vl_session_free(session);
                return 2;
            }
            req = Json::parse(slurp(in));
        }
        if (!req.is_object()) throw std::invalid_argument("the request must be a JSON object");
        for (const std::string& kv : sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set wants key=value, got '" + kv + "'");
            std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
            try {
                req[key] = Json::parse(value);
            } catch (const Json::parse_error&) {
                req[key] = value;  // bare words and rationals stay strings
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "virlab: parse error: " << e.what() << "\n";
        vl_session_free(session);
        return 2;
    }
    req["op"] = op;

    char* response = nullptr;
    status = vl_run_command(session, picked.c_str(), req.dump().c_str(), &response);
    if (status == VL_OK && response) {
        if (out_path.empty())
            std::cout << response << "\n";
        else if (!write_text(out_path, response)) {
            std::cerr << "virlab: cannot write " << out_path << "\n";
            status = VL_INTERNAL_ERROR;
        }
    } else {
        std::cerr << "virlab: " << status_name(status) << ": " << vl_last_error() << "\n";
    }
    vl_free(response);
    vl_session_free(session);
    return exit_code(status);
}
