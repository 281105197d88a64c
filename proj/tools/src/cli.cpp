#include "sampcorr_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "sampcorr/birge.hpp"
#include "sampcorr/dist_core.hpp"
#include "sampcorr/generators.hpp"
#include "sampcorr/isotonic.hpp"
#include "sampcorr/meta.hpp"
#include "sampcorr/missing_data.hpp"
#include "sampcorr/mono_correct.hpp"
#include "sampcorr/uniformity.hpp"

namespace sampcorr::cli {

namespace {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Global {
    std::uint64_t seed = 0;
    std::string mode = "exact";
    std::string out;
    std::string report;
    bool renormalize = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Pmf load_pmf(const std::string& path, bool renormalize) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
    if (!j.contains("p") || !j["p"].is_array()) throw UsageError(path + ": missing array \"p\"");
    auto p = j["p"].get<std::vector<double>>();
    if (j.contains("n") && j["n"].get<std::size_t>() != p.size()) throw UsageError(path + ": n does not match p");
    if (renormalize) return Pmf::normalized(std::move(p));
    try {
        return Pmf(std::move(p), 1e-6);
    } catch (const ParameterError& e) {
        throw UsageError(path + ": " + e.what() + " (pass --renormalize to rescale)");
    }
}

std::vector<std::size_t> load_stream(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::size_t> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        try {
            out.push_back(static_cast<std::size_t>(std::stoull(line)));
        } catch (const std::exception&) {
            throw UsageError(path + ": bad sample line '" + line + "'");
        }
    }
    return out;
}

std::vector<double> load_cdf_table(const std::string& path) {
    json j = json::parse(read_file(path));
    if (j.is_object() && j.contains("cdf")) return j["cdf"].get<std::vector<double>>();
    if (j.is_array()) return j.get<std::vector<double>>();
    throw UsageError(path + ": expected a cdf array or {\"cdf\": [...]}");
}

json pmf_json(const Pmf& p) { return json{{"n", p.n()}, {"p", p.p()}}; }

std::string pmf_digest(const Pmf& p) { return fnv1a_hex(pmf_json(p)["p"].dump()); }

std::string stream_text(const std::vector<std::size_t>& xs) {
    std::string s;
    for (std::size_t x : xs) {
        s += std::to_string(x);
        s += '\n';
    }
    return s;
}

void emit(const Global& g, std::ostream& out, const std::string& text) {
    if (g.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + g.out);
    f << text;
}

void write_report(const Global& g, json report, std::chrono::steady_clock::time_point start) {
    if (g.report.empty()) return;
    report["schema"] = 1;
    report["seed"] = g.seed;
    report["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    std::ofstream f(g.report, std::ios::binary);
    if (!f) throw UsageError("cannot write " + g.report);
    f << report.dump(2) << '\n';
}

// ---- gen ----

struct GenArgs {
    std::string kind;
    std::size_t n = 0;
    double s = 1.0;
    double q = 0.9;
    std::size_t steps = 4;
    double eps = 0.1;
    double dist = 0.05;
};

int cmd_gen(const Global& g, const GenArgs& a, std::ostream& out) {
    CounterRng rng(g.seed);
    json j;
    if (a.kind == "uniform") {
        j = pmf_json(gen_uniform(a.n));
    } else if (a.kind == "zipf-monotone") {
        j = pmf_json(gen_zipf_monotone(a.n, a.s));
    } else if (a.kind == "geometric-monotone") {
        j = pmf_json(gen_geometric_monotone(a.n, a.q));
    } else if (a.kind == "staircase") {
        j = pmf_json(gen_staircase(a.n, a.steps, rng));
    } else if (a.kind == "interval-uniform") {
        j = pmf_json(gen_interval_uniform(a.n, a.eps));
    } else if (a.kind == "perturbed-monotone") {
        const Fixture f = gen_perturbed_monotone(a.n, a.dist, rng, 1e-7);
        j = pmf_json(f.pmf);
        j["distance"] = f.distance;
    } else {
        throw UsageError("unknown kind '" + a.kind + "'");
    }
    emit(g, out, j.dump() + "\n");
    return kOk;
}

// ---- corrupt ----

struct CorruptArgs {
    std::string in;
    std::size_t from = 0;
    std::size_t to = 0;
};

int cmd_corrupt(const Global& g, const CorruptArgs& a, std::ostream& out) {
    const Pmf d = load_pmf(a.in, g.renormalize);
    auto [dprime, w] = inject_missing(d, a.from, a.to);
    json j = pmf_json(dprime);
    j["w"] = w;
    emit(g, out, j.dump() + "\n");
    return kOk;
}

// ---- correct ----

struct CorrectArgs {
    std::string method;
    std::string in;
    std::string samples;
    std::string ceval_file;
    std::size_t n = 0;
    double eps = 0.1;
    double eps2 = 0.05;
    double delta = 0.1;
    double c = 1.0;
    double alpha = 0.0;
    std::size_t m = 0;
    std::size_t queries = 1000;
};

struct Source {
    std::optional<Pmf> pmf;
    std::unique_ptr<DistAccess> access;
};

Source open_source(const Global& g, const CorrectArgs& a) {
    Source s;
    if (g.mode == "exact") {
        if (a.in.empty()) throw UsageError("exact mode needs --in <pmf.json>");
        if (!a.samples.empty()) throw UsageError("exact mode takes a pmf, not a sample stream");
        s.pmf = load_pmf(a.in, g.renormalize);
        s.access = std::make_unique<DistAccess>(DistAccess::from_pmf(*s.pmf, g.seed));
    } else if (g.mode == "sample") {
        if (!a.in.empty() && !a.samples.empty()) throw UsageError("give either --in or --samples, not both");
        if (!a.in.empty()) {
            s.pmf = load_pmf(a.in, g.renormalize);
            s.access = std::make_unique<DistAccess>(DistAccess::from_pmf(*s.pmf, g.seed, false));
        } else if (!a.samples.empty()) {
            auto xs = load_stream(a.samples);
            std::size_t n = a.n;
            std::optional<std::vector<double>> table;
            if (!a.ceval_file.empty()) {
                table = load_cdf_table(a.ceval_file);
                if (n == 0) n = table->size();
            }
            if (n == 0) throw UsageError("sample streams need --n (or a --ceval-file)");
            s.access = std::make_unique<DistAccess>(DistAccess::from_stream(std::move(xs), n, std::move(table)));
        } else {
            throw UsageError("sample mode needs --samples <file> or --in <pmf.json>");
        }
    } else {
        throw UsageError("--mode must be exact or sample");
    }
    return s;
}

int cmd_correct(const Global& g, const CorrectArgs& a, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    Source src = open_source(g, a);
    DistAccess& access = *src.access;
    const std::size_t n = access.n();
    const bool exact = g.mode == "exact";
    CounterRng rng(CounterRng(g.seed).split(0x636f7272));

    json report{{"command", "correct"}, {"method", a.method}, {"mode", g.mode}};
    report["params"] = {{"eps", a.eps},     {"eps2", a.eps2}, {"delta", a.delta},
                        {"c", a.c},         {"alpha", a.alpha},  {"m", a.m},       {"queries", a.queries}};
    if (src.pmf) report["input_digest"] = pmf_digest(*src.pmf);
    std::size_t fails = 0, restarts = 0;
    std::optional<Pmf> result;
    std::vector<std::size_t> stream;
    int code = kOk;

    auto need_exact_method = [&](const char* what) {
        if (exact) throw UsageError(std::string("method ") + what + " has no exact-mode materialization; use --mode sample");
    };
    auto collect = [&](auto&& one) {
        for (std::size_t i = 0; i < a.queries; ++i) {
            const Emission e = one();
            if (e.ok())
                stream.push_back(e.value);
            else
                ++fails;
        }
    };

    if (a.method == "learned") {
        const Pmf corrected = learned_corrector_build(access, a.eps, a.c, a.delta);
        if (exact) {
            result = corrected;
        } else {
            DistAccess served = DistAccess::from_pmf(corrected, rng());
            stream = served.draw_many(a.queries);
        }
    } else if (a.method == "oblivious") {
        ObliviousSampler s = a.alpha > 0.0 ? ObliviousSampler(birge_partition(n, a.alpha), a.eps)
                                           : ObliviousSampler(n, a.eps);
        report["ell"] = s.partition().ell();
        report["lambda"] = s.plan().lambda;
        if (exact) {
            result = s.materialize(*src.pmf);
        } else {
            for (std::size_t i = 0; i < a.queries; ++i) stream.push_back(s.sample(access, rng));
        }
    } else if (a.method == "waterfill") {
        if (!access.has_ceval()) throw UsageError("waterfill needs cdf queries: supply --ceval-file or --in");
        WaterfillState st(access, a.eps, a.m ? a.m : a.queries);
        if (exact) {
            result = st.materialize();
        } else {
            for (std::size_t i = 0; i < a.queries; ++i) stream.push_back(st.sample(rng));
        }
        restarts = st.restarts();
        report["K"] = st.K();
        report["L"] = st.L();
    } else if (a.method == "missing-data") {
        CorrectorParams p{a.eps, a.eps, a.eps2, a.delta, a.queries};
        MissingDataImprover imp(access, p);
        const auto& r = imp.report();
        report["report"] = {{"kind", r.kind == MissingDataReport::Kind::Gap ? "GAP" : "CLOSE"},
                            {"a", r.a}, {"b", r.b}, {"gamma", r.gamma}, {"gamma_prime", r.gamma_prime},
                            {"c", r.c}, {"pass_through", imp.pass_through()}};
        if (exact)
            result = imp.materialize(*src.pmf);
        else
            stream = imp.batch(a.queries, rng);
    } else if (a.method == "vn") {
        need_exact_method("vn");
        collect([&] { return vn_sample(access, n, a.eps, a.delta); });
    } else if (a.method == "convolution") {
        if (exact)
            result = convolve_power(*src.pmf, convolution_order(a.eps, a.eps2));
        else
            for (std::size_t i = 0; i < a.queries; ++i) stream.push_back(convolution_improve(access, n, a.eps, a.eps2));
    } else if (a.method == "hybrid") {
        if (exact)
            result = hybrid_exact(*src.pmf);
        else
            for (std::size_t i = 0; i < a.queries; ++i) stream.push_back(hybrid_improve(access, n, a.eps));
    } else if (a.method == "bootstrap") {
        if (exact)
            result = bootstrap_exact(*src.pmf, bootstrap_depth(a.eps, a.eps2));
        else
            for (std::size_t i = 0; i < a.queries; ++i) stream.push_back(bootstrap_improve(access, n, a.eps, a.eps2));
    } else if (a.method == "subgroup") {
        need_exact_method("subgroup");
        CorrectorParams p{a.eps, a.eps, a.eps2, a.delta, a.queries};
        SubgroupImprover imp(access, n, p);
        report["generator"] = imp.generator();
        collect([&] { return imp.sample(); });
    } else if (a.method == "mono-extract") {
        need_exact_method("mono-extract");
        MonotoneExtractor ex(access, n, a.eps, a.delta);
        report["split"] = ex.split();
        if (ex.point_mass()) {
            report["point_mass"] = true;
        } else {
            collect([&] { return ex.next(); });
        }
    } else {
        throw UsageError("unknown method '" + a.method + "'");
    }

    if (result) {
        const std::string text = pmf_json(*result).dump() + "\n";
        emit(g, out, text);
        report["output_digest"] = pmf_digest(*result);
        report["tv_to_input"] = tv_distance(*src.pmf, *result);
        if (n <= 10000) report["tv_to_property"] = distance_to_monotone_exact(*result);
        report["tv_to_uniform"] = tv_distance(Pmf::uniform(n), *result);
    } else {
        const std::string text = stream_text(stream);
        emit(g, out, text);
        report["output_digest"] = fnv1a_hex(text);
        report["outputs"] = stream.size();
        if (src.pmf && !stream.empty()) {
            const Pmf emp = empirical_pmf(stream, n);
            report["empirical_tv_to_input"] = tv_distance(*src.pmf, emp);
        }
    }
    report["draws_consumed"] = access.draws();
    report["cdf_queries"] = access.queries();
    report["fail_count"] = fails;
    report["restarts"] = restarts;
    if (fails > 0 && static_cast<double>(fails) > 2.0 * a.delta * static_cast<double>(a.queries) + 3.0) code = kContractFailure;
    write_report(g, report, start);
    return code;
}

// ---- eval ----

struct EvalArgs {
    std::string what;
    std::string in;
    std::string other;
};

int cmd_eval(const Global& g, const EvalArgs& a, std::ostream& out) {
    const Pmf p = load_pmf(a.in, g.renormalize);
    json j{{"metric", a.what}};
    if (a.what == "dist-to-monotone") {
        j["value"] = distance_to_monotone_exact(p);
    } else if (a.what == "tv" || a.what == "kolmogorov") {
        if (a.other.empty()) throw UsageError(a.what + " needs --other <pmf.json>");
        const Pmf q = load_pmf(a.other, g.renormalize);
        j["value"] = a.what == "tv" ? tv_distance(p, q) : kolmogorov_distance(p, q);
    } else if (a.what == "tv-to-uniform") {
        j["value"] = tv_distance(p, Pmf::uniform(p.n()));
    } else if (a.what == "is-monotone") {
        j["value"] = is_monotone(p, 1e-12);
    } else {
        throw UsageError("unknown metric '" + a.what + "'");
    }
    emit(g, out, j.dump() + "\n");
    return kOk;
}

// ---- test ----

struct TestArgs {
    std::string what;
    std::string in;
    double eps_lo = 0.1;
    double eps_hi = 0.5;
    double delta = 0.1;
};

int cmd_test(const Global& g, const TestArgs& a, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    if (a.what != "tolerant-monotone") throw UsageError("unknown test '" + a.what + "'");
    const Pmf p = load_pmf(a.in, g.renormalize);
    DistAccess access = DistAccess::from_pmf(p, g.seed);
    const auto part = IntervalPartition::singletons(p.n());
    const auto r = tolerant_tester_from_corrector(exact_monotone_corrector(), surrogate_estimator_spec(part),
                                                  surrogate_tester_spec(part), a.eps_lo, a.eps_hi, a.delta, access,
                                                  CounterRng(g.seed).split(0x7465).operator()());
    json j{{"decision", r.accept ? "ACCEPT" : "REJECT"}, {"beta", r.beta}, {"threshold", r.threshold},
           {"estimate", r.estimate}};
    emit(g, out, j.dump() + "\n");
    json report{{"command", "test"}, {"method", a.what}, {"mode", g.mode}, {"input_digest", pmf_digest(p)},
                {"decision", j["decision"]}, {"estimate", r.estimate}, {"draws_consumed", access.draws()},
                {"cdf_queries", access.queries()}, {"fail_count", 0}, {"restarts", 0}};
    report["params"] = {{"eps_lo", a.eps_lo}, {"eps_hi", a.eps_hi}, {"delta", a.delta}};
    write_report(g, report, start);
    return kOk;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"sampling correctors and improvers"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--mode", g.mode, "exact or sample")->check(CLI::IsMember({"exact", "sample"}));
    app.add_option("--out", g.out, "output file (default stdout)");
    app.add_option("--report", g.report, "run report JSON file");
    app.add_flag("--renormalize", g.renormalize, "rescale input pmfs that do not sum to 1");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "generate a pmf");
    gen->add_option("--kind", ga.kind)->required();
    gen->add_option("--n", ga.n)->required()->check(CLI::PositiveNumber);
    gen->add_option("--s", ga.s, "zipf exponent");
    gen->add_option("--q", ga.q, "geometric ratio");
    gen->add_option("--steps", ga.steps, "staircase steps");
    gen->add_option("--eps", ga.eps, "interval-uniform gap fraction");
    gen->add_option("--dist", ga.dist, "perturbed-monotone distance");

    CorruptArgs ca;
    auto* corrupt = app.add_subcommand("corrupt", "inject an error model");
    auto* missing = corrupt->add_subcommand("missing", "delete an interval");
    corrupt->require_subcommand(1);
    missing->add_option("--in", ca.in)->required();
    missing->add_option("--from", ca.from)->required();
    missing->add_option("--to", ca.to)->required();

    CorrectArgs cr;
    auto* correct = app.add_subcommand("correct", "run a corrector or improver");
    correct->add_option("--method", cr.method)
        ->required()
        ->check(CLI::IsMember({"learned", "oblivious", "waterfill", "missing-data", "vn", "convolution", "hybrid",
                               "bootstrap", "subgroup", "mono-extract"}));
    correct->add_option("--in", cr.in, "pmf JSON");
    correct->add_option("--samples", cr.samples, "newline-delimited sample stream");
    correct->add_option("--ceval-file", cr.ceval_file, "tabulated cdf for stream input");
    correct->add_option("--n", cr.n, "domain size for stream input");
    correct->add_option("--eps", cr.eps);
    correct->add_option("--eps2", cr.eps2);
    correct->add_option("--delta", cr.delta);
    correct->add_option("--c", cr.c);
    correct->add_option("--alpha", cr.alpha, "oblivious: Birge parameter; --eps is then the plan distance");
    correct->add_option("--m", cr.m, "batch size for waterfill");
    correct->add_option("--queries", cr.queries, "outputs in sample mode");

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "evaluate a pmf");
    eval->add_option("what", ev.what)->required();
    eval->add_option("--in", ev.in)->required();
    eval->add_option("--other", ev.other);

    TestArgs ta;
    auto* test = app.add_subcommand("test", "property tests");
    test->add_option("what", ta.what)->required();
    test->add_option("--in", ta.in)->required();
    test->add_option("--eps-lo", ta.eps_lo);
    test->add_option("--eps-hi", ta.eps_hi);
    test->add_option("--delta", ta.delta);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*gen) return cmd_gen(g, ga, out);
        if (*missing) return cmd_corrupt(g, ca, out);
        if (*correct) return cmd_correct(g, cr, out);
        if (*eval) return cmd_eval(g, ev, out);
        if (*test) return cmd_test(g, ta, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParameterError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const CapabilityError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const InsufficientSamples& e) {
        err << "contract failure: " << e.what() << '\n';
        return kContractFailure;
    } catch (const PromiseViolation& e) {
        err << "contract failure: " << e.what() << '\n';
        return kContractFailure;
    } catch (const nlohmann::json::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace sampcorr::cli
