// gillab: build Cantor families, evaluate F, run verification suites and
// export covers, arcs and cycles.
//
// Exit status: 0 success, 1 verification or computation failure, 2 usage
// error, 3 cache error.

#include "gillab/gillab.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using namespace gillab;

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kCache = 3 };

struct UsageError : Error {
    using Error::Error;
};

struct RunConfig {
    int level = 2;
    int stage = 6;
    std::string mode = "zero";
    std::string cacheDir;
    std::string format;
    std::uint64_t seed = 1;
    int maxPeriod = 12;
    std::string threadsFile;
    std::string output;
};

std::string cache_dir(const RunConfig& cfg)
{
    if (!cfg.cacheDir.empty()) return cfg.cacheDir;
    if (const char* env = std::getenv("GILLAB_CACHE"); env && *env) return env;
    return {};
}

// Loads the cached family when one exists, otherwise builds it in memory.
std::shared_ptr<const CantorFamily> obtain_family(const RunConfig& cfg)
{
    const std::string dir = cache_dir(cfg);
    if (!dir.empty() && std::filesystem::exists(family_cache_path(dir, cfg.level, cfg.stage)))
        return std::make_shared<const CantorFamily>(load_family_cache(dir, cfg.level, cfg.stage));
    return std::make_shared<const CantorFamily>(build_family(cfg.level, cfg.stage));
}

SetValuedMap obtain_map(const RunConfig& cfg) { return make_map(parse_mode(cfg.mode), obtain_family(cfg)); }

void emit(const RunConfig& cfg, const std::string& text)
{
    if (cfg.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw Error("cannot write " + cfg.output);
    out << text;
}

std::string format_or(const RunConfig& cfg, const std::string& fallback, std::initializer_list<const char*> allowed)
{
    const std::string f = cfg.format.empty() ? fallback : cfg.format;
    for (const char* a : allowed)
        if (f == a) return f;
    throw UsageError("format '" + f + "' is not available here");
}

Json config_json(const RunConfig& cfg)
{
    return {{"level", cfg.level}, {"stage", cfg.stage}, {"mode", cfg.mode}, {"seed", cfg.seed}, {"max_period", cfg.maxPeriod}};
}

std::vector<Thread> load_threads(const SetValuedMap& m, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read threads file " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw UsageError("threads file: " + std::string(e.what()));
    }
    if (!j.is_array()) throw UsageError("threads file must hold a JSON array");
    std::vector<Thread> out;
    for (const auto& item : j) {
        Thread th;
        try {
            th = Thread::from_json(item);
        } catch (const Json::exception& e) {
            throw UsageError("threads file: " + std::string(e.what()));
        }
        certify_thread(m, th);
        out.push_back(std::move(th));
    }
    return out;
}

int cmd_family_build(const RunConfig& cfg)
{
    const std::string dir = cache_dir(cfg);
    if (dir.empty()) throw UsageError("family build needs --cache-dir or GILLAB_CACHE");
    auto fam = build_family(cfg.level, cfg.stage);
    save_family_cache(fam, dir);
    emit(cfg, family_cache_path(dir, cfg.level, cfg.stage).string() + "\n");
    return kOk;
}

int cmd_family_inspect(const RunConfig& cfg)
{
    const std::string dir = cache_dir(cfg);
    if (dir.empty()) throw UsageError("family inspect needs --cache-dir or GILLAB_CACHE");
    auto fam = load_family_cache(dir, cfg.level, cfg.stage);
    auto audit = check_nesting(fam, cfg.stage);
    const std::string fmt = format_or(cfg, "json", {"json", "csv"});
    if (fmt == "csv") {
        std::ostringstream os;
        os << "index,stage,components,measure,cover\n";
        for (const auto& r : fam.indices())
            for (int d = 0; d <= cfg.stage; ++d) {
                const auto& c = fam.at(r).stage(d);
                os << to_string(r) << ',' << d << ',' << c.size() << ',' << to_string(c.measure()) << ',' << c.str() << '\n';
            }
        emit(cfg, os.str());
    } else {
        Json j;
        j["level"] = fam.level;
        j["budget"] = fam.budget;
        Json members = Json::array();
        for (const auto& r : fam.indices()) {
            Json stages = Json::array();
            for (int d = 0; d <= cfg.stage; ++d) {
                const auto& c = fam.at(r).stage(d);
                stages.push_back({{"stage", d}, {"components", c.size()}, {"measure", jrat(c.measure())}, {"cover", c.str()}});
            }
            members.push_back({{"index", jrat(r)}, {"stages", std::move(stages)}});
        }
        j["members"] = std::move(members);
        j["nesting"] = audit.to_json();
        emit(cfg, j.dump(2) + "\n");
    }
    return audit.passed ? kOk : kFailed;
}

int cmd_eval(const RunConfig& cfg, const std::string& text)
{
    Rational t;
    try {
        t = parse_rational(text);
    } catch (const Error&) {
        throw UsageError("not a rational: " + text);
    }
    if (t < 0 || t > 1) throw UsageError("t must lie in [0,1]");
    auto m = obtain_map(cfg);
    auto b = eval_F(m, t, cfg.level, cfg.stage);
    auto f = eval_f(m.base, t, cfg.stage);
    Json members = Json::array();
    for (const auto& r : m.family->indices()) {
        auto mem = m.family->at(r).membership(t, cfg.stage);
        Json mj{{"index", jrat(r)}, {"verdict", to_string(mem.verdict)}};
        if (mem.decidedAtStage) mj["stage"] = *mem.decidedAtStage;
        members.push_back(std::move(mj));
    }
    const std::string fmt = format_or(cfg, "json", {"json", "csv"});
    if (fmt == "csv") {
        std::ostringstream os;
        os << "t,kind,lower_max,upper_max,point\n"
           << to_string(t) << ',' << to_string(b.kind) << ',' << to_string(b.lowerMax) << ',' << to_string(b.upperMax) << ','
           << (b.pointValue ? to_string(*b.pointValue) : "") << '\n';
        emit(cfg, os.str());
        return kOk;
    }
    Json j;
    j["t"] = jrat(t);
    j["mode"] = cfg.mode;
    j["kind"] = to_string(b.kind);
    if (b.pointValue) j["value"] = "{" + to_string(*b.pointValue) + "}";
    else if (b.kind == FBracket::Kind::Interval && b.lowerMax == b.upperMax) j["value"] = "[0," + to_string(b.lowerMax) + "]";
    j["lower_max"] = jrat(b.lowerMax);
    j["upper_max"] = jrat(b.upperMax);
    j["f"] = f.exact() ? Json(to_string(f.lo)) : Json(f.lo.get_str() + ".." + to_string(f.hi));
    j["membership"] = std::move(members);
    emit(cfg, j.dump(2) + "\n");
    return kOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite)
{
    std::vector<std::string> names;
    if (suite == "all") names = suite_names();
    else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) names = {suite};
    else throw UsageError("unknown suite '" + suite + "'");
    const std::string fmt = format_or(cfg, "json", {"json", "csv"});

    auto m = obtain_map(cfg);
    CheckConfig cc;
    cc.level = cfg.level;
    cc.stage = cfg.stage;
    cc.seed = cfg.seed;
    cc.max_period = cfg.maxPeriod;
    if (!cfg.threadsFile.empty()) cc.threads = load_threads(m, cfg.threadsFile);

    bool all = true;
    Json suites = Json::array();
    std::ostringstream csv;
    csv << "suite,passed,first_failure\n";
    for (const auto& n : names) {
        Report r = run_suite(n, m, cc);
        all = all && r.passed;
        csv << n << ',' << (r.passed ? "true" : "false") << ',' << (r.failures.empty() ? "" : "\"" + r.failures.front() + "\"") << '\n';
        suites.push_back(r.to_json());
    }
    if (fmt == "csv") {
        emit(cfg, csv.str());
    } else {
        Json j;
        j["config"] = config_json(cfg);
        j["passed"] = all;
        j["suites"] = std::move(suites);
        emit(cfg, j.dump(2) + "\n");
    }
    return all ? kOk : kFailed;
}

struct ExportOptions {
    int pixels = 512;
    std::size_t n = 2;
    std::string index = "1/2";
    int thread = 0;
    int arc = -1;
    std::vector<std::size_t> coords{0, 1};
    int samples = 16;
};

int cmd_export(const RunConfig& cfg, const std::string& what, const ExportOptions& opt)
{
    auto m = obtain_map(cfg);
    if (what == "graph") {
        auto gc = graph_cover(m, cfg.stage, cfg.level);
        const std::string fmt = format_or(cfg, "csv", {"csv", "svg", "json"});
        if (fmt == "csv") emit(cfg, graph_cover_csv(gc));
        else if (fmt == "svg") emit(cfg, graph_cover_svg(gc, opt.pixels));
        else emit(cfg, graph_cover_json(gc).dump(2) + "\n");
        return kOk;
    }
    if (what == "mahavier") {
        if (opt.n < 1) throw UsageError("--n must be at least 1");
        auto bc = mahavier_cover(m, opt.n, cfg.stage, cfg.level);
        const std::string fmt = format_or(cfg, "csv", {"csv", "json"});
        emit(cfg, fmt == "csv" ? box_cover_csv(bc) : box_cover_json(bc).dump(2) + "\n");
        return kOk;
    }
    if (what == "arc") {
        std::vector<Thread> threads = cfg.threadsFile.empty() ? arc_threads(m) : load_threads(m, cfg.threadsFile);
        if (opt.thread < 0 || static_cast<std::size_t>(opt.thread) >= threads.size()) throw UsageError("--thread out of range");
        if (opt.coords.size() != 2) throw UsageError("--coords takes two indices");
        auto sys = make_arc_system(m, threads[static_cast<std::size_t>(opt.thread)]);
        const std::size_t n = opt.arc < 0 ? sys.first_arc() : static_cast<std::size_t>(opt.arc);
        if (n < sys.first_arc()) throw UsageError("--arc below the first arc of this thread");
        auto params = arc_parameters(sys, n);
        const Rational xn = sys.thread.coord(n);
        for (int k = 0; k <= opt.samples; ++k) params.push_back(xn * Rational(k, std::max(opt.samples, 1)));
        std::sort(params.begin(), params.end());
        params.erase(std::unique(params.begin(), params.end()), params.end());
        auto pts = arc_points(sys, n, params, {opt.coords[0], opt.coords[1]});
        const std::string fmt = format_or(cfg, "csv", {"csv", "json"});
        emit(cfg, fmt == "csv" ? arc_csv(pts, opt.coords[0], opt.coords[1]) : arc_json(pts, opt.coords[0], opt.coords[1]).dump(2) + "\n");
        return kOk;
    }
    if (what == "cantor") {
        Rational r;
        try {
            r = parse_rational(opt.index);
        } catch (const Error&) {
            throw UsageError("not a rational: " + opt.index);
        }
        if (!m.family->members.count(r)) throw UsageError("no family member " + opt.index + " at level " + std::to_string(cfg.level));
        const auto& g = m.family->at(r);
        const std::string fmt = format_or(cfg, "text", {"text", "csv", "json"});
        if (fmt == "text") emit(cfg, cantor_text(g, cfg.stage));
        else if (fmt == "csv") emit(cfg, cantor_csv(g, cfg.stage));
        else emit(cfg, Json{{"index", jrat(r)}, {"stage", cfg.stage}, {"cover", g.stage(cfg.stage).str()}}.dump(2) + "\n");
        return kOk;
    }
    throw UsageError("unknown export '" + what + "'");
}

int cmd_cycle(const RunConfig& cfg, int n)
{
    if (n < 1) throw UsageError("period must be positive");
    auto m = obtain_map(cfg);
    auto c = make_cycle(m, n);
    auto rep = verify_orbit(m, c.points, true);
    Json j = cycle_json(c);
    j["least_rotation_period"] = rep.detail["least_rotation_period"];
    j["valid"] = rep.passed;
    emit(cfg, j.dump(2) + "\n");
    return rep.passed ? kOk : kFailed;
}

int cmd_orbit(const RunConfig& cfg, const std::vector<std::string>& texts, bool closed)
{
    std::vector<Rational> pts;
    for (const auto& s : texts) {
        try {
            pts.push_back(parse_rational(s));
        } catch (const Error&) {
            throw UsageError("not a rational: " + s);
        }
        if (pts.back() < 0 || pts.back() > 1) throw UsageError("orbit points must lie in [0,1]");
    }
    auto m = obtain_map(cfg);
    auto rep = verify_orbit(m, pts, closed);
    emit(cfg, rep.to_json().dump(2) + "\n");
    return rep.passed ? kOk : kFailed;
}

int cmd_thread(const RunConfig& cfg, const std::string& pivot, int period, int prefix)
{
    if (period < 1 || prefix < 0) throw UsageError("--period must be positive and --prefix non-negative");
    Rational p;
    try {
        p = parse_rational(pivot);
    } catch (const Error&) {
        throw UsageError("not a rational: " + pivot);
    }
    auto m = obtain_map(cfg);
    Thread th = make_thread(m, p, make_cycle(m, period), static_cast<std::size_t>(prefix));
    Json j = th.to_json();
    j["tail_index"] = *tail_index(m, th);
    emit(cfg, j.dump(2) + "\n");
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact Cantor-family, set-valued map and inverse-limit toolkit"};
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_option("--level", cfg.level, "dyadic level of the family")->check(CLI::NonNegativeNumber);
    app.add_option("--stage", cfg.stage, "stage depth and removal budget")->check(CLI::NonNegativeNumber);
    app.add_option("--mode", cfg.mode, "base map")->check(CLI::IsMember({"zero", "tent"}));
    app.add_option("--cache-dir", cfg.cacheDir, "family cache directory (fallback: GILLAB_CACHE)");
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json", "svg", "text"}));
    app.add_option("--seed", cfg.seed, "seed for sampled checks");
    app.add_option("--max-period", cfg.maxPeriod, "largest cycle period to verify")->check(CLI::PositiveNumber);
    app.add_option("--threads-file", cfg.threadsFile, "JSON array of threads");
    app.add_option("-o,--output", cfg.output, "write to a file instead of stdout");

    auto* family = app.add_subcommand("family", "build or inspect the cached family");
    family->fallthrough();
    std::string family_action;
    family->add_option("action", family_action)->required()->check(CLI::IsMember({"build", "inspect"}));

    auto* eval = app.add_subcommand("eval", "bracket F(t)");
    eval->fallthrough();
    std::string eval_t;
    eval->add_option("t", eval_t, "rational point in [0,1]")->required();

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->fallthrough();
    std::string suite;
    verify->add_option("suite", suite, "suite name or 'all'")->required();

    auto* exp = app.add_subcommand("export", "write a cover, arc or Cantor stage");
    exp->fallthrough();
    std::string what;
    ExportOptions opt;
    exp->add_option("what", what)->required()->check(CLI::IsMember({"graph", "mahavier", "arc", "cantor"}));
    exp->add_option("--pixels", opt.pixels, "SVG size in pixels")->check(CLI::PositiveNumber);
    exp->add_option("--n", opt.n, "last coordinate of the product");
    exp->add_option("--index", opt.index, "family member for cantor exports");
    exp->add_option("--thread", opt.thread, "thread number for arc exports");
    exp->add_option("--arc", opt.arc, "arc index n (default: the first arc)");
    exp->add_option("--coords", opt.coords, "two coordinate indices")->expected(2);
    exp->add_option("--samples", opt.samples, "uniform parameter samples along the arc")->check(CLI::PositiveNumber);

    auto* cycle = app.add_subcommand("cycle", "construct and certify a cycle");
    cycle->fallthrough();
    int period = 1;
    cycle->add_option("n", period, "period")->required();

    auto* orbit = app.add_subcommand("orbit", "certify a finite orbit");
    orbit->fallthrough();
    std::vector<std::string> orbit_pts;
    bool closed = false;
    orbit->add_option("points", orbit_pts)->required();
    orbit->add_flag("--closed", closed, "also certify the step back to the first point");

    auto* thread = app.add_subcommand("thread", "construct a thread of the inverse limit");
    thread->fallthrough();
    std::string pivot = "0";
    int tail_period = 2, prefix = 0;
    thread->add_option("--pivot", pivot, "coordinate just before the tail");
    thread->add_option("--period", tail_period, "tail cycle length");
    thread->add_option("--prefix", prefix, "number of coordinates before the tail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*family) return family_action == "build" ? cmd_family_build(cfg) : cmd_family_inspect(cfg);
        if (*eval) return cmd_eval(cfg, eval_t);
        if (*verify) return cmd_verify(cfg, suite);
        if (*exp) return cmd_export(cfg, what, opt);
        if (*cycle) return cmd_cycle(cfg, period);
        if (*orbit) return cmd_orbit(cfg, orbit_pts, closed);
        if (*thread) return cmd_thread(cfg, pivot, tail_period, prefix);
    } catch (const CacheNotBuilt& e) {
        std::cerr << "error: not built: " << e.what() << '\n';
        return kCache;
    } catch (const CacheError& e) {
        std::cerr << "error: corrupt cache: " << e.what() << '\n';
        return kCache;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailed;
    }
    return kUsage;
}
