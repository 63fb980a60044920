// theta_strata: command-line front end.
// Exit codes: 0 success, 1 domain error (bad curve, refused budget, failed
// self-check), 2 usage error.

#include <theta_strata/curve_json.hpp>
#include <theta_strata/graph_curve.hpp>
#include <theta_strata/multidegree.hpp>
#include <theta_strata/selfcheck.hpp>
#include <theta_strata/strata.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace theta_strata;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::int64_t> parse_ints(const std::string& text, const std::string& what) {
    std::vector<std::int64_t> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw UsageError(what + ": '" + item + "' is not an integer");
        out.push_back(v);
    }
    return out;
}

Multidegree parse_degree(const std::string& text, const DualGraph& g, const std::string& what) {
    auto v = parse_ints(text, what);
    if (static_cast<int>(v.size()) != g.num_vertices())
        throw UsageError(what + ": expected " + std::to_string(g.num_vertices()) + " entries, got " + std::to_string(v.size()));
    std::vector<int> d;
    for (auto x : v) d.push_back(static_cast<int>(x));
    return Multidegree(std::move(d));
}

EdgeSet parse_edges(const std::string& text, const DualGraph& g, const std::string& what) {
    EdgeSet s;
    for (auto x : parse_ints(text, what)) {
        if (x < 0 || x >= g.num_edges()) throw UsageError(what + ": edge " + std::to_string(x) + " out of range");
        s.push_back(static_cast<EdgeId>(x));
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

// "v:x" items; x an integer or "inf".
std::vector<std::pair<VertexId, IntegerPoint>> parse_points(const std::string& text) {
    std::vector<std::pair<VertexId, IntegerPoint>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw UsageError("--points: '" + item + "' is not of the form vertex:point");
        auto v = parse_ints(item.substr(0, colon), "--points vertex");
        std::string x = item.substr(colon + 1);
        IntegerPoint q;
        if (x != "inf") q = parse_ints(x, "--points coordinate").at(0);
        out.push_back({static_cast<VertexId>(v.at(0)), q});
    }
    return out;
}

std::string edges_string(const EdgeSet& s) {
    if (s.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out;
}

struct Context {
    std::string curve_file;
    std::string format = "table";
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> prime;

    Format fmt() const { return format == "json" ? Format::Json : format == "dot" ? Format::Dot : Format::Table; }

    CurveSpec spec() const {
        if (curve_file.empty()) throw UsageError("--curve is required");
        return load_curve_spec(curve_file);
    }

    Json inputs(const CurveSpec& spec) const {
        Json j{{"curve", to_json(spec)}};
        if (prime) j["prime"] = *prime;
        if (threads) j["threads"] = threads;
        return j;
    }
};

// Prints the report (json) or the table body, returns the exit code.
int emit(const Context& ctx, const std::string& command, const Json& inputs, const Json& result, const std::string& table) {
    if (ctx.fmt() == Format::Json)
        std::cout << make_report(command, inputs, result, Format::Json, ctx.seed).dump(2) << "\n";
    else
        std::cout << table;
    return 0;
}

void require_format(const Context& ctx, const std::string& command, bool dot_allowed = false) {
    if (ctx.fmt() == Format::Dot && !dot_allowed) throw UsageError("--format dot is only available for strata, not " + command);
}

int cmd_genus(const Context& ctx) {
    require_format(ctx, "genus");
    auto spec = ctx.spec();
    const auto& g = spec.graph;
    auto br = bridges(g);
    auto comps = connected_components(g);
    Json result{{"genus", arithmetic_genus(g)}, {"vertices", g.num_vertices()}, {"edges", g.num_edges()},
                {"components", comps.count}, {"bridges", br}, {"blocks", blocks(g)}};
    std::ostringstream os;
    os << "genus " << arithmetic_genus(g) << "\nvertices " << g.num_vertices() << "\nedges " << g.num_edges()
       << "\ncomponents " << comps.count << "\nbridges " << edges_string(br) << "\n";
    return emit(ctx, "genus", ctx.inputs(spec), result, os.str());
}

int cmd_multidegrees(const Context& ctx, bool stable) {
    require_format(ctx, "multidegrees");
    auto spec = ctx.spec();
    auto list = stable ? enumerate_stable(spec.graph) : enumerate_semistable(spec.graph);
    Json rows = Json::array();
    std::ostringstream os;
    for (const auto& d : list) {
        rows.push_back(to_json(d));
        os << d.to_string() << "\n";
    }
    Json inputs = ctx.inputs(spec);
    inputs["kind"] = stable ? "stable" : "semistable";
    return emit(ctx, "multidegrees", inputs, Json{{"kind", stable ? "stable" : "semistable"}, {"count", list.size()}, {"multidegrees", rows}},
                os.str());
}

int cmd_orient(const Context& ctx, const std::string& degree) {
    require_format(ctx, "orient");
    auto spec = ctx.spec();
    const auto& g = spec.graph;
    std::optional<Orientation> o;
    Json inputs = ctx.inputs(spec);
    if (degree.empty()) {
        o = find_stable_orientation(g);
    } else {
        auto d = parse_degree(degree, g, "--degree");
        inputs["degree"] = to_json(d);
        o = find_realizing_orientation(g, d);
    }
    Json result{{"found", o.has_value()}};
    std::ostringstream os;
    if (o) {
        result["orientation"] = to_json(*o, g);
        result["degree"] = to_json(multidegree_of_orientation(g, *o));
        result["strongly_connected"] = is_stable_orientation(g, *o);
        os << "degree " << multidegree_of_orientation(g, *o).to_string() << "\n";
        os << "strongly_connected " << (is_stable_orientation(g, *o) ? "yes" : "no") << "\n";
        for (EdgeId e = 0; e < g.num_edges(); ++e)
            os << "edge " << e << ": " << g.endpoint(o->start_of(e)) << " -> " << g.endpoint(o->end_of(e)) << "\n";
    } else {
        os << "none\n";
    }
    return emit(ctx, "orient", inputs, result, os.str());
}

int cmd_stabilize(const Context& ctx, const std::string& degree) {
    require_format(ctx, "stabilize");
    auto spec = ctx.spec();
    const auto& g = spec.graph;
    if (degree.empty()) throw UsageError("--degree is required");
    auto d = parse_degree(degree, g, "--degree");
    auto st = stabilize(g, d);
    Json ending = Json::array();
    for (auto [e, h] : st.ending_halves) ending.push_back(Json{{"edge", e}, {"vertex", g.endpoint(h)}, {"side", static_cast<int>(h.side)}});
    Json result{{"destabilizing_nodes", st.destabilizing_set},
                {"stable_degree", to_json(st.stable_degree)},
                {"remaining_edges", st.normalized.original_edge},
                {"ending_halves", ending},
                {"witness_independent", st.witness_independent},
                {"independence_checked", st.independence_checked},
                {"realizing_orientations", st.realizing_orientations}};
    Json inputs = ctx.inputs(spec);
    inputs["degree"] = to_json(d);
    std::ostringstream os;
    os << "destabilizing_nodes " << edges_string(st.destabilizing_set) << "\nstable_degree " << st.stable_degree.to_string()
       << "\nwitness_independent " << (st.witness_independent ? "yes" : "no") << "\n";
    return emit(ctx, "stabilize", inputs, result, os.str());
}

int cmd_strata(const Context& ctx, bool theta) {
    require_format(ctx, "strata", true);
    auto spec = ctx.spec();
    const auto& g = spec.graph;
    std::vector<Stratum> strata;
    Json result{{"kind", theta ? "theta" : "picard"}};
    if (theta) {
        auto t = enumerate_theta_strata(g);
        strata = t.strata;
        result["summary"] = to_json(t.summary);
    } else {
        strata = enumerate_picard_strata(g);
    }
    if (ctx.fmt() == Format::Dot) {
        std::cout << strata_to_dot(g, strata);
        return 0;
    }
    Json rows = Json::array();
    std::ostringstream os;
    for (const auto& s : strata) {
        rows.push_back(to_json(s));
        os << s.label() << "\n";
    }
    result["strata"] = rows;
    result["count"] = strata.size();
    Json inputs = ctx.inputs(spec);
    inputs["theta"] = theta;
    return emit(ctx, "strata", inputs, result, os.str());
}

int cmd_irreducible(const Context& ctx, bool picard, bool theta) {
    require_format(ctx, "irreducible");
    auto spec = ctx.spec();
    if (!picard && !theta) picard = theta = true;
    Json result = Json::object();
    std::ostringstream os;
    auto line = [&](const char* name, const IrreducibilityReport& r) {
        os << name << " by_valency " << (r.by_valency ? "yes" : "no") << " by_count " << (r.by_count ? "yes" : "no")
           << " by_blocks " << (r.by_blocks ? "yes" : "no") << "\n";
    };
    if (picard) {
        auto r = picard_irreducibility(spec.graph);
        result["picard"] = to_json(r);
        line("picard", r);
    }
    if (theta) {
        auto r = theta_irreducibility(spec.graph);
        result["theta"] = to_json(r);
        line("theta", r);
    }
    return emit(ctx, "irreducible", ctx.inputs(spec), result, os.str());
}

int cmd_h0(const Context& ctx, const std::string& degrees, const std::string& gluing, const std::string& normalize, bool show_sections) {
    require_format(ctx, "h0");
    auto spec = ctx.spec();
    auto curve = curve_at(spec, ctx.prime);
    const auto& g = curve.graph();
    if (degrees.empty()) throw UsageError("--degrees is required");
    auto d = parse_degree(degrees, g, "--degrees");
    std::vector<Elem> c(static_cast<std::size_t>(g.num_edges()), 1);
    if (!gluing.empty()) {
        auto v = parse_ints(gluing, "--gluing");
        if (static_cast<int>(v.size()) != g.num_edges())
            throw UsageError("--gluing: expected " + std::to_string(g.num_edges()) + " entries, got " + std::to_string(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) c[i] = curve.field().reduce(v[i]);
    }
    GluedLineBundle l{d, c};
    H0Options opts;
    opts.unglued = parse_edges(normalize, g, "--normalize");
    auto sec = sections(curve, l, opts);
    int top = 0;
    for (int x : d.degrees()) top += std::max(x + 1, 0);
    Json result{{"h0", sec.dim()}, {"prime", curve.p()}, {"normalization_h0", top}};
    if (show_sections) result["sections"] = sec.basis;
    Json inputs = ctx.inputs(spec);
    inputs["degrees"] = to_json(d);
    inputs["gluing"] = c;
    inputs["normalize"] = opts.unglued;
    std::ostringstream os;
    os << sec.dim() << "\n";
    return emit(ctx, "h0", inputs, result, os.str());
}

int cmd_wcount(const Context& ctx, const std::string& degrees, int r, const std::string& primes, std::uint64_t samples) {
    require_format(ctx, "wcount");
    auto spec = ctx.spec();
    if (degrees.empty()) throw UsageError("--degrees is required");
    auto d = parse_degree(degrees, spec.graph, "--degrees");
    std::vector<std::uint32_t> ps;
    if (primes.empty()) {
        if (!spec.field_prime) throw UsageError("--primes is required when the curve has no field_prime");
        ps.push_back(*spec.field_prime);
    }
    for (auto p : parse_ints(primes, "--primes")) {
        if (p < 2 || p >= (1LL << 31)) throw UsageError("--primes: " + std::to_string(p) + " out of range");
        ps.push_back(static_cast<std::uint32_t>(p));
    }
    WCountOptions opts;
    opts.threads = ctx.threads;
    if (samples) {
        if (!ctx.seed) throw UsageError("sampling needs --seed");
        opts.sample = true;
        opts.samples = samples;
        opts.seed = *ctx.seed;
    }
    auto probe = dimension_probe([&](std::uint32_t p) { return curve_at(spec, p); }, d, r, ps, opts);
    Json runs = Json::array();
    std::ostringstream os;
    for (const auto& run : probe.runs) {
        runs.push_back(to_json(run));
        os << "p=" << run.prime << " count " << run.count << " of " << run.sample_size;
        if (run.exponent_estimate) os << " log_p " << *run.exponent_estimate;
        os << "\n";
    }
    if (probe.fit.empty)
        os << "fit empty\n";
    else
        os << "fit slope " << probe.fit.slope << " residual " << probe.fit.residual << "\n";
    Json inputs = ctx.inputs(spec);
    inputs["degrees"] = to_json(d);
    inputs["r"] = r;
    inputs["primes"] = ps;
    inputs["samples"] = samples;
    return emit(ctx, "wcount", inputs, Json{{"runs", runs}, {"fit", to_json(probe.fit)}}, os.str());
}

int cmd_abel(const Context& ctx, const std::string& points) {
    require_format(ctx, "abel");
    auto spec = ctx.spec();
    auto curve = curve_at(spec, ctx.prime);
    std::vector<SmoothPoint> pts;
    Json echo = Json::array();
    for (auto [v, q] : parse_points(points)) {
        if (v < 0 || v >= curve.graph().num_vertices()) throw UsageError("--points: vertex " + std::to_string(v) + " out of range");
        pts.push_back({v, reduce_point(curve.field(), q)});
        echo.push_back(Json{{"vertex", v}, {"point", q ? Json(*q) : Json("inf")}});
    }
    auto l = abel_image(curve, pts);
    EdgeSet all;
    for (EdgeId e = 0; e < curve.graph().num_edges(); ++e) all.push_back(e);
    auto fv = forced_vanishing_nodes(curve, l, all);
    int h = h0(curve, l);
    Json result{{"bundle", to_json(l)}, {"h0", h}, {"forced_vanishing", fv.nodes}, {"semistable", is_semistable(curve.graph(), l.degrees)}};
    Json inputs = ctx.inputs(spec);
    inputs["points"] = echo;
    std::ostringstream os;
    os << "degrees " << l.degrees.to_string() << "\ngluing";
    for (Elem c : l.gluing) os << " " << c;
    os << "\nh0 " << h << "\nforced_vanishing " << edges_string(fv.nodes) << "\n";
    return emit(ctx, "abel", inputs, result, os.str());
}

int cmd_hyperelliptic(const Context& ctx) {
    require_format(ctx, "hyperelliptic");
    auto spec = ctx.spec();
    auto curve = curve_at(spec, ctx.prime);
    int rk = node_pencil_rank(curve);
    Json result{{"hyperelliptic", rk <= 2}, {"pencil_rank", rk}, {"genus", arithmetic_genus(curve.graph())}, {"prime", curve.p()}};
    std::ostringstream os;
    os << (rk <= 2 ? "hyperelliptic" : "not hyperelliptic") << " (pencil rank " << rk << ")\n";
    return emit(ctx, "hyperelliptic", ctx.inputs(spec), result, os.str());
}

int cmd_selfcheck(const Context& ctx) {
    require_format(ctx, "selfcheck");
    if (!ctx.seed) throw UsageError("selfcheck needs --seed");
    auto results = run_selfcheck(*ctx.seed);
    bool ok = true;
    Json rows = Json::array();
    std::ostringstream os;
    for (const auto& r : results) {
        ok = ok && r.passed;
        rows.push_back(Json{{"name", r.name}, {"passed", r.passed}, {"cases", r.cases}, {"detail", r.detail}});
        os << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases)";
        if (!r.passed) os << ": " << r.detail;
        os << "\n";
    }
    emit(ctx, "selfcheck", Json::object(), Json{{"passed", ok}, {"checks", rows}}, os.str());
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability, strata and theta divisors of nodal curves"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    Context ctx;
    app.add_option("-c,--curve", ctx.curve_file, "curve description (JSON)");
    app.add_option("-f,--format", ctx.format, "output format")->check(CLI::IsMember({"table", "json", "dot"}));
    app.add_option("--threads", ctx.threads, "worker cap for counting");
    app.add_option("--seed", ctx.seed, "seed for randomized commands");
    app.add_option("-p,--prime", ctx.prime, "field characteristic (overrides field_prime)");

    auto* genus = app.add_subcommand("genus", "arithmetic genus, components, bridges");

    auto* multi = app.add_subcommand("multidegrees", "semistable or stable multidegrees");
    bool want_stable = false, want_semistable = false;
    multi->add_flag("--stable", want_stable);
    multi->add_flag("--semistable", want_semistable);

    auto* orient = app.add_subcommand("orient", "stable orientation, or one realizing --degree");
    std::string orient_degree;
    orient->add_option("--degree", orient_degree, "comma-separated multidegree");

    auto* stab = app.add_subcommand("stabilize", "destabilizing nodes and the stable multidegree");
    std::string stab_degree;
    stab->add_option("--degree", stab_degree, "comma-separated multidegree")->required();

    auto* strata = app.add_subcommand("strata", "strata of the compactified Picard variety or theta divisor");
    bool theta = false;
    strata->add_flag("--theta", theta);

    auto* irr = app.add_subcommand("irreducible", "irreducibility of the Picard variety and theta divisor");
    bool irr_picard = false, irr_theta = false;
    irr->add_flag("--picard", irr_picard);
    irr->add_flag("--theta", irr_theta);

    auto* h0c = app.add_subcommand("h0", "sections of a glued line bundle");
    std::string h0_degrees, h0_gluing, h0_normalize;
    bool h0_sections = false;
    h0c->add_option("--degrees", h0_degrees, "comma-separated multidegree")->required();
    h0c->add_option("--gluing", h0_gluing, "comma-separated gluing scalars (default all 1)");
    h0c->add_option("--normalize", h0_normalize, "comma-separated nodes left unglued");
    h0c->add_flag("--sections", h0_sections, "include a basis of sections");

    auto* wc = app.add_subcommand("wcount", "count gluings with h0 >= r + 1");
    std::string wc_degrees, wc_primes;
    int wc_r = 0;
    std::uint64_t wc_samples = 0;
    wc->add_option("--degrees", wc_degrees, "comma-separated multidegree")->required();
    wc->add_option("--r", wc_r, "rank r")->check(CLI::NonNegativeNumber);
    wc->add_option("--primes", wc_primes, "comma-separated primes");
    wc->add_option("--sample", wc_samples, "random gluings instead of an exhaustive scan");

    auto* abel = app.add_subcommand("abel", "line bundle of a divisor of smooth points");
    std::string abel_points;
    abel->add_option("--points", abel_points, "vertex:point items, point an integer or inf")->required();

    auto* hyp = app.add_subcommand("hyperelliptic", "pencil test for an irreducible rational curve");

    auto* self = app.add_subcommand("selfcheck", "run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (genus->parsed()) return cmd_genus(ctx);
        if (multi->parsed()) {
            if (want_stable && want_semistable) throw UsageError("--stable and --semistable are exclusive");
            return cmd_multidegrees(ctx, want_stable);
        }
        if (orient->parsed()) return cmd_orient(ctx, orient_degree);
        if (stab->parsed()) return cmd_stabilize(ctx, stab_degree);
        if (strata->parsed()) return cmd_strata(ctx, theta);
        if (irr->parsed()) return cmd_irreducible(ctx, irr_picard, irr_theta);
        if (h0c->parsed()) return cmd_h0(ctx, h0_degrees, h0_gluing, h0_normalize, h0_sections);
        if (wc->parsed()) return cmd_wcount(ctx, wc_degrees, wc_r, wc_primes, wc_samples);
        if (abel->parsed()) return cmd_abel(ctx, abel_points);
        if (hyp->parsed()) return cmd_hyperelliptic(ctx);
        if (self->parsed()) return cmd_selfcheck(ctx);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
