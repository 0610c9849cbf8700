#include <hcdg/model_io.hpp>
#include <hcdg/suites.hpp>
#include <hcdg/text.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

using namespace hcdg;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kPass = 0, kFail = 1, kError = 2 };

struct Options {
    std::string model = "m1", conn, side = "f1", weights;
    uint64_t seed = 7;
    int poly_deg = 2, order = 3, arity = 3, samples = 32;
    bool as_json = false;
};

// bare names resolve against $HCDG_MODELS, then the shipped directory
std::string resolve_model(const std::string& m) {
    if (std::filesystem::exists(m)) return m;
    std::string dir = HCDG_MODEL_DIR;
    if (const char* env = std::getenv("HCDG_MODELS")) dir = env;
    std::string p = dir + "/" + m;
    if (std::filesystem::exists(p)) return p;
    return p + ".model";
}

WeightVec parse_vec(const std::string& s, int size) {
    WeightVec v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stoi(item));
    if (v.size() == 1 && size > 1) v.assign(size, v[0]);
    if (int(v.size()) != size)
        throw std::invalid_argument("weight vector '" + s + "' needs " + std::to_string(size) + " entries");
    return v;
}

// "a..b" with a, b integers or comma lists; one integer means the same bound everywhere
std::pair<WeightVec, WeightVec> parse_window(const std::string& s, int size) {
    auto dots = s.find("..");
    if (dots == std::string::npos) throw std::invalid_argument("weights must look like a..b, got '" + s + "'");
    return {parse_vec(s.substr(0, dots), size), parse_vec(s.substr(dots + 2), size)};
}

const ConnectionData& pick_connection(const ChartModel& m, const std::string& name, ConnectionData& scratch) {
    if (name.empty()) return m.connections.front();
    if (name.rfind("random:", 0) == 0) {
        scratch = random_connection(m, std::stoull(name.substr(7)), 2);
        return scratch;
    }
    return m.connection(name);
}

void emit(const json& j, bool as_json, const std::string& text) {
    if (as_json) std::cout << j.dump(2) << "\n";
    else std::cout << text;
}

// validate -----------------------------------------------------------------------

int cmd_validate(const std::string& path, const Options& o) {
    ChartModel m = load_model(resolve_model(path));
    const Names& nm = m.names;
    json j;
    j["model"] = m.name;
    j["coords"] = nm.coords;
    j["rank"] = m.r();
    j["perfect"] = m.perfect;
    j["complex"] = m.complex;
    json table = json::object();
    std::string text = "model " + m.name + ": n=" + std::to_string(m.n()) + " r=" + std::to_string(m.r()) + "\n";
    for (int a = 0; a < m.r(); ++a)
        for (int b = a + 1; b < m.r(); ++b)
            for (int c = 0; c < m.r(); ++c) {
                const MultiPoly& p = m.structure(a, b, c);
                if (p.is_zero()) continue;
                std::string key = "c" + std::to_string(c + 1) + "_" + std::to_string(a + 1) + std::to_string(b + 1);
                table[key] = to_string(p, nm);
                text += "  " + key + " = " + to_string(p, nm) + "\n";
            }
    if (table.empty()) text += "  all structure functions vanish\n";
    j["structure_functions"] = table;
    json conns = json::array();
    for (auto& cd : m.connections) conns.push_back(cd.name);
    j["connections"] = conns;
    json ws = json::array();
    for (auto& [wn, tw] : m.weights) ws.push_back(wn);
    j["weights"] = ws;
    j["pass"] = true;
    emit(j, o.as_json, text);
    return kPass;
}

// apply ----------------------------------------------------------------------------

int cmd_apply(const std::string& map, const std::vector<std::string>& elems, const Options& o) {
    ChartModel m = load_model(resolve_model(o.model));
    ConnectionData scratch;
    Stack s(m, pick_connection(m, o.conn, scratch));
    const Names& nm = m.names;
    const Transfer& tf = *s.t;
    const Hochschild& hh = *s.h;
    bool b_side = o.side == "b" || o.side == "B";
    auto need = [&](size_t k) {
        if (elems.size() != k)
            throw std::invalid_argument("map '" + map + "' takes " + std::to_string(k) + " element(s)");
    };
    auto pa = [&](size_t i) { return parse_polyop(elems[i], nm); };
    auto pb = [&](size_t i) { return parse_polyop_b(elems[i], tf.transversal()); };
    std::string out;
    if (map == "dF") {
        need(1);
        out = to_string(apply(tf.dF(), parse_form(elems[0], nm), nm), nm);
    } else if (map == "dFU") {
        need(1);
        out = tf.show(tf.dB(parse_omb(elems[0], tf.transversal())));
    } else if (map == "pbw") {
        need(1);
        out = tf.show(tf.pbw().pbw(parse_sym(elems[0], nm)));
    } else if (map == "pbw-inv") {
        need(1);
        out = to_string(tf.pbw().pbw_inv(parse_dop(elems[0], nm)), nm);
    } else if (map == "pbw-bar") {
        need(1);
        out = tf.show(tf.pbw().pbw_bar(parse_symb(elems[0], nm)));
    } else if (map == "phi-nat") {
        need(1);
        out = tf.show(tf.phi_nat(parse_dop(elems[0], nm)));
    } else if (map == "psi-nat") {
        need(1);
        out = tf.show(tf.psi_nat(parse_omb(elems[0], tf.transversal())));
    } else if (map == "reduce") {
        need(1);
        out = tf.show(tf.transversal().reduce(pushforward(parse_dop(elems[0], nm))));
    } else if (map == "hkr") {
        need(1);
        out = b_side ? to_string(hh.hkr(parse_polyvec_b(elems[0], nm)), nm) : to_string(hh.hkr(parse_polyvec(elems[0], nm)), nm);
    } else if (map == "duflo") {
        need(1);
        Atiyah at(tf);
        out = to_string(duflo_chain(hh, at.todd_half_pair(), parse_polyvec_b(elems[0], nm)), nm);
    } else if (map == "dH") {
        need(1);
        out = b_side ? to_string(hh.dH(pb(0)), nm) : to_string(hh.dH(pa(0)), nm);
    } else if (map == "cup") {
        need(2);
        out = b_side ? to_string(cup(pb(0), pb(1)), nm) : to_string(cup(pa(0), pa(1)), nm);
    } else if (map == "bracket") {
        need(2);
        out = b_side ? to_string(hh.bracket(pb(0), pb(1)), nm) : to_string(hh.bracket(pa(0), pa(1)), nm);
    } else if (map == "star") {
        need(2);
        out = b_side ? to_string(hh.star_b(pb(0), pb(1)), nm) : to_string(hh.star_f1(pa(0), pa(1)), nm);
    } else {
        throw std::invalid_argument("unknown map '" + map + "'");
    }
    json j;
    j["map"] = map;
    j["model"] = m.name;
    j["connection"] = s.name();
    j["input"] = elems;
    j["output"] = out;
    emit(j, o.as_json, out + "\n");
    return kPass;
}

// verify ----------------------------------------------------------------------------

int cmd_verify(const std::string& suite, const Options& o) {
    SuiteConfig cfg;
    cfg.model_path = o.model;
    cfg.suite = suite;
    cfg.seed = o.seed;
    cfg.poly_deg = o.poly_deg;
    cfg.order = o.order;
    cfg.arity = o.arity;
    cfg.samples = o.samples;
    cfg.weights_text = o.weights;
    ChartModel m = load_model(resolve_model(o.model));
    if (!o.weights.empty()) std::tie(cfg.w_lo, cfg.w_hi) = parse_window(o.weights, int(m.weights.size()));
    Report rep = run_suite(m, cfg);

    json j;
    j["command"] = "verify";
    j["suite"] = suite;
    j["model"] = o.model;
    j["model_name"] = m.name;
    j["seed"] = o.seed;
    j["windows"] = {{"poly_deg", o.poly_deg}, {"order", o.order}, {"arity", o.arity}, {"samples", o.samples},
                    {"weights", o.weights}};
    json checks = json::array();
    std::string text;
    long total = 0, failed_ids = 0;
    for (auto& [k, t] : rep.checks()) {
        auto& [su, conn, id] = k;
        bool ok = t.failed == 0;
        json c{{"suite", su}, {"connection", conn}, {"identity", id}, {"samples", t.samples},
               {"passed", t.samples - t.failed}, {"pass", ok}};
        if (!ok) c["first_failure"] = t.first_failure;
        checks.push_back(c);
        total += t.samples;
        failed_ids += !ok;
        text += std::string(ok ? "PASS " : "FAIL ") + su + " [" + conn + "] " + id + " " +
                std::to_string(t.samples - t.failed) + "/" + std::to_string(t.samples) +
                (ok ? "" : "  first failure: " + t.first_failure) + "\n";
    }
    j["checks"] = checks;
    json notes = json::array();
    for (auto& [k, v] : rep.notes()) {
        auto& [su, conn, id] = k;
        notes.push_back({{"suite", su}, {"connection", conn}, {"key", id}, {"value", v}});
        text += "NOTE " + su + " [" + conn + "] " + id + " " + v + "\n";
    }
    j["notes"] = notes;
    j["summary"] = {{"identities", rep.checks().size()}, {"samples", total}, {"failed_identities", failed_ids}};
    j["pass"] = rep.pass();
    text += std::string(rep.pass() ? "all checks pass" : "some checks FAILED") + " (" +
            std::to_string(rep.checks().size()) + " identities, " + std::to_string(total) + " samples)\n";
    emit(j, o.as_json, text);
    return rep.pass() ? kPass : kFail;
}

// cohomology ------------------------------------------------------------------------

template <class L>
json pieces_json(const std::vector<CohomologyPiece<L>>& ps, const Diff<L>& d, const Shower<L>& show, bool& ok,
                 std::string& text) {
    json arr = json::array();
    for (auto& p : ps) {
        json reps = json::array();
        for (auto& r : p.reps) {
            reps.push_back(show(r));
            ok &= d(r).is_zero();
        }
        ok &= p.h == p.dim - p.rank_out - p.rank_in;
        arr.push_back({{"degree", p.degree}, {"weight", p.weight}, {"dim", p.dim}, {"kernel", p.dim - p.rank_out},
                       {"image", p.rank_in}, {"h", p.h}, {"representatives", reps}});
        if (p.h)
            text += "weight " + to_string(p.weight) + " degree " + std::to_string(p.degree) + ": h=" + std::to_string(p.h) +
                    " (dim " + std::to_string(p.dim) + ")\n";
    }
    return arr;
}

int cmd_cohomology(const std::string& complex, const Options& o) {
    ChartModel m = load_model(resolve_model(o.model));
    ConnectionData scratch;
    Stack s(m, pick_connection(m, o.conn, scratch));
    WeightSystem ws(m);
    if (ws.empty()) throw spec_rejection("model " + m.name + " declares no weight grading");
    if (o.weights.empty()) throw std::invalid_argument("cohomology needs --weights a..b");
    auto [lo, hi] = parse_window(o.weights, ws.size());
    const Names& nm = m.names;
    const Transfer& tf = *s.t;
    const PolyTransfer& pt = *s.pt;
    bool ok = true;
    std::string text;
    json pieces = json::array();
    for (auto& w : weight_window(lo, hi)) {
        json arr;
        if (complex == "forms") {
            Diff<FormElement> d = [&](const FormElement& x) { return apply(tf.dF(), x, nm); };
            Shower<FormElement> sh = [&](const FormElement& x) { return to_string(x, nm); };
            arr = pieces_json(cohomology(form_pieces(ws, m.n(), m.r(), w), w, d, sh), d, sh, ok, text);
        } else if (complex == "ops") {
            Diff<DiffOpF1> d = [&](const DiffOpF1& x) { return tf.dA(x); };
            Shower<DiffOpF1> sh = [&](const DiffOpF1& x) { return tf.show(x); };
            arr = pieces_json(cohomology(op_pieces(ws, nm, w), w, d, sh), d, sh, ok, text);
        } else if (complex == "ops-b") {
            Diff<OmB> d = [&](const OmB& x) { return tf.dB(x); };
            Shower<OmB> sh = [&](const OmB& x) { return tf.show(x); };
            arr = pieces_json(cohomology(omb_pieces(ws, nm, w), w, d, sh), d, sh, ok, text);
        } else if (complex == "poly") {
            Diff<PolyOpF1> d = [&](const PolyOpF1& x) { return pt.total_F1(x); };
            Shower<PolyOpF1> sh = [&](const PolyOpF1& x) { return pt.show(x); };
            arr = pieces_json(cohomology(poly_pieces<PolyOpF1>(ws, nm, w, o.arity), w, d, sh), d, sh, ok, text);
        } else if (complex == "poly-b") {
            Diff<PolyOpB> d = [&](const PolyOpB& x) { return pt.total_B(x); };
            Shower<PolyOpB> sh = [&](const PolyOpB& x) { return pt.show(x); };
            arr = pieces_json(cohomology(poly_pieces<PolyOpB>(ws, nm, w, o.arity), w, d, sh), d, sh, ok, text);
        } else if (complex == "polyvec-b") {
            Diff<PolyVecB> d = [&](const PolyVecB& x) { return s.h->dBott(x); };
            Shower<PolyVecB> sh = [&](const PolyVecB& x) { return to_string(x, nm); };
            arr = pieces_json(cohomology(polyvec_b_pieces(ws, nm, w), w, d, sh), d, sh, ok, text);
        } else {
            throw std::invalid_argument("unknown complex '" + complex + "' (forms, ops, ops-b, poly, poly-b, polyvec-b)");
        }
        for (auto& p : arr) pieces.push_back(p);
    }
    json j;
    j["command"] = "cohomology";
    j["complex"] = complex;
    j["model"] = o.model;
    j["connection"] = s.name();
    j["weight_names"] = ws.names();
    j["windows"] = {{"weights", o.weights}, {"arity", o.arity}};
    j["pieces"] = pieces;
    j["pass"] = ok;
    if (text.empty()) text = "all pieces acyclic\n";
    emit(j, o.as_json, text);
    return ok ? kPass : kFail;
}

// compare-todd ----------------------------------------------------------------------

int cmd_compare_todd(const std::string& ca, const std::string& cb, const Options& o) {
    ChartModel m = load_model(resolve_model(o.model));
    ConnectionData s1, s2;
    Stack a(m, pick_connection(m, ca, s1)), b(m, pick_connection(m, cb, s2));
    Atiyah aa(*a.t), ab(*b.t);
    ToddComparison c = compare_todd(aa, ab);
    json items = json::array();
    std::string text;
    for (auto& it : c.items) {
        const auto& show = [&](const FormElement& w) {
            return it.side == "dg" ? aa.forms().show(w) : aa.pair_forms().show(w);
        };
        bool ok = it.closed && it.found;
        items.push_back({{"side", it.side}, {"cocycle", it.cocycle}, {"closed", it.closed}, {"found", it.found},
                         {"window", it.window}, {"delta", show(it.delta)}, {"primitive", show(it.primitive)},
                         {"unknowns", it.unknowns}, {"equations", it.equations}, {"rank", it.rank}});
        text += std::string(ok ? "PASS " : "FAIL ") + it.side + " " + it.cocycle + " window " + std::to_string(it.window) +
                "  delta = " + show(it.delta) + "  primitive = " + show(it.primitive) + "\n";
    }
    json j;
    j["command"] = "compare-todd";
    j["model"] = o.model;
    j["connections"] = {c.conn_a, c.conn_b};
    j["max_window"] = c.max_window;
    j["items"] = items;
    j["pass"] = c.pass();
    emit(j, o.as_json, text);
    return c.pass() ? kPass : kFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hcdg: Hochschild cohomology of foliation dg manifolds in a polynomial chart"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* c) {
        c->add_option("--model", o.model, "model file or name (resolved against $HCDG_MODELS)");
        c->add_option("--conn", o.conn, "connection name, or random:SEED");
        c->add_flag("--json", o.as_json, "machine-readable output");
    };
    std::string path, map, suite, complex, conn_a, conn_b, elem1, elem2;

    auto* validate = app.add_subcommand("validate", "check a model and print its structure functions");
    validate->add_option("model", path)->required();
    validate->add_flag("--json", o.as_json);

    auto* ap = app.add_subcommand("apply", "apply a map to elements written in the text grammar");
    ap->add_option("map", map)->required();
    ap->add_option("element", elem1)->required();
    ap->add_option("second", elem2, "second element for cup, bracket and star");
    ap->add_option("--side", o.side, "polydifferential side: f1 or b");
    common(ap);

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite)->required();
    common(verify);
    verify->add_option("--seed", o.seed);
    verify->add_option("--poly-deg", o.poly_deg);
    verify->add_option("--order", o.order);
    verify->add_option("--arity", o.arity);
    verify->add_option("--samples", o.samples);
    verify->add_option("--weights", o.weights, "weight window a..b");

    auto* coh = app.add_subcommand("cohomology", "truncated cohomology per weight");
    coh->add_option("complex", complex)->required();
    common(coh);
    coh->add_option("--weights", o.weights, "weight window a..b")->required();
    coh->add_option("--arity", o.arity);

    auto* ct = app.add_subcommand("compare-todd", "primitives for Atiyah/Todd cocycle differences");
    ct->add_option("connA", conn_a)->required();
    ct->add_option("connB", conn_b)->required();
    ct->add_option("--model", o.model);
    ct->add_flag("--json", o.as_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kPass : kError;
    }
    try {
        if (*validate) return cmd_validate(path, o);
        if (*ap) {
            std::vector<std::string> elems{elem1};
            if (!elem2.empty()) elems.push_back(elem2);
            return cmd_apply(map, elems, o);
        }
        if (*verify) return cmd_verify(suite, o);
        if (*coh) return cmd_cohomology(complex, o);
        if (*ct) return cmd_compare_todd(conn_a, conn_b, o);
    } catch (const std::exception& e) {
        json j{{"pass", false}, {"error", e.what()}};
        if (o.as_json) std::cout << j.dump(2) << "\n";
        else std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
