#include "cmlab/cli.hpp"

#include "cmlab/curvedb.hpp"
#include "cmlab/ellipticunits.hpp"
#include "cmlab/error.hpp"
#include "cmlab/formalgroups.hpp"
#include "cmlab/heckel.hpp"
#include "cmlab/padics.hpp"
#include "cmlab/parallel.hpp"
#include "cmlab/periods.hpp"
#include "cmlab/selmerchow.hpp"
#include "cmlab/suite.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>

namespace cmlab {

using nlohmann::ordered_json;

size_t Config::series_for(long p) const {
    if (series_truncation > 0) return static_cast<size_t>(series_truncation);
    return static_cast<size_t>(std::max(p * p + 2, 64L));
}

namespace {

constexpr int kSchemaVersion = 1;

// Config keys shared by the config file, the environment and the report.
using Setter = std::function<void(Config&, const std::string&)>;

long to_long(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw Error(Errc::InvalidArgument, key + ": not an integer: " + v);
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw Error(Errc::InvalidArgument, key + ": not a number: " + v);
    }
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = {
        {"digits", [](Config& c, const std::string& v) { c.digits = static_cast<int>(to_long("digits", v)); }},
        {"padic_precision",
         [](Config& c, const std::string& v) { c.padic_precision = static_cast<int>(to_long("padic_precision", v)); }},
        {"series_truncation",
         [](Config& c, const std::string& v) { c.series_truncation = to_long("series_truncation", v); }},
        {"denominator_bound",
         [](Config& c, const std::string& v) {
             if (c.denominator_bound.set_str(v, 10) != 0) throw Error(Errc::InvalidArgument, "denominator_bound: " + v);
         }},
        {"tolerance_fraction",
         [](Config& c, const std::string& v) { c.tolerance_fraction = to_double("tolerance_fraction", v); }},
        {"truncation_norm_bound",
         [](Config& c, const std::string& v) { c.truncation_norm_bound = to_long("truncation_norm_bound", v); }},
        {"workers", [](Config& c, const std::string& v) { c.workers = static_cast<int>(to_long("workers", v)); }},
        {"db", [](Config& c, const std::string& v) { c.db_path = v; }},
    };
    return m;
}

bool is_usage_error(Errc c) {
    switch (c) {
        case Errc::InvalidArgument:
        case Errc::UnknownField:
        case Errc::NotPrime:
        case Errc::ZeroIdeal:
        case Errc::NotCM:
        case Errc::SingularModel:
        case Errc::ConductorMismatch:
        case Errc::ParseError:
        case Errc::DuplicateLabel:
        case Errc::UnknownCurve:
        case Errc::NotCoprimeToConductor:
        case Errc::RamifiedOrBadPrime:
        case Errc::BadReduction:
        case Errc::TruncationTooShort:
        case Errc::FitDegenerate:
        case Errc::PoleAtS:
            return true;
        default:
            return false;
    }
}

void validate(const Config& c) {
    if (c.digits < 30) throw Error(Errc::InvalidArgument, "digits must be at least 30");
    if (c.padic_precision < 2) throw Error(Errc::InvalidArgument, "padic_precision must be at least 2");
    if (c.workers < 1) throw Error(Errc::InvalidArgument, "workers must be positive");
    if (!(c.tolerance_fraction > 0 && c.tolerance_fraction <= 1))
        throw Error(Errc::InvalidArgument, "tolerance_fraction must be in (0, 1]");
    if (c.denominator_bound < 2) throw Error(Errc::InvalidArgument, "denominator_bound must be at least 2");
    if (c.truncation_norm_bound < 1) throw Error(Errc::InvalidArgument, "truncation_norm_bound must be positive");
}

ordered_json config_json(const Config& c) {
    // Worker count is left out: reports do not depend on it.
    return {{"digits", c.digits},
            {"padic_precision", c.padic_precision},
            {"series_truncation", c.series_truncation > 0 ? ordered_json(c.series_truncation) : ordered_json("auto")},
            {"denominator_bound", c.denominator_bound.get_str()},
            {"tolerance_fraction", c.tolerance_fraction},
            {"truncation_norm_bound", c.truncation_norm_bound},
            {"database", c.db_path.empty() ? CurveDB::default_path() : c.db_path}};
}

BigComplex parse_complex(const std::string& s) {
    // "re" or "re,im"
    auto real = [&](const std::string& t) {
        try {
            return Real(t);
        } catch (const std::exception&) {
            throw Error(Errc::InvalidArgument, "not a number: " + t);
        }
    };
    size_t comma = s.find(',');
    if (comma == std::string::npos) return BigComplex(real(s));
    return BigComplex(real(s.substr(0, comma)), real(s.substr(comma + 1)));
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char c : s) r += c == '"' ? std::string("\"\"") : std::string(1, c);
    return r + "\"";
}

std::string brackets_csv(const std::vector<BracketEntry>& bs) {
    std::string out = "name,reading,value,normalization,valuation,numeric\n";
    for (const auto& b : bs)
        out += csv_field(b.name) + "," + csv_field(b.reading) + "," +
               csv_field(b.recognized ? b.alg.str() : "unrecognized") + "," + csv_field(b.normalization) + "," +
               csv_field(b.have_valuation ? b.valuation.str() : "") + "," + csv_field(to_string(b.numeric, 25)) + "\n";
    return out;
}

struct Outcome {
    ordered_json result;
    bool pass = true;
    std::string csv;  // used instead of the JSON report under --csv when set
};

class Runner {
public:
    explicit Runner(Config c) : cfg(std::move(c)) {}

    Config cfg;

    const CurveDB& db() {
        if (!db_) db_ = std::make_unique<CurveDB>(CurveDB::load(cfg.db_path.empty() ? CurveDB::default_path() : cfg.db_path));
        return *db_;
    }
    const CMCurve& curve(const std::string& label) { return db().get(label); }
    bool within(double log10_residual) const { return log10_residual < cfg.tolerance_log10(); }
    bool within(const Real& residual) const { return within(log10_abs(residual)); }
    std::string num(const BigComplex& z) const { return to_string(z, cfg.digits); }
    std::string num(const Real& x) const { return to_string(x, cfg.digits); }

private:
    std::unique_ptr<CurveDB> db_;
};

double lg(double x) { return std::isfinite(x) ? std::round(x * 100) / 100 : -1000.0; }

ordered_json alg_json(const AlgebraicInK& a) {
    return {{"recognized", a.recognized},
            {"value", a.recognized ? ordered_json(a.str()) : ordered_json(nullptr)},
            {"residual_log10", lg(log10_abs(a.residual))}};
}

// ---------------------------------------------------------------- commands

Outcome cmd_classify(Runner& R, const std::string& label, long p) {
    const CMCurve& E = R.curve(label);
    Reduction red = classify_reduction(E, p);
    ordered_json r = {{"curve", label}, {"p", p}, {"reduction", reduction_name(red)}};
    SplitType st = split_type(E.field(), p);
    r["splitting"] = st.kind == SplitKind::Split ? "split" : st.kind == SplitKind::Inert ? "inert" : "ramified";
    if (red != Reduction::Bad && p > 3) r["a_p"] = count_points(E, p);
    return {r, true, ""};
}

Outcome cmd_psi(Runner& R, const std::string& label, const std::string& ideal, unsigned k) {
    const CMCurve& E = R.curve(label);
    QuadIdeal a(parse_quad_int(E.d, ideal));
    if (a.gen().is_zero()) throw Error(Errc::ZeroIdeal, "the zero ideal");
    if (!coprime(a, E.conductor_ideal()))
        throw Error(Errc::NotCoprimeToConductor, a.str() + " meets f = " + E.conductor_ideal().str());
    QuadInt v = E.psi().eval(a, k);
    return {{{"curve", label}, {"ideal", a.str()}, {"norm", a.norm().get_str()}, {"k", k}, {"psi", v.str()}}, true, ""};
}

Outcome cmd_periods(Runner& R, const std::string& label) {
    const CMCurve& E = R.curve(label);
    DigitsGuard g(R.cfg.digits + 10);
    PeriodLattice L = periods(E, R.cfg.digits);
    return {{{"curve", label},
             {"omega", R.num(L.omega)},
             {"omega_plus", R.num(L.omega_plus)},
             {"z", L.z.str()},
             {"z_prime_to_6sqrtd", L.z_prime_to_6sqrtd},
             {"w1", R.num(L.w1)},
             {"w2", R.num(L.w2)},
             {"tau", R.num(L.tau)},
             {"g2", R.num(L.g2)},
             {"g3", R.num(L.g3)},
             {"basis_residual_log10", lg(L.basis_residual)}},
            true,
            ""};
}

Outcome cmd_lvalue(Runner& R, const std::string& label, unsigned k, const std::string& s, bool conj, bool imprimitive,
                   const std::string& method) {
    const CMCurve& E = R.curve(label);
    LOptions opt;
    opt.primitive = !imprimitive;
    opt.max_terms = R.cfg.truncation_norm_bound;
    if (method == "auto") opt.method = LMethod::Auto;
    else if (method == "direct") opt.method = LMethod::DirectSum;
    else if (method == "approx") opt.method = LMethod::ApproxFE;
    else throw Error(Errc::InvalidArgument, "method must be auto, direct or approx");
    DigitsGuard g(R.cfg.digits + 10);
    LValue v = lvalue(E, k, conj, parse_complex(s), R.cfg.digits, opt);
    return {{{"curve", label},
             {"k", k},
             {"s", R.num(v.s)},
             {"conjugated", conj},
             {"primitive", v.primitive},
             {"method", method_name(v.method)},
             {"truncation", v.truncation},
             {"tail_log10", lg(v.tail_log10)},
             {"value", R.num(v.value)}},
            true,
            ""};
}

Outcome cmd_fe_check(Runner& R, const std::string& label, unsigned k, const std::string& s0) {
    const CMCurve& E = R.curve(label);
    DigitsGuard g(R.cfg.digits + 10);
    Real start = s0.empty() ? Real(k + 1) / 2 + Real("0.3") : parse_complex(s0).re;
    FECheck fe = verify_functional_equation(E, k, start, R.cfg.digits);
    bool pass = R.within(fe.residual_log10) && R.within(fe.W2_minus_1_log10);
    return {{{"curve", label},
             {"k", k},
             {"level", fe.level},
             {"points", {to_string(fe.s1, 10), to_string(fe.s2, 10), to_string(fe.s3, 10)}},
             {"W", R.num(fe.W)},
             {"W2_minus_1_log10", lg(fe.W2_minus_1_log10)},
             {"slope", to_string(fe.slope, 30)},
             {"offset", to_string(fe.offset, 30)},
             {"residual_log10", lg(fe.residual_log10)},
             {"fixed_form_log10", lg(fe.fixed_form_log10)},
             {"printed_form_log10", lg(fe.printed_form_log10)},
             {"tolerance_log10", lg(R.cfg.tolerance_log10())}},
            pass,
            ""};
}

Outcome cmd_damerell(Runner& R, const std::string& label, unsigned k, const std::string& variant) {
    const CMCurve& E = R.curve(label);
    DamerellVariant v = parse_variant(variant);
    DigitsGuard g(R.cfg.digits + 10);
    Bracket b = damerell_bracket(E, k, v, R.cfg.digits, R.cfg.denominator_bound);
    ordered_json r = {{"curve", label}, {"k", k}, {"variant", variant_name(v)}, {"numeric", R.num(b.numeric)}};
    r["recognition"] = alg_json(b.alg);
    r["zero"] = b.zero;
    std::string csv = "curve,k,variant,value,numeric\n" + label + "," + std::to_string(k) + "," + variant_name(v) +
                      "," + csv_field(b.alg.recognized ? b.alg.str() : "unrecognized") + "," +
                      csv_field(to_string(b.numeric, 25)) + "\n";
    return {r, b.alg.recognized, csv};
}

Outcome certificate_outcome(const Certificate& c) {
    return {ordered_json::parse(certificate_json(c)), c.verdict == Verdict::Certified, brackets_csv(c.brackets)};
}

Outcome cmd_selmer(Runner& R, const std::string& label, unsigned k, long p, const std::string& variant) {
    const CMCurve& E = R.curve(label);
    SelmerVariant v = parse_selmer_variant(variant);
    DigitsGuard g(R.cfg.digits + 10);
    return certificate_outcome(predicted_selmer_order(E, k, p, v, R.cfg.digits));
}

Outcome cmd_chow(Runner& R, const std::string& label, long d, long i, long p) {
    const CMCurve& E = R.curve(label);
    DigitsGuard g(R.cfg.digits + 10);
    return certificate_outcome(chow_certificate(E, d, i, p, R.cfg.digits));
}

Outcome cmd_reciprocity(Runner& R, const std::string& label, const std::string& ideal, unsigned k, long p) {
    const CMCurve& E = R.curve(label);
    QuadIdeal a(parse_quad_int(E.d, ideal));
    auto ctx = unit_context(E, R.cfg.digits);
    Reciprocity rc = verify_cw_reciprocity(*ctx, a, k, p);
    bool pass = rc.rhs_vanishes ? R.within(rc.lhs.abs()) : R.within(rc.residual);
    return {{{"curve", label},
             {"ideal", a.str()},
             {"k", k},
             {"p", p},
             {"lhs", R.num(rc.lhs)},
             {"rhs", R.num(rc.rhs)},
             {"rhs_primitive", R.num(rc.rhs_primitive)},
             {"factor", R.num(rc.factor)},
             {"rhs_vanishes", rc.rhs_vanishes},
             {"residual_log10", lg(log10_abs(rc.residual))},
             {"residual_primitive_log10", lg(log10_abs(rc.residual_primitive))},
             {"matches", rc.matches},
             {"tolerance_log10", lg(R.cfg.tolerance_log10())}},
            pass,
            ""};
}

Outcome cmd_unit_relation(Runner& R, const std::string& label, const std::string& ia, const std::string& ib, unsigned n,
                          long p) {
    const CMCurve& E = R.curve(label);
    QuadIdeal a(parse_quad_int(E.d, ia)), b(parse_quad_int(E.d, ib));
    auto ctx = unit_context(E, R.cfg.digits);
    UnitRelation u = verify_unit_relation(*ctx, a, b, p, n);
    return {{{"curve", label},
             {"a", a.str()},
             {"b", b.str()},
             {"n", n},
             {"p", p},
             {"lhs", R.num(u.lhs)},
             {"rhs", R.num(u.rhs)},
             {"residual_log10", lg(log10_abs(u.residual))},
             {"tolerance_log10", lg(R.cfg.tolerance_log10())}},
            R.within(u.residual),
            ""};
}

Outcome cmd_lubin_tate(Runner& R, long p, long kmax_in) {
    if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p));
    long kmax = kmax_in > 0 ? kmax_in : p * p - 2;
    if (kmax >= p * p - 1) throw Error(Errc::InvalidArgument, "k_max must be below p^2 - 1");
    size_t M = R.cfg.series_for(p);
    if (static_cast<long>(M) <= p * p) throw Error(Errc::TruncationTooShort, "series_truncation must exceed p^2");
    const int N = R.cfg.padic_precision;
    LubinTateImageReport rep =
        verify_lubin_tate_image(p, PadicElem::from_int(padic_ctx(p, N), p), static_cast<unsigned>(kmax), N, M);
    ordered_json checks = ordered_json::array();
    for (const auto& e : rep.entries)
        checks.push_back({{"k", e.k}, {"valuation", e.valuation}, {"expected", e.expected}, {"ok", e.ok}});
    return {{{"p", p},
             {"pi", p},
             {"k_max", kmax},
             {"precision", N},
             {"series_terms", M},
             {"beta_ok", rep.beta_ok},
             {"log_prime_flat", rep.log_prime_flat},
             {"sparsity_ok", rep.sparsity_ok},
             {"mu_action_ok", rep.mu_action_ok},
             {"valuation_checks", checks}},
            rep.all_ok,
            ""};
}

Outcome cmd_suite(Runner& R) {
    ordered_json j = suite_json(run_suite(R.db(), R.cfg), R.cfg);
    bool pass = j["all_pass"];
    return {j, pass, ""};
}

Outcome cmd_curves(Runner& R) {
    ordered_json arr = ordered_json::array();
    for (const auto& E : R.db().curves())
        arr.push_back({{"label", E.label},
                       {"d_K", E.d},
                       {"A", E.A.get_str()},
                       {"B", E.B.get_str()},
                       {"f", E.conductor_ideal().str()},
                       {"conductor", E.conductor_over_Q()},
                       {"defined_over_Q", E.defined_over_Q}});
    return {{{"curves", arr}}, true, ""};
}

// Global options with a value; stripped from the command echo.
const std::set<std::string> kValued = {"--digits",      "--workers",           "--db",
                                       "--config",      "--padic-precision",   "--series-terms",
                                       "--denominator-bound", "--tolerance-fraction", "--max-terms"};

std::vector<std::string> command_echo(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        std::string key = a.substr(0, a.find('='));
        if (kValued.count(key)) {
            if (a.find('=') == std::string::npos) ++i;
            continue;
        }
        if (a == "--no-timing" || a == "--csv") continue;
        out.push_back(a);
    }
    return out;
}

}  // namespace

void apply_env(Config& c) {
    static const std::vector<std::pair<const char*, const char*>> vars = {
        {"CMHL_DIGITS", "digits"},
        {"CMHL_WORKERS", "workers"},
        {"CMHL_DB", "db"},
        {"CMHL_PADIC_PRECISION", "padic_precision"},
        {"CMHL_SERIES_TRUNCATION", "series_truncation"},
        {"CMHL_DENOMINATOR_BOUND", "denominator_bound"},
        {"CMHL_TOLERANCE_FRACTION", "tolerance_fraction"},
        {"CMHL_TRUNCATION_NORM_BOUND", "truncation_norm_bound"},
    };
    for (const auto& [env, key] : vars)
        if (const char* v = std::getenv(env); v && *v) setters().at(key)(c, v);
}

void apply_config_file(Config& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open config file " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(Errc::ParseError, path + ": not a JSON object");
    for (const auto& [k, v] : j.items()) {
        auto it = setters().find(k);
        if (it == setters().end()) throw Error(Errc::InvalidArgument, path + ": unknown key " + k);
        it->second(c, v.is_string() ? v.get<std::string>() : v.dump());
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Computations with CM elliptic curves: L-values, elliptic units, formal groups, certificates", "cmhl"};
    app.require_subcommand(1);
    app.fallthrough();

    std::map<std::string, std::string> flags;
    auto opt = [&](const std::string& name, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
    };
    opt("--digits", "digits", "decimal working precision (default 60, at least 30)");
    opt("--workers", "workers", "worker threads for data-parallel loops");
    opt("--db", "db", "curve database (JSON lines)");
    opt("--padic-precision", "padic_precision", "p-adic precision N (default 12)");
    opt("--series-terms", "series_truncation", "power series truncation M (default max(p^2 + 2, 64))");
    opt("--denominator-bound", "denominator_bound", "recognition denominator bound (default 10^8)");
    opt("--tolerance-fraction", "tolerance_fraction", "pass when residual < 10^-(digits * fraction)");
    opt("--max-terms", "truncation_norm_bound", "largest ideal norm for direct L-sums");
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file");
    bool no_timing = false, csv = false;
    app.add_flag("--no-timing", no_timing, "omit the timing block");
    app.add_flag("--csv", csv, "bracket tables as CSV (damerell, selmer-order, chow-cert)");

    std::function<Outcome(Runner&)> action;
    std::string curve, ideal, ideal_b, s, variant, method = "auto", s0;
    long p = 0, d = 0, i = 0, kmax = 0;
    unsigned k = 1, n = 0;
    bool conj = false, imprimitive = false;

    auto* c = app.add_subcommand("classify", "reduction type of a curve at p");
    c->add_option("curve", curve)->required();
    c->add_option("p", p)->required();
    c->callback([&] { action = [&](Runner& R) { return cmd_classify(R, curve, p); }; });

    c = app.add_subcommand("psi", "Grossencharacter value psi^k(a)");
    c->add_option("curve", curve)->required();
    c->add_option("ideal", ideal, "generator, e.g. 2+i or (1+sqrt(-7))/2")->required();
    c->add_option("k", k);
    c->callback([&] { action = [&](Runner& R) { return cmd_psi(R, curve, ideal, k); }; });

    c = app.add_subcommand("periods", "period lattice");
    c->add_option("curve", curve)->required();
    c->callback([&] { action = [&](Runner& R) { return cmd_periods(R, curve); }; });

    c = app.add_subcommand("lvalue", "Hecke L-value L(psi^k, s)");
    c->add_option("curve", curve)->required();
    c->add_option("k", k)->required();
    c->add_option("s", s, "real part, or re,im")->required();
    c->add_flag("--conj", conj, "use conj(psi)^k");
    c->add_flag("--imprimitive", imprimitive, "sum over ideals prime to f");
    c->add_option("--method", method, "auto, direct or approx");
    c->callback([&] { action = [&](Runner& R) { return cmd_lvalue(R, curve, k, s, conj, imprimitive, method); }; });

    c = app.add_subcommand("fe-check", "fit and check the functional equation");
    c->add_option("curve", curve)->required();
    c->add_option("k", k)->required();
    c->add_option("--s0", s0, "first test point");
    c->callback([&] { action = [&](Runner& R) { return cmd_fe_check(R, curve, k, s0); }; });

    c = app.add_subcommand("damerell", "L-value bracket recognized in K");
    c->add_option("curve", curve)->required();
    c->add_option("k", k)->required();
    c->add_option("variant", variant, "BracketK, BracketQ, BracketQDual, BracketDual, BracketDualLiteral")->required();
    c->callback([&] { action = [&](Runner& R) { return cmd_damerell(R, curve, k, variant); }; });

    c = app.add_subcommand("selmer-order", "predicted Selmer order certificate");
    c->add_option("curve", curve)->required();
    c->add_option("k", k)->required();
    c->add_option("p", p)->required();
    c->add_option("variant", variant, "K, Q, Q-dual, K-dual")->required();
    c->callback([&] { action = [&](Runner& R) { return cmd_selmer(R, curve, k, p, variant); }; });

    c = app.add_subcommand("chow-cert", "Chow group torsion certificate");
    c->add_option("curve", curve)->required();
    c->add_option("d", d)->required();
    c->add_option("i", i)->required();
    c->add_option("p", p)->required();
    c->callback([&] { action = [&](Runner& R) { return cmd_chow(R, curve, d, i, p); }; });

    auto* verify = app.add_subcommand("verify", "numerical identity checks");
    verify->require_subcommand(1);
    c = verify->add_subcommand("cw-reciprocity", "Coates-Wiles derivative against the L-value");
    c->add_option("curve", curve)->required();
    c->add_option("ideal", ideal)->required();
    c->add_option("k", k)->required();
    c->add_option("p", p)->required();
    c->callback([&] { action = [&](Runner& R) { return cmd_reciprocity(R, curve, ideal, k, p); }; });
    c = verify->add_subcommand("unit-relation", "elliptic unit relation between two ideals");
    c->add_option("curve", curve)->required();
    c->add_option("a", ideal)->required();
    c->add_option("b", ideal_b)->required();
    c->add_option("n", n)->required();
    c->add_option("p", p)->required();
    c->callback([&] { action = [&](Runner& R) { return cmd_unit_relation(R, curve, ideal, ideal_b, n, p); }; });
    c = verify->add_subcommand("lubin-tate", "valuations of delta_k on the Lubin-Tate group of pi = p");
    c->add_option("p", p)->required();
    c->add_option("k_max", kmax);
    c->callback([&] { action = [&](Runner& R) { return cmd_lubin_tate(R, p, kmax); }; });

    c = app.add_subcommand("suite", "acceptance battery");
    c->callback([&] { action = [&](Runner& R) { return cmd_suite(R); }; });

    c = app.add_subcommand("curves", "list the curve database");
    c->callback([&] { action = [&](Runner& R) { return cmd_curves(R); }; });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "cmhl: " << e.what() << "\n";
        return kExitUsage;
    }

    Config cfg;
    try {
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        apply_env(cfg);
        for (const auto& [key, v] : flags) setters().at(key)(cfg, v);
        cfg.timing = !no_timing;
        cfg.csv = csv;
        validate(cfg);
    } catch (const Error& e) {
        err << "cmhl: " << e.what() << "\n";
        return kExitUsage;
    }
    set_worker_count(cfg.workers);

    Runner runner(cfg);
    auto t0 = std::chrono::steady_clock::now();
    Outcome res;
    try {
        res = action(runner);
    } catch (const Error& e) {
        if (is_usage_error(e.code())) {
            err << "cmhl: " << e.what() << "\n";
            return kExitUsage;
        }
        res.result = {{"error", e.what()}};
        res.pass = false;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (cfg.csv && !res.csv.empty()) {
        out << res.csv;
        return res.pass ? kExitPass : kExitFail;
    }
    ordered_json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = command_echo(args);
    report["config"] = config_json(cfg);
    report["result"] = res.result;
    report["pass"] = res.pass;
    if (cfg.timing) report["timing"] = {{"seconds", std::round(secs * 1000) / 1000}};
    out << report.dump(2) << "\n";
    return res.pass ? kExitPass : kExitFail;
}

}  // namespace cmlab
