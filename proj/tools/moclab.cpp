// moclab: batch front-end over the core pipelines.
// Exit status: 0 all checks pass, 1 a check or pipeline failed, 2 bad configuration.

#include <math.h>  // Boost 1.74 pchip uses unqualified isnan

#include "moclab/error.hpp"
#include "moclab/euler_lower_bound.hpp"
#include "moclab/families.hpp"
#include "moclab/forward_map.hpp"
#include "moclab/inverse_map.hpp"
#include "moclab/moc.hpp"
#include "moclab/vorticity_recovery.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace moclab;
using json = nlohmann::ordered_json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Params {
    std::string command;
    std::string family;
    std::string input;
    std::string suite = "group-law";
    std::string format = "csv";
    std::string out;
    std::string seed_grid;
    double t = 0.5;
    double tol = 0.0;  // 0 picks the command default
    double x_hi = 0.0;
    double p_lo = 0.0;
    double a = 1e-3;
    double q = 0.0;
};

struct Grid {
    int decades = 0;
    int ppd = 0;
};

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Check {
    std::string name;
    bool pass = false;
    double margin = 0.0;
};

struct Report {
    json params = json::object();
    json tolerances = json::object();
    std::vector<Series> series;
    std::vector<Check> checks;
};

Grid parse_grid(const std::string& spec, Grid dflt)
{
    if (spec.empty())
        return dflt;
    Grid g = dflt;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("seed-grid entry '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        int v = 0;
        try {
            std::size_t used = 0;
            v = std::stoi(val, &used);
            if (used != val.size())
                throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw ConfigError("seed-grid value '" + val + "' is not an integer");
        }
        if (key == "decades")
            g.decades = v;
        else if (key == "ppd")
            g.ppd = v;
        else
            throw ConfigError("unknown seed-grid key '" + key + "'");
    }
    if (g.decades <= 0 || g.ppd <= 0)
        throw ConfigError("empty grid: decades and ppd must be positive");
    return g;
}

// "yudovich-m=2", "m=2" or "2"
int parse_family_index(const std::string& fam)
{
    std::string s = fam;
    for (const char* prefix : {"yudovich-m=", "m="})
        if (s.rfind(prefix, 0) == 0)
            s = s.substr(std::string(prefix).size());
    try {
        std::size_t used = 0;
        const int m = std::stoi(s, &used);
        if (used == s.size() && m >= 0 && m <= 6)
            return m;
    } catch (const std::exception&) {
    }
    throw ConfigError("unknown family '" + fam + "'");
}

// Two numeric columns; non-numeric first line is a header, '#' starts a comment.
std::pair<std::vector<double>, std::vector<double>> read_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open input file '" + path + "'");
    std::vector<double> xs, ys;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x = 0.0, y = 0.0;
        if (!(ls >> x >> y)) {
            if (first) {
                first = false;
                continue;
            }
            throw ConfigError("malformed row in '" + path + "': " + line);
        }
        first = false;
        if (!(x > 0) || !(y > 0))
            throw ConfigError("input samples must be positive");
        if (!xs.empty() && !(x > xs.back()))
            throw ConfigError("input abscissae must increase strictly");
        xs.push_back(x);
        ys.push_back(y);
    }
    if (xs.size() < 4)
        throw ConfigError("input table needs at least 4 rows");
    return {xs, ys};
}

// log y against log x, pchip inside the table and linear extension outside
Fn loglog_interpolant(const std::vector<double>& xs, const std::vector<double>& ys)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    const double x0 = lx.front(), x1 = lx.back();
    const double y0 = ly.front(), y1 = ly.back();
    const std::size_t n = lx.size();
    const double s0 = (ly[1] - ly[0]) / (lx[1] - lx[0]);
    const double s1 = (ly[n - 1] - ly[n - 2]) / (lx[n - 1] - lx[n - 2]);
    auto p = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(lx),
                                                                                     std::move(ly));
    return [p, x0, x1, y0, y1, s0, s1](double l) {
        if (l <= x0)
            return y0 + s0 * (l - x0);
        if (l >= x1)
            return y1 + s1 * (l - x1);
        return (*p)(l);
    };
}

Check make_check(const std::string& name, double err, double tol)
{
    return {name, err <= tol, tol - err};
}

double pick(double v, double dflt)
{
    return v > 0 ? v : dflt;
}

// ---------------------------------------------------------------------------

Report run_forward(const Params& P)
{
    Report rep;
    const Grid g = parse_grid(P.seed_grid, {6, 4});
    const double x_hi = pick(P.x_hi, 1e-8);
    const double tol = pick(P.tol, 1e-6);
    LpProfile prof;
    int m = -1;
    if (!P.input.empty()) {
        const auto [ps, th] = read_table(P.input);
        const Fn lt = loglog_interpolant(ps, th);
        prof.log_theta = [lt](double p) { return lt(std::log(p)); };
        prof.p0 = ps.front();
        prof.name = "table";
    } else {
        m = parse_family_index(P.family.empty() ? "m=0" : P.family);
        prof = m == 0 ? constant_profile(1.0) : family::theta(m);
    }
    if (!(x_hi > 0 && x_hi < 1))
        throw ConfigError("x-hi must lie in (0, 1)");
    if (!(P.t >= 0))
        throw ConfigError("t must be nonnegative");
    const auto xs = num::log_grid(x_hi * std::pow(10.0, -g.decades), x_hi, g.ppd);
    rep.params = {{"family", prof.name}, {"t", P.t}, {"x_hi", x_hi}, {"decades", g.decades}, {"ppd", g.ppd}};
    rep.tolerances = {{"closed_form_rel", tol}, {"concavity", 1e-9}};

    const Moc mu = mu_from_theta(prof, xs);
    Series smu{"mu", xs, {}};
    Series sg{"gamma", xs, {}};
    double err_mu = 0.0, err_g = 0.0;
    for (double x : xs) {
        const double v = mu(x);
        smu.y.push_back(v);
        double gx = std::nan("");
        try {
            gx = gamma_from_mu(mu, P.t, x);
        } catch (const Error& e) {
            if (std::getenv("MOCLAB_DEBUG"))
                std::fprintf(stderr, "gamma at x = %g: %s\n", x, e.what());
        }
        sg.y.push_back(gx);
        if (m == 0) {
            err_mu = std::max(err_mu, std::fabs(v / (-2.0 * M_E * x * std::log(x)) - 1.0));
            if (std::isfinite(gx))
                err_g = std::max(err_g, std::fabs(gx / std::pow(x, std::exp(-2.0 * M_E * P.t)) - 1.0));
        }
    }
    rep.series = {smu, sg};
    std::vector<double> rs;
    for (auto it = xs.rbegin(); it != xs.rend(); ++it)
        rs.push_back(-std::log(*it));
    const Certificate inc = certify_increasing(mu, rs);
    const Certificate conc = certify_concave(mu, rs, 1e-9);
    rep.checks.push_back({"mu_increasing", inc.holds, inc.worst_margin});
    rep.checks.push_back({"mu_concave", conc.holds, conc.worst_margin});
    const bool gamma_defined = std::all_of(sg.y.begin(), sg.y.end(), [](double v) { return std::isfinite(v); });
    rep.checks.push_back({"gamma_defined", gamma_defined, gamma_defined ? 0.0 : -1.0});
    if (m == 0) {
        rep.checks.push_back(make_check("mu_closed_form", err_mu, tol));
        rep.checks.push_back(make_check("gamma_closed_form", err_g, tol));
    }
    return rep;
}

Report run_invert_mu(const Params& P)
{
    Report rep;
    const Grid g = parse_grid(P.seed_grid, {3, 8});
    const double p_lo = pick(P.p_lo, 1e2);
    const double band = pick(P.tol, 0.05);
    Moc mu;
    int m = -1;
    std::string name;
    if (!P.input.empty()) {
        const auto [xs, vs] = read_table(P.input);
        const Fn li = loglog_interpolant(xs, vs);
        // lambda(r) = r + log mu(e^{-r}) stays finite where x itself underflows
        mu = Moc::from_lambda([li](double r) { return r + li(-r); }, -std::log(xs.back()));
        name = "table";
    } else {
        m = parse_family_index(P.family.empty() ? "m=1" : P.family);
        mu = family::mu(m);
        name = "mu-m=" + std::to_string(m);
    }
    const auto ps = num::log_grid(p_lo, p_lo * std::pow(10.0, g.decades), g.ppd);
    rep.params = {{"family", name}, {"p_lo", p_lo}, {"decades", g.decades}, {"ppd", g.ppd}};
    rep.tolerances = {{"round_trip_band", band}};
    const ThetaFromMu th = theta_from_mu(mu, ps);
    rep.series = {{"log_theta", th.p, th.log_theta}, {"eta", th.p, th.eta}};
    bool finite = true;
    for (double v : th.log_theta)
        finite = finite && std::isfinite(v);
    rep.checks.push_back({"theta_finite", finite, finite ? 0.0 : -1.0});
    // mu_m comes back as theta_{m-1} up to a constant factor
    if (m >= 1) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < th.p.size(); ++i) {
            const double d = th.log_theta[i] - family::log_theta(m - 1, th.p[i]);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        rep.checks.push_back(make_check("matches_theta_m_minus_1", 0.5 * (hi - lo), band));
    }
    return rep;
}

Report run_invert_flow(const Params& P)
{
    Report rep;
    const Grid g = parse_grid(P.seed_grid, {8, 4});
    const double x_hi = pick(P.x_hi, 1e-2);
    const double tol = pick(P.tol, 1e-6);
    AcceptableMoc f;
    double t0 = P.t;
    std::string name;
    if (P.family == "sqrt") {
        f = acceptable_from_r([](double r) { return 0.5 * r; }, [](double) { return 0.5; },
                              [](double r) { return 2.0 * r; }, 1.0);
        name = "sqrt";
    } else {
        const int m = parse_family_index(P.family.empty() ? "m=1" : P.family);
        if (m < 1)
            throw ConfigError("invert-flow needs m >= 1 or sqrt");
        f = family::f_time(m, P.t);
        name = "f-m=" + std::to_string(m);
    }
    if (!(t0 > 0))
        throw ConfigError("t must be positive");
    if (!(P.a > 0 && P.a < 1))
        throw ConfigError("a must lie in (0, 1)");
    const auto xs = num::log_grid(x_hi * std::pow(10.0, -g.decades), x_hi, g.ppd);
    rep.params = {{"family", name}, {"t", t0}, {"a", P.a}, {"x_hi", x_hi}, {"decades", g.decades}, {"ppd", g.ppd}};
    rep.tolerances = {{"flow_time_spread_rel", tol}};
    const SingleTimeResult res = mu_from_gamma_single_time(f, t0, P.a);
    Series smu{"mu", xs, {}};
    Series si{"flow_time", xs, {}};
    for (double x : xs) {
        smu.y.push_back(res.mu(x));
        si.y.push_back(osgood_integral(res.mu, x, f.f(x)));
    }
    const auto [lo, hi] = std::minmax_element(si.y.begin(), si.y.end());
    rep.series = {smu, si};
    rep.checks.push_back(make_check("flow_time_constant", (*hi - *lo) / t0, tol));
    return rep;
}

Report run_recover(const Params& P)
{
    Report rep;
    const Grid g = parse_grid(P.seed_grid, {1, 4});
    const int m = parse_family_index(P.family.empty() ? "m=1" : P.family);
    if (m < 1)
        throw ConfigError("recover needs m >= 1");
    const double band = pick(P.tol, std::log(2.0) + 0.1);
    const PhiProfile phi = family::phi(m);
    const double q = pick(P.q, std::max(50.0, 2.0 * phi.p_min));
    const double p_lo = pick(P.p_lo, 2.0 * q);
    const auto ps = num::log_grid(p_lo, p_lo * std::pow(10.0, g.decades), g.ppd);
    rep.params = {{"family", "yudovich-m=" + std::to_string(m)}, {"q", q}, {"p_lo", p_lo},
                  {"decades", g.decades}, {"ppd", g.ppd}};
    rep.tolerances = {{"log_theta_band", band}, {"condition1_delta", 0.1}};
    const DistributionProfile d = recover_rho(phi, q);
    Series sb{"beta", ps, {}}, sr{"rho_at_beta", ps, {}}, sm{"log_theta_rec", ps, {}}, st{"log_theta", ps, {}};
    double worst = 0.0;
    for (double p : ps) {
        const double b = d.beta(p);
        sb.y.push_back(b);
        sr.y.push_back(d.rho(b));
        const double rec = mellin_forward(d, p).log_theta;
        const double ref = family::log_theta(m, p);
        sm.y.push_back(rec);
        st.y.push_back(ref);
        worst = std::max(worst, std::fabs(rec - ref));
    }
    rep.series = {sb, sr, sm, st};
    rep.checks.push_back(make_check("log_theta_band", worst, band));
    const ConditionsReport cr = check_conditions(phi, ps);
    double m1 = INFINITY;
    for (double v : cr.margin1_rel)
        m1 = std::min(m1, v - cr.delta);
    rep.checks.push_back({"condition1", cr.condition1, m1});
    rep.checks.push_back({"condition2", cr.condition2, cr.condition2 ? 0.0 : -1.0});
    return rep;
}

Report run_euler(const Params& P)
{
    Report rep;
    const Grid g = parse_grid(P.seed_grid, {2, 2});
    const double x_hi = pick(P.x_hi, 1e-3);
    const double tol = pick(P.tol, 1e-4);
    const std::string fam = P.family.empty() ? "square" : P.family;
    if (!(x_hi > 0 && x_hi < 0.5))
        throw ConfigError("x-hi must lie in (0, 1/2)");
    const auto xs = num::log_grid(x_hi * std::pow(10.0, -g.decades), x_hi, g.ppd);
    rep.params = {{"family", fam}, {"x_hi", x_hi}, {"decades", g.decades}, {"ppd", g.ppd}};
    rep.tolerances = {{"exact_rel", tol}};
    Series sv{"v1", xs, {}};
    if (fam == "square") {
        const SquareSymmetricVorticity w = indicator_square(1.0);
        Series sb{"bc_bound", xs, {}};
        double bc = INFINITY, err = 0.0;
        for (double x : xs) {
            const double v = biot_savart_axis(w, x).value;
            const double b = 2.0 * x * std::log(1.0 / x);
            sv.y.push_back(v);
            sb.y.push_back(b);
            bc = std::min(bc, v / b - 1.0);
            err = std::max(err, std::fabs(v / square_patch_velocity_exact(1.0, x) - 1.0));
        }
        rep.series = {sv, sb};
        rep.checks.push_back({"bc_bound", bc >= 0.0, bc});
        rep.checks.push_back(make_check("exact_decomposition", err, tol));
        return rep;
    }
    const int m = parse_family_index(fam);
    if (m < 2)
        throw ConfigError("euler family must be 'square' or m >= 2");
    const SquareSymmetricVorticity w = log_singular(m);
    const LowerBoundConfig cfg = make_lower_bound_config();
    rep.tolerances["lambda"] = cfg.lambda;
    Series sl{"static_lower_bound", xs, {}};
    double worst = INFINITY;
    for (double x : xs) {
        const double v = biot_savart_axis(w, x).value;
        const double l = lower_bound_velocity(w, cfg, nullptr, 0.0, x);
        sv.y.push_back(v);
        sl.y.push_back(l);
        worst = std::min(worst, v - l);
    }
    rep.series = {sv, sl};
    rep.checks.push_back({"static_bound", worst >= 0.0, worst});
    return rep;
}

Report run_verify(const Params& P)
{
    Report rep;
    const Grid g = parse_grid(P.seed_grid, {3, 4});
    const int m = parse_family_index(P.family.empty() ? "m=1" : P.family);
    rep.params = {{"family", "m=" + std::to_string(m)}, {"suite", P.suite}, {"decades", g.decades}, {"ppd", g.ppd}};
    if (P.suite == "group-law") {
        if (m < 1)
            throw ConfigError("group-law suite needs m >= 1");
        const double tol = pick(P.tol, 1e-6);
        rep.tolerances = {{"group_law_rel", tol}};
        const std::vector<double> st = {0.1, 0.3};
        // keep every flowed point where mu_m is certified
        const double r0 = family::iterated_exp(m, 1.1 + 2.0 * st.back());
        const auto rs = num::log_grid(r0, r0 * std::pow(10.0, g.decades), g.ppd);
        const FlowFamily closed = family::flow(m);
        const FlowFamily numeric = flow_from_mu(family::mu(m));
        for (const auto& [label, fl] : {std::pair<std::string, const FlowFamily*>{"closed", &closed},
                                        {"ode", &numeric}})
            for (double s : st)
                for (double t : st) {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%s_s=%g_t=%g", label.c_str(), s, t);
                    Series dev{buf, rs, {}};
                    double worst = 0.0;
                    for (double r : rs) {
                        // relative in r = log(1/x); for m = 3 the points sit far below double-range x
                        const double once = fl->gamma_r(s + t, r);
                        const double e = std::fabs(fl->gamma_r(s, fl->gamma_r(t, r)) / once - 1.0);
                        dev.y.push_back(e);
                        worst = std::max(worst, e);
                    }
                    rep.series.push_back(dev);
                    rep.checks.push_back(make_check(std::string("group_law_") + buf, worst, tol));
                }
        return rep;
    }
    if (P.suite == "transport") {
        if (m < 1)
            throw ConfigError("transport suite needs m >= 1");
        const double tol = pick(P.tol, 1e-4);
        rep.tolerances = {{"transport_rel", tol}};
        const std::vector<double> ts = m >= 3 ? std::vector<double>{0.1, 0.5} : std::vector<double>{0.1, 0.5, 1.0};
        const double r0 = family::iterated_exp(m, 1.1 + ts.back());
        const auto rs = num::log_grid(r0, r0 * std::pow(10.0, g.decades), g.ppd);
        const TransportReport tr = verify_transport_r(family::mu(m), family::flow(m), ts, rs);
        rep.checks.push_back(make_check("transport_space", tr.max_space_residual, tol));
        rep.checks.push_back(make_check("transport_time", tr.max_time_residual, tol));
        return rep;
    }
    if (P.suite == "diagnostics") {
        const double tol = pick(P.tol, 1e-9);
        rep.tolerances = {{"yudocond_floor", -tol}};
        DiagnosticsOptions opts;
        opts.decades = g.decades;
        opts.per_decade = g.ppd;
        const DiagnosticsReport d = diagnose(family::mu(m), opts);
        rep.series.push_back({"A", d.a_r, d.a_curve});
        double yudo = INFINITY;
        for (double v : d.yudocond.normalized)
            yudo = std::min(yudo, v);
        rep.checks.push_back({"increasing", d.is_strictly_increasing.holds, d.is_strictly_increasing.worst_margin});
        rep.checks.push_back({"concave", d.is_concave.holds, d.is_concave.worst_margin});
        rep.checks.push_back({"osgood", d.osgood.divergent, d.osgood.lower_bound});
        rep.checks.push_back({"dini_finite", d.dini_finite, d.dini_finite ? 0.0 : -1.0});
        rep.checks.push_back({"yudocond", yudo >= -tol, yudo + tol});
        return rep;
    }
    throw ConfigError("unknown suite '" + P.suite + "' (group-law, transport, diagnostics)");
}

// ---------------------------------------------------------------------------

std::string num17(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_csv(const Report& rep)
{
    std::string out;
    if (rep.series.empty()) {
        out += "check,pass,margin\n";
        for (const Check& c : rep.checks)
            out += c.name + "," + (c.pass ? "true" : "false") + "," + num17(c.margin) + "\n";
        return out;
    }
    out += "x";
    for (const Series& s : rep.series)
        out += "," + s.name;
    out += "\n";
    const std::vector<double>& xs = rep.series.front().x;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += num17(xs[i]);
        for (const Series& s : rep.series)
            out += "," + (i < s.y.size() ? num17(s.y[i]) : std::string("nan"));
        out += "\n";
    }
    return out;
}

std::string render_json(const Params& P, const Report& rep)
{
    json j;
    j["meta"] = {{"command", P.command}, {"params", rep.params}, {"tolerances", rep.tolerances}};
    j["series"] = json::array();
    for (const Series& s : rep.series)
        j["series"].push_back({{"name", s.name}, {"x", s.x}, {"y", s.y}});
    j["checks"] = json::array();
    for (const Check& c : rep.checks)
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
    return j.dump(2) + "\n";
}

// Config file keys mirror the long flag names.
void apply_config(const std::string& path, Params& P)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config file must hold a JSON object");
    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "family") P.family = val.get<std::string>();
            else if (key == "input") P.input = val.get<std::string>();
            else if (key == "suite") P.suite = val.get<std::string>();
            else if (key == "format") P.format = val.get<std::string>();
            else if (key == "out") P.out = val.get<std::string>();
            else if (key == "seed-grid") P.seed_grid = val.get<std::string>();
            else if (key == "t") P.t = val.get<double>();
            else if (key == "tol") P.tol = val.get<double>();
            else if (key == "x-hi") P.x_hi = val.get<double>();
            else if (key == "p-lo") P.p_lo = val.get<double>();
            else if (key == "a") P.a = val.get<double>();
            else if (key == "q") P.q = val.get<double>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
}

std::string find_config_arg(int argc, char** argv)
{
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc)
            return argv[i + 1];
        if (a.rfind("--config=", 0) == 0)
            return a.substr(9);
    }
    return {};
}

}  // namespace

int main(int argc, char** argv)
{
    Params P;
    std::string config_path;
    try {
        config_path = find_config_arg(argc, argv);
        if (!config_path.empty())
            apply_config(config_path, P);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    CLI::App app{"moclab: moduli of continuity, Lp growth and flows"};
    app.require_subcommand(1);
    app.add_option("--config", config_path, "JSON file of option defaults");
    app.add_option("--family", P.family, "yudovich-m=M / m=M; sqrt for invert-flow; square for euler");
    app.add_option("--input", P.input, "two-column table: (p, theta) for forward, (x, mu) for invert-mu");
    app.add_option("--t", P.t, "flow time");
    app.add_option("--tol", P.tol, "tolerance of the primary check (command default if omitted)");
    app.add_option("--x-hi", P.x_hi, "upper end of the x grid");
    app.add_option("--p-lo", P.p_lo, "lower end of the p grid");
    app.add_option("--a", P.a, "seed point of the single-time construction");
    app.add_option("--q", P.q, "base exponent for the rho recovery");
    app.add_option("--suite", P.suite, "verify suite: group-law, transport, diagnostics");
    app.add_option("--seed-grid", P.seed_grid, "grid as decades=D,ppd=N");
    app.add_option("--format", P.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", P.out, "output path (default: $MOCLAB_OUTPUT_DIR/<command>.<format> or stdout)");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"forward", "theta -> mu -> Gamma_t"},
        {"invert-flow", "single-time map -> mu"},
        {"invert-mu", "mu -> theta"},
        {"recover", "theta -> rho -> theta by Mellin quadrature"},
        {"euler", "axis velocity and lower bounds for square-symmetric vorticity"},
        {"verify", "property suites on builtin families"},
    };
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    P.command = app.get_subcommands().front()->get_name();

    Report rep;
    try {
        if (!(P.tol >= 0))
            throw ConfigError("tolerances must be positive");
        if (P.command == "forward")
            rep = run_forward(P);
        else if (P.command == "invert-flow")
            rep = run_invert_flow(P);
        else if (P.command == "invert-mu")
            rep = run_invert_mu(P);
        else if (P.command == "recover")
            rep = run_recover(P);
        else if (P.command == "euler")
            rep = run_euler(P);
        else
            rep = run_verify(P);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "%s error: %s\n", P.command.c_str(), e.what());
        return e.kind() == ErrorKind::ConfigError ? 2 : 1;
    }

    const std::string text = P.format == "json" ? render_json(P, rep) : render_csv(rep);
    std::string path = P.out;
    if (path.empty()) {
        if (const char* dir = std::getenv("MOCLAB_OUTPUT_DIR"); dir && *dir)
            path = (std::filesystem::path(dir) / (P.command + "." + P.format)).string();
    }
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::fprintf(stderr, "config error: cannot write '%s'\n", path.c_str());
            return 2;
        }
        out << text;
    }

    bool ok = true;
    for (const Check& c : rep.checks) {
        std::fprintf(stderr, "%s %s margin %s\n", c.pass ? "ok  " : "FAIL", c.name.c_str(), num17(c.margin).c_str());
        ok = ok && c.pass;
    }
    return ok ? 0 : 1;
}
