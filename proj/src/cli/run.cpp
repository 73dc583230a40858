#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "scrambler/cli.hpp"
#include "scrambler/errors.hpp"
#include "scrambler/greens.hpp"
#include "scrambler/kernels.hpp"
#include "scrambler/menu_json.hpp"
#include "scrambler/scramblon.hpp"
#include "scrambler/sizeflow.hpp"

namespace scrambler::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

// Typed access to one config object; unknown keys are reported at the end.
class Fields {
  public:
    Fields(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
        if (!doc_.is_object()) throw ValidationError(where_ + " must be a JSON object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return doc_.contains(key);
    }

    const json& raw(const std::string& key) {
        if (!has(key)) throw ValidationError(where_ + " is missing '" + key + "'");
        return doc_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ValidationError(where_ + "." + key + " must be a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    long long integer(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ValidationError(where_ + "." + key + " must be an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& key, long long fallback) {
        return has(key) ? integer(key) : fallback;
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = doc_.at(key);
        if (!v.is_boolean()) throw ValidationError(where_ + "." + key + " must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = doc_.at(key);
        if (!v.is_string()) throw ValidationError(where_ + "." + key + " must be a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& [key, value] : doc_.items())
            if (!seen_.count(key)) throw ValidationError("unknown field '" + key + "' in " + where_);
    }

  private:
    const json& doc_;
    std::string where_;
    std::set<std::string> seen_;
};

// Either an explicit array or {"start", "stop", "points"}.
std::vector<double> read_grid(const json& v, const std::string& where) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number()) throw ValidationError(where + " must contain numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    Fields f(v, where);
    double start = f.number("start"), stop = f.number("stop");
    long long points = f.integer("points");
    f.finish();
    if (points < 1) throw ValidationError(where + ".points must be >= 1");
    if (points == 1) return {start};
    for (long long i = 0; i < points; ++i)
        out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1));
    return out;
}

struct ModelSpec {
    CouplingMenu menu;
    Filling filling = Filling::from_density(0.5);
    std::optional<SimplifiedModel> simplified;
};

// {"model": {"u3", "u1" | "r", "n" | "mu"}} or {"menu": ..., "filling": ...}.
ModelSpec read_model(Fields& f) {
    ModelSpec spec;
    if (f.has("model")) {
        Fields m(f.raw("model"), "model");
        double u3 = m.number("u3");
        bool has_u1 = m.has("u1"), has_r = m.has("r");
        if (has_u1 == has_r) throw ValidationError("model needs exactly one of 'u1' or 'r'");
        json filling = json::object();
        if (m.has("n")) filling["n"] = m.raw("n");
        if (m.has("mu")) filling["mu"] = m.raw("mu");
        spec.filling = filling_from_json(filling);
        SimplifiedModel model = has_u1 ? SimplifiedModel(m.number("u1"), u3, spec.filling)
                                       : SimplifiedModel::from_ratio(m.number("r"), u3, spec.filling);
        m.finish();
        spec.menu = model.menu();
        spec.simplified = model;
        return spec;
    }
    spec.menu = menu_from_json(f.raw("menu"));
    spec.filling = filling_from_json(f.raw("filling"));
    return spec;
}

double tolerance(const RunConfig& rc, Fields& f, const std::string& key, double fallback) {
    double v = f.number(key, fallback);
    if (auto it = rc.tolerances.find(key); it != rc.tolerances.end()) v = it->second;
    return v;
}

std::string csv_row(std::initializer_list<double> values) {
    std::string s;
    bool first = true;
    for (double v : values) {
        if (!first) s += ',';
        s += format_number(v);
        first = false;
    }
    s += '\n';
    return s;
}

struct Output {
    std::string body;
    json manifest_extra = json::object();
};

Output run_greens(const RunConfig& rc, const json& doc) {
    Fields f(doc, "greens config");
    ModelSpec spec = read_model(f);
    auto times = read_grid(f.raw("times"), "times");
    f.finish();
    Output out;
    json rows = json::array();
    std::string csv = "t,Guu,Gud,Gdu,Gdd,ReGR,ImGR\n";
    for (double t : times) {
        // t = 0 is reported as the limit 0+.
        GreensMatrix g = greens_matrix(spec.menu, spec.filling, t, Side::kPositive);
        auto gr = retarded_greens(spec.menu, spec.filling, t, Side::kPositive);
        csv += csv_row({t, g.uu, g.ud, g.du, g.dd, gr.real(), gr.imag()});
        rows.push_back({{"t", t}, {"Guu", g.uu}, {"Gud", g.ud}, {"Gdu", g.du}, {"Gdd", g.dd},
                        {"ReGR", gr.real()}, {"ImGR", gr.imag()}});
    }
    double gamma = quasiparticle_rate(spec.menu, spec.filling).gamma;
    out.manifest_extra["gamma"] = gamma;
    out.body = rc.format == Format::kCsv ? csv : json{{"gamma", gamma}, {"rows", rows}}.dump(2) + "\n";
    return out;
}

TermKey read_key(const json& v) {
    Fields f(v, "key");
    TermKey key;
    if (f.has("q")) {
        key = TermKey::intra(static_cast<int>(f.integer("q")));
    } else {
        const json& p = f.raw("p");
        if (!p.is_array() || p.size() != 4) throw ValidationError("key.p must be 4 integers");
        CrossKey ck;
        for (std::size_t l = 0; l < 4; ++l) ck.p[l] = p[l].get<int>();
        key = TermKey::coupling(ck);
    }
    f.finish();
    return key;
}

Output run_phase_diagram(const RunConfig& rc, const json& doc) {
    Fields f(doc, "phase-diagram config");
    auto grid = read_grid(f.raw("n_grid"), "n_grid");
    double rel_tol = tolerance(rc, f, "rel_tol", 1e-10);
    std::vector<CriticalPoint> boundary;
    json summary = json::array();
    if (f.has("menu")) {
        CouplingMenu menu = menu_from_json(f.raw("menu"));
        TermKey key = read_key(f.raw("key"));
        f.finish();
        boundary = transition_boundary(menu, key, grid, rel_tol);
        for (const auto& cp : boundary) {
            GrowthRate g = lyapunov_exponent(menu, Filling::from_density(cp.n));
            summary.push_back({{"n", cp.n}, {"u1_critical", cp.u1_critical}, {"kappa", g.kappa},
                               {"r", nullptr}, {"classification", phase_name(g.classification)}});
        }
    } else {
        double u3 = f.number("u3");
        std::optional<double> u1;
        if (f.has("u1")) u1 = f.number("u1");
        f.finish();
        boundary = transition_boundary(u3, grid);
        for (const auto& cp : boundary) {
            Filling fill = Filling::from_density(cp.n);
            SimplifiedModel model(u1.value_or(cp.u1_critical), u3, fill);
            double kappa = model.kappa();
            summary.push_back({{"n", cp.n}, {"u1_critical", cp.u1_critical}, {"kappa", kappa},
                               {"r", model.r()}, {"classification", phase_name(classify(kappa))}});
        }
    }
    Output out;
    std::string csv = "n,u1_critical\n";
    for (const auto& cp : boundary) csv += csv_row({cp.n, cp.u1_critical});
    out.body = rc.format == Format::kCsv ? csv : json{{"points", summary}}.dump(2) + "\n";
    out.manifest_extra["summary"] = summary;
    return out;
}

Output run_size_evolve(const RunConfig& rc, const json& doc) {
    Fields f(doc, "size-evolve config");
    ModelSpec spec = read_model(f);
    auto times = read_grid(f.raw("times"), "times");
    SeriesOptions opt;
    opt.s_max = static_cast<std::size_t>(f.integer("s_max", 64));
    opt.rel_tol = tolerance(rc, f, "rel_tol", 1e-12);
    opt.tail_budget = tolerance(rc, f, "tail_budget", 1e-6);
    bool adaptive = f.boolean("adaptive", false);
    std::optional<double> system_size;
    if (f.has("N")) system_size = f.number("N");
    f.finish();

    auto dists = adaptive ? size_distribution_adaptive(spec.menu, spec.filling, times, opt)
                          : size_distribution_from_series(spec.menu, spec.filling, times, opt);
    double kappa = lyapunov_exponent(spec.menu, spec.filling).kappa;

    Output out;
    std::string csv = "t,s,P\n";
    json rows = json::array();
    json warnings = json::array();
    for (const auto& d : dists) {
        for (std::size_t s = 0; s < d.probs.size(); ++s)
            csv += csv_row({d.t, static_cast<double>(s), d.probs[s]});
        json row{{"t", d.t}, {"P", d.probs}, {"tail_mass", d.tail_mass}, {"truncation_warning", d.truncation_warning}};
        if (system_size) row["growth_over_N"] = std::exp(kappa * d.t) / *system_size;
        rows.push_back(row);
        if (d.truncation_warning) warnings.push_back({{"t", d.t}, {"tail_mass", d.tail_mass}});
    }
    out.body = rc.format == Format::kCsv ? csv : json{{"kappa", kappa}, {"distributions", rows}}.dump(2) + "\n";
    out.manifest_extra["kappa"] = kappa;
    out.manifest_extra["truncation_warnings"] = warnings;
    out.manifest_extra["s_max"] = dists.empty() ? opt.s_max : dists.front().probs.size() - 1;
    return out;
}

Output run_closed_form(const RunConfig& rc, const json& doc) {
    Fields f(doc, "closed-form config");
    SimplifiedDynamics dyn;
    if (f.has("model")) {
        ModelSpec spec = read_model(f);
        dyn = SimplifiedDynamics::from_model(*spec.simplified);
    } else {
        Fields d(f.raw("dynamics"), "dynamics");
        double r = d.number("r"), kappa = d.number("kappa");
        dyn = d.has("rate") ? SimplifiedDynamics{r, kappa, d.number("rate")}
                            : SimplifiedDynamics::from_r_kappa(r, kappa);
        d.finish();
        dyn.validate();
    }
    auto times = read_grid(f.raw("times"), "times");
    std::string quantity = f.string("quantity", "P");
    Output out;
    json rows = json::array();
    std::string csv;
    if (quantity == "P") {
        long long s_max = f.integer("s_max", 64);
        f.finish();
        csv = "t,s,P\n";
        for (double t : times)
            for (long long s = 0; s <= s_max; ++s) {
                double p = closed_form_P(dyn, s, t);
                csv += csv_row({t, static_cast<double>(s), p});
                rows.push_back({{"t", t}, {"s", s}, {"P", p}});
            }
    } else if (quantity == "Z") {
        auto xs = read_grid(f.raw("x"), "x");
        f.finish();
        csv = "t,x,Z\n";
        for (double t : times)
            for (double x : xs) {
                double z = closed_form_Z(dyn, x, t);
                csv += csv_row({t, x, z});
                rows.push_back({{"t", t}, {"x", x}, {"Z", z}});
            }
    } else {
        throw ValidationError("quantity must be 'P' or 'Z'");
    }
    out.body = rc.format == Format::kCsv ? csv : json{{"rows", rows}}.dump(2) + "\n";
    out.manifest_extra["dynamics"] = {{"r", dyn.r}, {"kappa", dyn.kappa}, {"rate", dyn.rate}};
    return out;
}

Output run_scramblon(const RunConfig& rc, const json& doc) {
    Fields f(doc, "scramblon config");
    ScramblonParams params(f.number("r"), f.number("n"), f.number("N"), f.number("kappa", 0.0));
    auto sigma = f.has("sigma_grid") ? read_grid(f.raw("sigma_grid"), "sigma_grid")
                                     : read_grid(json{{"start", 0.0}, {"stop", 1.0}, {"points", 201}}, "sigma_grid");
    bool has_lambda = f.has("lambda"), has_t = f.has("t");
    if (has_lambda == has_t) throw ValidationError("scramblon config needs exactly one of 'lambda' or 't'");
    ContinuumSizeDistribution dist = has_lambda
                                         ? continuum_distribution_at(params, f.number("lambda"), sigma)
                                         : continuum_distribution(params, f.number("t"), sigma);
    f.finish();
    json header{{"r", params.r()}, {"n", params.n()}, {"lambda", dist.lambda},
                {"s_sc", dist.s_sc}, {"singular_weight", dist.singular_weight}};
    Output out;
    if (rc.format == Format::kCsv) {
        out.body = "# " + header.dump() + "\nsigma,density\n";
        for (std::size_t i = 0; i < dist.sigma.size(); ++i) out.body += csv_row({dist.sigma[i], dist.density[i]});
    } else {
        out.body = json{{"header", header}, {"sigma", dist.sigma}, {"density", dist.density},
                        {"note", dist.endpoint_note}}.dump(2) + "\n";
    }
    out.manifest_extra["header"] = header;
    out.manifest_extra["note"] = dist.endpoint_note;
    return out;
}

Output run_oracle(const RunConfig& rc, const json& doc) {
    oracle::OracleConfig config = oracle_config_from_json(doc);
    if (rc.seed) config.seed = *rc.seed;
    auto res = oracle::disorder_average(config);
    Output out;
    std::string csv = "t,s,P_mean,P_stderr\n";
    json rows = json::array();
    for (std::size_t it = 0; it < res.t.size(); ++it) {
        for (std::size_t s = 0; s < res.p_mean[it].size(); ++s)
            csv += csv_row({res.t[it], static_cast<double>(s), res.p_mean[it][s], res.p_stderr[it][s]});
        rows.push_back({{"t", res.t[it]}, {"P_mean", res.p_mean[it]}, {"P_stderr", res.p_stderr[it]},
                        {"mean_size", res.mean_size[it]}, {"mean_size_stderr", res.mean_size_stderr[it]}});
    }
    out.body = rc.format == Format::kCsv ? csv : json{{"rows", rows}}.dump(2) + "\n";
    out.manifest_extra["seed"] = config.seed;
    out.manifest_extra["dt"] = config.dt;
    out.manifest_extra["realizations"] = config.realizations;
    out.manifest_extra["oracle_wall_time_seconds"] = res.wall_seconds;
    out.manifest_extra["unitarity_max_deviation"] = res.max_unitarity_deviation;
    out.manifest_extra["norm_max_deviation"] = res.max_norm_deviation;
    return out;
}

Output run_validate(const RunConfig& rc, bool& all_passed) {
    auto suites = run_validation_suites();
    all_passed = true;
    json report = json::array();
    std::string csv = "suite,passed,detail\n";
    for (const auto& s : suites) {
        all_passed = all_passed && s.passed;
        report.push_back({{"suite", s.name}, {"passed", s.passed}, {"detail", s.detail}});
        std::string detail = s.detail;
        for (char& c : detail)
            if (c == ',' || c == '\n') c = ';';
        csv += s.name + "," + (s.passed ? "true" : "false") + "," + detail + "\n";
    }
    Output out;
    out.body = rc.format == Format::kCsv ? csv : json{{"suites", report}, {"all_passed", all_passed}}.dump(2) + "\n";
    out.manifest_extra["all_passed"] = all_passed;
    return out;
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"greens",   "phase-diagram", "size-evolve", "closed-form",
                                                "scramblon", "oracle",       "validate"};
    return names;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + tmp + "' for writing");
        os << content;
        os.flush();
        if (!os) throw IoError("failed writing '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path + "'");
    }
}

json load_config(const std::string& input) {
    std::string text;
    auto first = input.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (input[first] == '{' || input[first] == '[')) {
        text = input;
    } else {
        std::ifstream is(input, std::ios::binary);
        if (!is) throw IoError("cannot read config '" + input + "'");
        std::ostringstream ss;
        ss << is.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
}

oracle::OracleConfig oracle_config_from_json(const json& doc) {
    Fields f(doc, "oracle config");
    oracle::OracleConfig c;
    c.n_sys = static_cast<int>(f.integer("n_sys"));
    c.n_env = static_cast<int>(f.integer("n_env", 0));
    c.menu = menu_from_json(f.raw("menu"));
    c.filling = f.has("filling") ? filling_from_json(f.raw("filling")) : Filling::from_density(0.5);
    c.dt = f.number("dt");
    c.t_final = f.number("t_final");
    c.realizations = static_cast<int>(f.integer("realizations"));
    if (f.has("seed")) {
        const json& s = f.raw("seed");
        if (!s.is_number_unsigned() && !s.is_number_integer()) throw ValidationError("seed must be an integer");
        c.seed = s.get<std::uint64_t>();
    }
    c.initial_operator = f.string("initial_operator", "c1");
    std::string conv = f.string("convention", "rate_matched");
    if (conv == "rate_matched")
        c.convention = oracle::VarianceConvention::kRateMatched;
    else if (conv == "verbatim")
        c.convention = oracle::VarianceConvention::kVerbatim;
    else
        throw ValidationError("convention must be 'rate_matched' or 'verbatim'");
    c.restrict_charge_sector = f.boolean("restrict_charge_sector", false);
    if (f.has("record_times")) c.record_times = read_grid(f.raw("record_times"), "record_times");
    f.finish();
    oracle::validate_config(c);
    return c;
}

int run(const RunConfig& rc, std::ostream& out_stream, std::ostream& err) {
    auto start = std::chrono::steady_clock::now();
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), rc.subcommand) == names.end()) {
        err << "error: unknown subcommand '" << rc.subcommand << "'\n";
        return kExitUsage;
    }
    try {
        json doc = json::object();
        if (rc.subcommand != "validate") {
            if (rc.input.empty()) throw UsageError("--config is required for " + rc.subcommand);
            doc = load_config(rc.input);
        }
        Output output;
        bool validate_passed = true;
        if (rc.subcommand == "greens") output = run_greens(rc, doc);
        else if (rc.subcommand == "phase-diagram") output = run_phase_diagram(rc, doc);
        else if (rc.subcommand == "size-evolve") output = run_size_evolve(rc, doc);
        else if (rc.subcommand == "closed-form") output = run_closed_form(rc, doc);
        else if (rc.subcommand == "scramblon") output = run_scramblon(rc, doc);
        else if (rc.subcommand == "oracle") output = run_oracle(rc, doc);
        else output = run_validate(rc, validate_passed);

        json manifest{{"subcommand", rc.subcommand},
                      {"version", kVersion},
                      {"inputs_hash", fnv1a_hex(rc.subcommand + "\n" + doc.dump() + "\n" +
                                                (rc.seed ? std::to_string(*rc.seed) : ""))},
                      {"format", rc.format == Format::kCsv ? "csv" : "json"},
                      {"kernel_isa", kernels::active().name},
                      {"compiler", __VERSION__},
                      {"seed", rc.seed ? json(*rc.seed) : json(nullptr)},
                      {"wall_time_seconds",
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
        for (const auto& [k, v] : output.manifest_extra.items()) manifest[k] = v;

        if (rc.output == "-") {
            out_stream << output.body;
            out_stream.flush();
            err << manifest.dump() << "\n";
        } else {
            write_atomic(rc.output, output.body);
            write_atomic(rc.output + ".manifest.json", manifest.dump(2) + "\n");
            if (rc.subcommand == "phase-diagram")
                write_atomic(rc.output + ".summary.json", manifest["summary"].dump(2) + "\n");
        }
        if (!validate_passed) {
            err << "error: validation suites failed\n";
            return kExitValidation;
        }
        return kExitOk;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const json::exception& e) {
        err << "validation failure: malformed config: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace scrambler::cli
