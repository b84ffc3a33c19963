#include "cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "rlcu/estimator.hpp"
#include "rlcu/resources.hpp"

namespace rlcu::cli {

namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string model = "heisenberg_xxz";
    std::string hamiltonian;  // file; overrides model
    int n = 4;
    ModelParams params;
    std::string observable;  // "c*LABEL+..."; default Z on qubits 1 and 2
    std::string initial_state;  // amplitude file; default best basis state

    double eps = 0.05;
    double delta = 0;  // 0: exact gap (or the fitted Heisenberg gap for resources)
    double eta = 0;    // 0: exact overlap (0.5 for resources)
    double vartheta = 0.1;
    double kappa = 0;  // energy resolution; 0: delta / 10
    int k = 1;
    long long shots = 0;
    std::uint64_t seed = 1;
    std::string out, shots_out;
    std::string basis = "pauli";
    std::string mode = "sampled";
    std::string segments = "tight";
    int threads = 0;

    double tau = 0, x_c = 0;
    int s_c = 0;
    double omega = std::numeric_limits<double>::quiet_NaN();
    double e_lo = std::numeric_limits<double>::quiet_NaN(), e_hi = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::string> methods{"rlcu", "qpe-trotter", "qpe-qw", "qsp", "qetu"};
    std::string task = "property";
    bool lattice = false;
    bool include_sampling = false;
    bool random_trotter = false;

    std::string axis = "Delta";
    std::vector<double> values;
    double gap_exponent = 0;
};

ModelParams gapped_xxz() {
    // default couplings of the builder are degenerate; use the antiferromagnetic sign
    ModelParams p;
    p.Jx = -1;
    p.Jy = -1;
    p.Jz = -2;
    return p;
}

template <class T>
void take(const json& j, const char* key, T& v) {
    if (j.contains(key)) v = j.at(key).get<T>();
}

void load_config(const std::string& path, Config& c) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    static const std::vector<std::string> known{
        "task",   "model", "hamiltonian", "n",       "params",  "observable", "initial_state", "eps",
        "delta",  "eta",   "vartheta",    "kappa",   "k",       "shots",      "seed",          "out",
        "shots_out", "basis", "mode",     "segments", "threads", "tau",       "x_c",           "s_c",
        "omega",  "e_lo",  "e_hi",        "methods", "lattice", "include_sampling", "random_trotter",
        "axis",   "values", "gap_exponent", "command"};
    for (auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) throw UsageError("config: unknown key '" + key + "'");
    try {
        take(j, "model", c.model);
        take(j, "hamiltonian", c.hamiltonian);
        take(j, "n", c.n);
        if (j.contains("params")) {
            const auto& p = j.at("params");
            take(p, "J", c.params.J);
            take(p, "h", c.params.h);
            take(p, "Jx", c.params.Jx);
            take(p, "Jy", c.params.Jy);
            take(p, "Jz", c.params.Jz);
            take(p, "hx", c.params.hx);
            take(p, "c", c.params.c);
            take(p, "periodic", c.params.periodic);
        }
        take(j, "observable", c.observable);
        take(j, "initial_state", c.initial_state);
        take(j, "eps", c.eps);
        take(j, "delta", c.delta);
        take(j, "eta", c.eta);
        take(j, "vartheta", c.vartheta);
        take(j, "kappa", c.kappa);
        take(j, "k", c.k);
        take(j, "shots", c.shots);
        take(j, "seed", c.seed);
        take(j, "out", c.out);
        take(j, "shots_out", c.shots_out);
        take(j, "basis", c.basis);
        take(j, "mode", c.mode);
        take(j, "segments", c.segments);
        take(j, "threads", c.threads);
        take(j, "tau", c.tau);
        take(j, "x_c", c.x_c);
        take(j, "s_c", c.s_c);
        take(j, "omega", c.omega);
        take(j, "e_lo", c.e_lo);
        take(j, "e_hi", c.e_hi);
        take(j, "methods", c.methods);
        take(j, "task", c.task);
        take(j, "lattice", c.lattice);
        take(j, "include_sampling", c.include_sampling);
        take(j, "random_trotter", c.random_trotter);
        take(j, "axis", c.axis);
        take(j, "values", c.values);
        take(j, "gap_exponent", c.gap_exponent);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

Hamiltonian build_hamiltonian(const Config& c) {
    if (!c.hamiltonian.empty()) return load_hamiltonian(c.hamiltonian);
    return build_model(c.model, c.n, c.params);
}

Hamiltonian parse_observable(const std::string& spec, int n) {
    std::string s = spec;
    if (s.empty()) {
        s = std::string(n, 'I');
        if (n >= 3) {
            s[1] = s[2] = 'Z';
        } else {
            s = std::string(n, 'Z');
        }
    }
    std::vector<PauliTerm> terms;
    for (const auto& part : split(s, '+')) {
        double c = 1.0;
        std::string label = part;
        if (auto star = part.find('*'); star != std::string::npos) {
            try {
                c = std::stod(part.substr(0, star));
            } catch (const std::exception&) {
                throw UsageError("bad observable coefficient in '" + part + "'");
            }
            label = part.substr(star + 1);
        }
        if (static_cast<int>(label.size()) != n) throw UsageError("observable label '" + label + "' needs " + std::to_string(n) + " letters");
        try {
            terms.push_back({c, PauliString::from_label(label)});
        } catch (const std::exception& e) {
            throw UsageError(std::string("observable: ") + e.what());
        }
    }
    if (terms.empty()) throw UsageError("empty observable");
    return Hamiltonian(n, terms);
}

double spectral_norm(const Hamiltonian& O) {
    if (O.terms().size() == 1) return std::abs(O.terms()[0].coeff);
    const Eigen::VectorXd ev = diagonalize(O).energies;
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

struct Problem {
    Hamiltonian H;
    EigenSystem es;
    StateVector psi0;
    double E0 = 0, Delta = 0, eta = 0;
};

Problem setup_problem(const Config& c) {
    Problem p;
    p.H = build_hamiltonian(c);
    if (p.H.n() > kMaxDenseQubits) throw UsageError("simulation limited to n <= " + std::to_string(kMaxDenseQubits));
    p.es = diagonalize(p.H);
    CVector psi = c.initial_state.empty() ? default_initial_state(p.es) : load_state(c.initial_state, p.H.n());
    p.psi0 = StateVector(p.H.n(), std::vector<cplx>(psi.data(), psi.data() + psi.size()));
    p.E0 = p.es.energies(0);
    p.Delta = c.delta > 0 ? c.delta : p.es.gap(0);
    p.eta = c.eta > 0 ? c.eta : p.es.overlap(psi, 0);
    if (!(p.Delta > 1e-9)) throw InfeasiblePlan("ground state is degenerate; pass --delta or change couplings");
    if (!(p.eta > 1e-12)) throw InfeasiblePlan("initial state has no ground-state overlap");
    return p;
}

void apply_overrides(const Config& c, FilterPlan& plan) {
    if (c.tau > 0) plan.tau = c.tau;
    if (c.x_c > 0) plan.x_c = c.x_c;
    if (c.s_c > 0) plan.s_c = c.s_c;
}

ShotOptions shot_options(const Config& c) {
    ShotOptions o;
    o.seed = c.seed;
    o.path = parse_estimator_path(c.mode);
    o.shots_override = c.shots;
    o.vartheta = c.vartheta;
    return o;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << body;
}

int simulate_observable(const Config& c, std::ostream& out) {
    const Problem p = setup_problem(c);
    const Hamiltonian O = parse_observable(c.observable, p.H.n());
    PropertyInputs in;
    in.Delta = p.Delta;
    in.eta = p.eta;
    in.eps = c.eps;
    in.O_norm = spectral_norm(O);
    in.O_norm1 = O.one_norm();
    in.vartheta = c.vartheta;
    in.k = c.k;
    in.lambda = p.H.one_norm();
    in.basis = parse_basis(c.basis);
    in.mode = parse_segment_mode(c.segments);
    FilterPlan plan = parameter_selection(in);
    plan.omega = std::isnan(c.omega) ? p.E0 : c.omega;
    apply_overrides(c, plan);

    std::vector<ShotRecord> num, den;
    const bool keep = !c.shots_out.empty();
    const auto res = estimate_observable(p.H, p.psi0, O, plan, shot_options(c), keep ? &num : nullptr,
                                         keep ? &den : nullptr);
    const auto exact = exact_N_and_D(p.es, CVector(Eigen::Map<const CVector>(p.psi0.amps.data(), p.psi0.dim())), O,
                                     plan.tau, plan.omega);
    out << fmt::format("model: {} n={} lambda={:.10g} E0={:.10g} Delta={:.6g} eta={:.6g}\n",
                       c.hamiltonian.empty() ? c.model : c.hamiltonian, p.H.n(), p.H.one_norm(), p.E0, p.Delta, p.eta);
    out << res.report.text();
    out << fmt::format("value = {:.10g}  error bound {:.3g}\n", res.value, res.error);
    out << fmt::format("exact filtered ratio = {:.10g}\n", exact.ratio());
    if (!c.out.empty())
        write_file(c.out, EstimateReport::csv_header() + "\n" + res.report.csv_row() + "\n");
    if (keep) {
        std::ostringstream os;
        os << "pool," << shot_csv_header() << "\n";
        std::ostringstream a, b;
        write_shot_csv(a, num);
        write_shot_csv(b, den);
        // drop each block's own header
        const auto na = split(a.str(), '\n'), nb = split(b.str(), '\n');
        for (std::size_t i = 1; i < na.size(); ++i) os << "N," << na[i] << "\n";
        for (std::size_t i = 1; i < nb.size(); ++i) os << "D," << nb[i] << "\n";
        write_file(c.shots_out, os.str());
    }
    if (res.report.unstable) throw UnstableRatio("denominator is within noise of zero");
    return ok;
}

int energy_search(const Config& c, std::ostream& out) {
    const Problem p = setup_problem(c);
    EnergyInputs in;
    in.Delta = p.Delta;
    in.eta = p.eta;
    in.kappa = c.kappa > 0 ? c.kappa : p.Delta / 10;
    in.vartheta = c.vartheta;
    in.k = c.k;
    in.lambda = p.H.one_norm();
    in.E_lo = std::isnan(c.e_lo) ? -in.lambda : c.e_lo;
    in.E_hi = std::isnan(c.e_hi) ? in.lambda : c.e_hi;
    in.basis = parse_basis(c.basis);
    in.mode = parse_segment_mode(c.segments);
    FilterPlan plan = energy_plan(in);
    apply_overrides(c, plan);
    const auto r = search_eigenenergy(p.H, p.psi0, plan, shot_options(c));
    out << fmt::format("model: {} n={} lambda={:.10g} Delta={:.6g} eta={:.6g} kappa={:.6g}\n",
                       c.hamiltonian.empty() ? c.model : c.hamiltonian, p.H.n(), p.H.one_norm(), p.Delta, p.eta,
                       in.kappa);
    out << plan.describe();
    out << fmt::format("E_hat = {:.10g}  (grid index {} of {}, D = {:.6g}, stderr {:.3g})\n", r.E_hat, r.index,
                       r.grid.size(), r.D[r.index], r.stderr_);
    out << fmt::format("exact E0 = {:.10g}  |E_hat - E0| = {:.3g}\n", p.E0, std::abs(r.E_hat - p.E0));
    if (!c.out.empty()) {
        std::string body = "omega,D\n";
        for (std::size_t i = 0; i < r.grid.size(); ++i) body += fmt::format("{:.17g},{:.17g}\n", r.grid[i], r.D[i]);
        write_file(c.out, body);
    }
    return ok;
}

TaskSpec task_spec(const Config& c) {
    TaskSpec s;
    s.task = parse_task(c.task);
    s.eps = c.eps;
    s.eta = c.eta > 0 ? c.eta : 0.5;
    s.vartheta = c.vartheta;
    s.k = c.k;
    s.include_sampling = c.include_sampling;
    s.lattice = c.lattice;
    s.random_trotter = c.random_trotter;
    return s;
}

double resource_gap(const Config& c, const Hamiltonian& H) {
    if (c.delta > 0) return c.delta;
    if (c.hamiltonian.empty() && (c.model == "heisenberg_xxz" || c.model == "heisenberg"))
        return heisenberg_gap_fit(H.n(), c.gap_exponent);
    if (H.n() <= kMaxDenseQubits) return diagonalize(H).gap(0);
    throw UsageError("no gap for this model; pass --delta");
}

void check_methods(const std::vector<std::string>& m) {
    if (m.empty()) throw UsageError("empty method list");
    for (const auto& x : m)
        if (std::find(known_methods().begin(), known_methods().end(), x) == known_methods().end())
            throw UsageError("unknown method '" + x + "'");
}

int resources(const Config& c, std::ostream& out) {
    check_methods(c.methods);
    const Hamiltonian H = build_hamiltonian(c);
    const CostStats st = CostStats::of(H);
    TaskSpec spec = task_spec(c);
    spec.Delta = resource_gap(c, H);
    std::vector<std::string> methods = c.methods;
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    std::string csv = sweep_csv_header() + "\n";
    for (const auto& m : methods) {
        SweepRow r;
        r.method = m;
        r.stats = st;
        r.spec = spec;
        r.cost = method_cost(m, st, spec);
        csv += sweep_csv_row(r) + "\n";
        out << fmt::format("{:<12} cnot {:>12.4g}  t {:>12.4g}  rz {:>12.4g}  ancilla {:.0f}\n", m,
                           r.cost.per_circuit.cnot, r.cost.per_circuit.t, r.cost.per_circuit.rz,
                           r.cost.per_circuit.ancilla);
        for (const auto& [name, g] : r.cost.steps)
            out << fmt::format("    {:<26} cnot {:>10.4g}  t {:>10.4g}  ancilla {:.0f}\n", name, g.cnot, g.t,
                               g.ancilla);
    }
    if (c.out.empty())
        out << csv;
    else
        write_file(c.out, csv);
    return ok;
}

int sweep(const Config& c, std::ostream& out) {
    check_methods(c.methods);
    if (c.values.empty()) throw UsageError("sweep needs --values");
    if (!std::is_sorted(c.values.begin(), c.values.end()) ||
        std::adjacent_find(c.values.begin(), c.values.end()) != c.values.end())
        throw UsageError("sweep values must be strictly ascending");
    SweepConfig cfg;
    cfg.model = c.model;
    cfg.n = c.n;
    cfg.axis = parse_sweep_axis(c.axis);
    cfg.values = c.values;
    cfg.methods = c.methods;
    std::sort(cfg.methods.begin(), cfg.methods.end());
    cfg.methods.erase(std::unique(cfg.methods.begin(), cfg.methods.end()), cfg.methods.end());
    cfg.spec = task_spec(c);
    cfg.gap_exponent = c.gap_exponent;
    cfg.gap_fit = c.delta <= 0;
    if (c.delta > 0) cfg.spec.Delta = c.delta;
    else if (cfg.axis != SweepAxis::n) cfg.spec.Delta = heisenberg_gap_fit(c.n, c.gap_exponent);
    if (!c.hamiltonian.empty()) throw UsageError("sweeps use built-in models");
    const auto rows = run_sweep(cfg);
    std::string csv = sweep_csv_header() + "\n";
    for (const auto& r : rows) csv += sweep_csv_row(r) + "\n";
    out << fmt::format("sweep over {} ({} points)\n", to_string(cfg.axis), cfg.values.size());
    for (const auto& s : sweep_slopes(rows, cfg.axis)) {
        out << fmt::format("slope {:<12} d log cnot / d log {} = {:.4f}", s.method,
                           cfg.axis == SweepAxis::eps ? "(1/eps)" : cfg.axis == SweepAxis::n ? "n" : "(lambda/Delta)",
                           s.slope);
        if (cfg.axis == SweepAxis::eps) out << fmt::format("   vs log ln(1/eps) = {:.4f}", s.slope_loglog);
        out << "\n";
    }
    if (c.out.empty())
        out << csv;
    else
        write_file(c.out, csv);
    return ok;
}

int selftest(std::ostream& out) {
    int failed = 0;
    auto line = [&](const char* what, bool pass) {
        out << (pass ? "PASS " : "FAIL ") << what << "\n";
        failed += !pass;
    };
    line("rz synthesis at 2^-10", rz_to_t(std::ldexp(1.0, -10)) == 30 && rz_to_t(std::ldexp(1.0, -10), RzSynthesis::rus) == 21);
    const auto be = block_encoding_costs(8, 5, std::ldexp(1.0, -8));
    line("prepare and reflection counts", be.prepare.cnot == 230 && be.prepare.t == 88 && be.reflection.cnot == 18);
    line("sign polynomial degree is odd", qsp_degree(0.05, 1e-3) % 2 == 1);

    Config c;
    c.params = gapped_xxz();
    c.n = 2;
    const Problem p = setup_problem(c);
    PropertyInputs in;
    in.Delta = p.Delta;
    in.eta = p.eta;
    in.eps = 0.2;
    in.lambda = p.H.one_norm();
    in.mode = SegmentMode::tight;
    FilterPlan plan = parameter_selection(in);
    plan.omega = p.E0;
    const Hamiltonian O = parse_observable("", 2);
    ShotOptions opt;
    opt.path = EstimatorPath::analytic;
    const double analytic = estimate_observable(p.H, p.psi0, O, plan, opt).value;
    const auto ex = exact_N_and_D(p.es, CVector(Eigen::Map<const CVector>(p.psi0.amps.data(), p.psi0.dim())), O,
                                  plan.tau, plan.omega);
    line("quadrature ratio matches exact filter on n=2", std::abs(analytic - ex.ratio()) < 0.05);
    opt.path = EstimatorPath::exact_overlap;
    opt.shots_override = 3000;
    opt.parallel = true;
    const auto a = estimate_observable(p.H, p.psi0, O, plan, opt).report.csv_row();
    opt.parallel = false;
    const auto b = estimate_observable(p.H, p.psi0, O, plan, opt).report.csv_row();
    line("serial and parallel shots agree", a == b);
    return failed ? failure : ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config c;
    c.params = gapped_xxz();
    // the config file sets defaults; flags parsed afterwards override it
    std::string command_from_config;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") {
            try {
                load_config(args[i + 1], c);
                std::ifstream in(args[i + 1]);
                const auto j = json::parse(in);
                if (j.contains("command")) command_from_config = j.at("command").get<std::string>();
            } catch (const std::exception& e) {
                err << "error: " << e.what() << "\n";
                return parse_error;
            }
        }

    CLI::App app{"Randomized composite-LCU spectral filter: simulation and resource estimates"};
    app.set_help_all_flag("--help-all");
    std::string config_path;
    app.add_option("--config", config_path, "JSON config; flags override its keys");
    std::string methods_csv, values_csv;
    auto shared = [&](CLI::App* s) {
        s->add_option("--model", c.model, "tfim | heisenberg_xxz | two_local");
        s->add_option("--hamiltonian", c.hamiltonian, "Pauli-sum file (overrides --model)");
        s->add_option("--n", c.n, "qubits");
        s->add_option("--eps", c.eps, "target precision");
        s->add_option("--delta", c.delta, "spectral gap (default: exact, or fitted for resources)");
        s->add_option("--eta", c.eta, "ground-state overlap (default: exact; 0.5 for resources)");
        s->add_option("--vartheta", c.vartheta, "failure probability");
        s->add_option("--k", c.k, "Trotter half-order");
        s->add_option("--shots", c.shots, "shots per pool (default: plan)");
        s->add_option("--seed", c.seed, "64-bit seed");
        s->add_option("--out", c.out, "CSV output path");
        s->add_option("--basis", c.basis, "pauli | symmetry");
        s->add_option("--mode", c.mode, "sampled | exact_overlap | analytic");
        s->add_option("--threads", c.threads, "OpenMP threads (0: runtime default)");
        s->add_option("--jx", c.params.Jx);
        s->add_option("--jy", c.params.Jy);
        s->add_option("--jz", c.params.Jz);
        s->add_option("--hx", c.params.hx);
        s->add_option("--c", c.params.c, "boundary field coefficient");
        s->add_option("--J", c.params.J);
        s->add_option("--field", c.params.h, "transverse field h");
        s->add_option("--config", config_path, "JSON config; flags override its keys");
    };
    auto* sim = app.add_subcommand("simulate-observable", "estimate <u0|O|u0> with the sampled filter");
    shared(sim);
    sim->add_option("--observable", c.observable, "c*LABEL+... (default Z on qubits 1, 2)");
    sim->add_option("--initial-state", c.initial_state, "amplitude file");
    sim->add_option("--omega", c.omega, "filter centre (default exact E0)");
    sim->add_option("--segments", c.segments, "general | adaptive | tight");
    sim->add_option("--tau", c.tau);
    sim->add_option("--x-c", c.x_c);
    sim->add_option("--s-c", c.s_c);
    sim->add_option("--shots-out", c.shots_out, "per-shot CSV");
    auto* en = app.add_subcommand("energy-search", "argmax of D(omega) over a grid");
    shared(en);
    en->add_option("--kappa", c.kappa, "energy resolution (default delta/10)");
    en->add_option("--e-lo", c.e_lo);
    en->add_option("--e-hi", c.e_hi);
    en->add_option("--initial-state", c.initial_state, "amplitude file");
    en->add_option("--segments", c.segments, "general | adaptive | tight");
    en->add_option("--tau", c.tau);
    en->add_option("--x-c", c.x_c);
    en->add_option("--s-c", c.s_c);
    auto* res = app.add_subcommand("resources", "gate counts per method");
    shared(res);
    res->add_option("--methods", methods_csv, "comma list: rlcu,qpe-trotter,qpe-qw,qsp,qetu");
    res->add_option("--task", c.task, "property | energy");
    res->add_flag("--lattice", c.lattice, "lattice segment count for rlcu");
    res->add_flag("--include-sampling", c.include_sampling, "report totals over repetitions");
    res->add_flag("--random-trotter", c.random_trotter, "randomized Trotter bound for baselines");
    res->add_option("--gap-exponent", c.gap_exponent, "exponent of the fitted gap (0: fit)");
    auto* sw = app.add_subcommand("sweep", "gate counts along one axis");
    shared(sw);
    sw->add_option("--methods", methods_csv, "comma list");
    sw->add_option("--task", c.task, "property | energy");
    sw->add_option("--axis", c.axis, "n | eps | Delta");
    sw->add_option("--values", values_csv, "ascending comma list");
    sw->add_flag("--lattice", c.lattice);
    sw->add_flag("--include-sampling", c.include_sampling);
    sw->add_flag("--random-trotter", c.random_trotter);
    sw->add_option("--gap-exponent", c.gap_exponent, "exponent of the fitted gap (0: fit)");
    auto* st = app.add_subcommand("selftest", "quick internal consistency checks");
    app.require_subcommand(0, 1);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return parse_error;
    }
    try {
        if (!methods_csv.empty()) c.methods = split(methods_csv, ',');
        else if (res->count("--methods") || sw->count("--methods")) c.methods.clear();
        if (!values_csv.empty()) {
            c.values.clear();
            for (const auto& v : split(values_csv, ',')) {
                try {
                    c.values.push_back(std::stod(v));
                } catch (const std::exception&) {
                    throw UsageError("bad sweep value '" + v + "'");
                }
            }
        }
        if (c.threads > 0) omp_set_num_threads(c.threads);
        std::string cmd = command_from_config;
        for (auto* s : app.get_subcommands()) cmd = s->get_name();
        if (cmd == "simulate-observable") return simulate_observable(c, out);
        if (cmd == "energy-search") return energy_search(c, out);
        if (cmd == "resources") return resources(c, out);
        if (cmd == "sweep") return sweep(c, out);
        if (cmd == "selftest") return selftest(out);
        (void)st;
        err << app.help();
        return parse_error;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return parse_error;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return parse_error;
    } catch (const InfeasiblePlan& e) {
        err << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const UnstableRatio& e) {
        err << "unstable: " << e.what() << "\n";
        return unstable;
    } catch (const NoPeak& e) {
        err << "unstable: " << e.what() << "\n";
        return unstable;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return parse_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return failure;
    }
}

}  // namespace rlcu::cli
