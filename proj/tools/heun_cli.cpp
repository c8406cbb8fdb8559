// Command-line front end: every computation of the library behind one binary
// with machine-readable JSON/CSV output.

#include "heun/bethe.hpp"
#include "heun/errors.hpp"
#include "heun/heun_bridge.hpp"
#include "heun/invariant_space.hpp"
#include "heun/perturbation.hpp"
#include "heun/spectral_curve.hpp"
#include "heun/trig_spectrum.hpp"
#include "heun/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using json = nlohmann::ordered_json;
using namespace heun;

namespace {

// All numeric output carries 15 significant digits.
double num15(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return std::strtod(buf, nullptr);
}

json jnum(double x) { return json(num15(x)); }
json jcomplex(Complex z) { return json::array({num15(z.real()), num15(z.imag())}); }

json jcomplex_list(const std::vector<Complex>& v) {
    json out = json::array();
    for (Complex z : v) out.push_back(jcomplex(z));
    return out;
}

json jpoly(const Poly& p) { return jcomplex_list(p); }

Complex parse_complex(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw CLI::ValidationError("complex", "empty complex literal");
    if (s.back() != 'i' && s.back() != 'I') return Complex(std::stod(s), 0.0);
    s.pop_back();
    // split at the last +/- that is not part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) {
        if (s.empty() || s == "+") return Complex(0.0, 1.0);
        if (s == "-") return Complex(0.0, -1.0);
        return Complex(0.0, std::stod(s));
    }
    const std::string re = s.substr(0, split);
    std::string im = s.substr(split);
    if (im == "+") im = "1";
    if (im == "-") im = "-1";
    return Complex(std::stod(re), std::stod(im));
}

struct LatticeOpts {
    std::string tau_str;
    double p_nome = 0.0;
    bool has_p = false;

    void attach(CLI::App* cmd) {
        auto* t = cmd->add_option("--tau", tau_str, "lattice ratio tau as 'a+bi', Im tau > 0");
        auto* p = cmd->add_option("--p", p_nome, "elliptic nome p in (0,1)");
        t->excludes(p);
        p->excludes(t);
        cmd->callback([this, t, p]() { has_p = p->count() > 0; if (!t->count() && !has_p)
            throw CLI::RequiredError("exactly one of --tau/--p"); });
    }
    Lattice lattice() const {
        if (has_p) return Lattice::from_nome(Complex(p_nome));
        return Lattice::from_tau(parse_complex(tau_str));
    }
    json describe() const {
        json j;
        if (has_p) j["p"] = jnum(p_nome);
        else j["tau"] = jcomplex(parse_complex(tau_str));
        return j;
    }
};

Couplings parse_couplings(const std::string& ls) {
    std::array<int, 4> v{};
    std::stringstream ss(ls);
    std::string tok;
    int n = 0;
    while (std::getline(ss, tok, ',')) {
        if (n >= 4) throw CLI::ValidationError("--l", "expected four comma-separated integers");
        v[static_cast<std::size_t>(n++)] = std::stoi(tok);
    }
    if (n != 4) throw CLI::ValidationError("--l", "expected four comma-separated integers");
    return Couplings(v[0], v[1], v[2], v[3]);
}

// Output written atomically: temp file in the target directory, then rename.
void emit(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << body;
    }
    fs::rename(tmp, target);
}

json error_object(const std::exception& e) {
    std::string type = "Error";
    if (dynamic_cast<const NonConvergent*>(&e)) type = "NonConvergent";
    else if (dynamic_cast<const NoConvergence*>(&e)) type = "NoConvergence";
    else if (dynamic_cast<const PoleAt*>(&e)) type = "PoleAt";
    else if (dynamic_cast<const DomainError*>(&e)) type = "DomainError";
    else if (dynamic_cast<const DegenerateLattice*>(&e)) type = "DegenerateLattice";
    else if (dynamic_cast<const IllConditioned*>(&e)) type = "IllConditioned";
    else if (dynamic_cast<const AmbiguousNullspace*>(&e)) type = "AmbiguousNullspace";
    else if (dynamic_cast<const InterpolationInconsistent*>(&e)) type = "InterpolationInconsistent";
    else if (dynamic_cast<const SpectralDegenerate*>(&e)) type = "SpectralDegenerate";
    else if (dynamic_cast<const InconsistentState*>(&e)) type = "InconsistentState";
    else if (dynamic_cast<const MaxIterations*>(&e)) type = "MaxIterations";
    else if (dynamic_cast<const SingularJacobian*>(&e)) type = "SingularJacobian";
    else if (dynamic_cast<const PathLost*>(&e)) type = "PathLost";
    else if (dynamic_cast<const DenominatorZero*>(&e)) type = "DenominatorZero";
    else if (dynamic_cast<const RootCollision*>(&e)) type = "RootCollision";
    else if (dynamic_cast<const ResidualTooLarge*>(&e)) type = "ResidualTooLarge";
    else if (dynamic_cast<const NotProportional*>(&e)) type = "NotProportional";
    else if (dynamic_cast<const CutoffTooSmall*>(&e)) type = "CutoffTooSmall";
    return json{{"type", type}, {"message", e.what()}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-gap spectra of the Heun equation in elliptic form"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_path;
    std::string format = "json";
    unsigned seed = 0;
    double tol = 1e-12;
    app.add_option("--output", out_path, "output file (default: stdout)")->capture_default_str();
    app.add_option("--format", format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", seed, "seed for deterministic sampling")->capture_default_str();
    app.add_option("--tol", tol, "refinement tolerance")->check(CLI::Range(1e-14, 1e-4));

    std::string l_str = "0,0,0,0";
    int l0 = 0, l1 = 0, mode_m = 0, order_k = 3, steps = 8;
    double p_target = 0.01;
    std::string energy_str = "1";
    std::string suite = "all";

    LatticeOpts lat_scheme, lat_qpoly, lat_bethe, lat_spectrum;

    auto* cmd_scheme = app.add_subcommand("scheme", "Riemann scheme of the Heun form");
    cmd_scheme->add_option("--l", l_str, "couplings l0,l1,l2,l3")->required();
    lat_scheme.attach(cmd_scheme);

    auto* cmd_dim = app.add_subcommand("dim", "dimension of the invariant subspace");
    cmd_dim->add_option("--l", l_str, "couplings l0,l1,l2,l3")->required();

    auto* cmd_qpoly = app.add_subcommand("qpoly", "spectral polynomial Q(E)");
    cmd_qpoly->add_option("--l", l_str, "couplings l0,l1,l2,l3")->required();
    lat_qpoly.attach(cmd_qpoly);

    auto* cmd_tqpoly = app.add_subcommand("trig-qpoly", "trigonometric limit of Q(E)");
    cmd_tqpoly->add_option("--l0", l0, "coupling l0")->required();
    cmd_tqpoly->add_option("--l1", l1, "coupling l1")->required();

    auto* cmd_bethe = app.add_subcommand("bethe", "extract and refine a Bethe state at E");
    cmd_bethe->add_option("--l", l_str, "couplings l0,l1,l2,l3")->required();
    cmd_bethe->add_option("--energy", energy_str, "energy E as 'a+bi'")->required();
    lat_bethe.attach(cmd_bethe);

    auto* cmd_tbethe = app.add_subcommand("trig-bethe", "trigonometric Bethe state");
    cmd_tbethe->add_option("--l0", l0, "coupling l0")->required();
    cmd_tbethe->add_option("--l1", l1, "coupling l1")->required();
    cmd_tbethe->add_option("--m", mode_m, "mode index")->required();

    auto* cmd_spectrum = app.add_subcommand("spectrum", "Q roots vs Hamiltonian eigenvalues");
    cmd_spectrum->add_option("--l", l_str, "couplings l0,l1,l2,l3")->required();
    lat_spectrum.attach(cmd_spectrum);

    auto* cmd_cont = app.add_subcommand("continue", "nome continuation of one mode");
    cmd_cont->add_option("--l0", l0, "coupling l0")->required();
    cmd_cont->add_option("--l1", l1, "coupling l1")->required();
    cmd_cont->add_option("--m", mode_m, "mode index")->required();
    cmd_cont->add_option("--p", p_target, "target nome, <= 0.05")->required();
    cmd_cont->add_option("--steps", steps, "continuation steps")->capture_default_str();

    auto* cmd_pert = app.add_subcommand("perturb", "Rayleigh-Schrodinger series of one mode");
    cmd_pert->add_option("--l0", l0, "coupling l0")->required();
    cmd_pert->add_option("--l1", l1, "coupling l1")->required();
    cmd_pert->add_option("--m", mode_m, "mode index")->required();
    cmd_pert->add_option("--order", order_k, "series order K")->capture_default_str();

    auto* cmd_verify = app.add_subcommand("verify", "run an invariant suite");
    cmd_verify->add_option("--suite", suite, "elliptic|bridge|invariant|spectral|bethe|trig|perturb|all")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 2;
    }

    json out;
    json inputs;
    int rc = 0;

    try {
        if (format == "csv" && !cmd_cont->parsed())
            throw DomainError("csv output is only available for path outputs (continue)");

        if (cmd_scheme->parsed()) {
            const Couplings c = parse_couplings(l_str);
            const Lattice lat = lat_scheme.lattice();
            inputs = lat_scheme.describe();
            inputs["l"] = c.l;
            const auto rs = riemann_scheme(c, lattice_constants(lat));
            out["command"] = "scheme";
            out["inputs"] = inputs;
            json pts = json::array();
            for (auto z : rs.points) pts.push_back(jcomplex(z));
            json exps = json::array();
            for (const auto& pr : rs.exponents)
                exps.push_back(json::array({jnum(to_double(pr[0])), jnum(to_double(pr[1]))}));
            out["outputs"] = {{"points", pts},
                              {"exponents", exps},
                              {"fuchs_sum", jnum(to_double(rs.fuchs_sum()))}};
            out["diagnostics"] = json::array();
        } else if (cmd_dim->parsed()) {
            const Couplings c = parse_couplings(l_str);
            inputs["l"] = c.l;
            const auto sp = parity_basis(c);
            out["command"] = "dim";
            out["inputs"] = inputs;
            json classes = json::array();
            for (const auto& pc : sp.classes)
                classes.push_back(json{{"epsilon", pc.epsilon}, {"alpha", pc.alpha},
                                       {"d", pc.d}, {"dim", pc.dim()}});
            out["outputs"] = {{"dimension", invariant_dimension(c)}, {"classes", classes}};
            out["diagnostics"] = json::array();
        } else if (cmd_qpoly->parsed()) {
            const Couplings c = parse_couplings(l_str);
            const Lattice lat = lat_qpoly.lattice();
            inputs = lat_qpoly.describe();
            inputs["l"] = c.l;
            inputs["seed"] = seed;
            const auto sp = q_polynomial(c, lat, seed);
            out["command"] = "qpoly";
            out["inputs"] = inputs;
            out["outputs"] = {{"coefficients", jpoly(sp.Q)},
                              {"g", sp.g},
                              {"roots", jcomplex_list(all_roots(sp.Q))}};
            out["diagnostics"] = sp.diagnostics;
        } else if (cmd_tqpoly->parsed()) {
            inputs["l0"] = l0;
            inputs["l1"] = l1;
            const auto sp = trig_q_polynomial(l0, l1);
            json roots = json::array();
            for (const auto& [r, mult] : trig_q_roots_over_pi2(l0, l1))
                roots.push_back(json{{"value", jnum(pi * pi * to_double(r))},
                                     {"over_pi2", jnum(to_double(r))},
                                     {"multiplicity", mult}});
            out["command"] = "trig-qpoly";
            out["inputs"] = inputs;
            out["outputs"] = {{"coefficients", jpoly(sp.Q)}, {"g", sp.g}, {"roots", roots}};
            out["diagnostics"] = json::array();
        } else if (cmd_bethe->parsed()) {
            const Couplings c = parse_couplings(l_str);
            const Lattice lat = lat_bethe.lattice();
            const Complex E = parse_complex(energy_str);
            inputs = lat_bethe.describe();
            inputs["l"] = c.l;
            inputs["energy"] = jcomplex(E);
            inputs["tol"] = jnum(tol);
            inputs["seed"] = seed;

            XiRepresentation xi = xi_polynomials(c, lat, seed);
            SpectralPolynomial q = q_polynomial(c, lat, seed);
            BetheState s = extract_bethe_roots(xi, E, lat, q);
            if (lat.normalized() && !s.t.empty()) s = newton_refine(s, BetheForm::theta, tol);
            auto [m1, m3] = monodromy_multipliers(s);

            out["command"] = "bethe";
            out["inputs"] = inputs;
            json rows_sigma = json::array(), rows_theta = json::array();
            for (double r : bethe_residual(s, BetheForm::sigma)) rows_sigma.push_back(jnum(r));
            if (lat.normalized())
                for (double r : bethe_residual(s, BetheForm::theta)) rows_theta.push_back(jnum(r));
            out["outputs"] = {{"t", jcomplex_list(s.t)},
                              {"c_sigma", jcomplex(s.csigma)},
                              {"c_theta", lat.normalized() ? jcomplex(s.ctheta()) : json()},
                              {"E_sigma", jcomplex(bethe_energy(s, BetheForm::sigma))},
                              {"E_theta", lat.normalized() ? jcomplex(bethe_energy(s, BetheForm::theta)) : json()},
                              {"residual_sigma", rows_sigma},
                              {"residual_theta", rows_theta},
                              {"monodromy", json::array({jcomplex(m1), jcomplex(m3)})}};
            out["diagnostics"] = xi.diagnostics;
        } else if (cmd_tbethe->parsed()) {
            inputs["l0"] = l0;
            inputs["l1"] = l1;
            inputs["m"] = mode_m;
            const auto ts = trig_bethe_state(l0, l1, mode_m);
            json sig = json::array();
            for (const auto& s : ts.sigma) sig.push_back(jnum(to_double(s)));
            json rows = json::array();
            for (double r : trig_bethe_residual(l0, l1, ts.T, to_double(ts.c))) rows.push_back(jnum(r));
            out["command"] = "trig-bethe";
            out["inputs"] = inputs;
            out["outputs"] = {{"c", jnum(to_double(ts.c))},
                              {"sigma", sig},
                              {"T", jcomplex_list(ts.T)},
                              {"E", jnum(ts.E)},
                              {"residuals", rows}};
            out["diagnostics"] = json::array();
        } else if (cmd_spectrum->parsed()) {
            const Couplings c = parse_couplings(l_str);
            const Lattice lat = lat_spectrum.lattice();
            inputs = lat_spectrum.describe();
            inputs["l"] = c.l;
            inputs["seed"] = seed;
            const auto sp = q_polynomial(c, lat, seed);
            auto qroots = all_roots(sp.Q);
            auto eig = hamiltonian_eigenvalues(parity_basis(c), lat, seed);
            auto by_re = [](Complex a, Complex b) {
                if (a.real() != b.real()) return a.real() < b.real();
                return a.imag() < b.imag();
            };
            std::sort(qroots.begin(), qroots.end(), by_re);
            std::sort(eig.begin(), eig.end(), by_re);
            const double worst =
                qroots.size() == eig.size() ? multiset_match_error(qroots, eig) : 1e300;
            out["command"] = "spectrum";
            out["inputs"] = inputs;
            out["outputs"] = {{"q_roots", jcomplex_list(qroots)},
                              {"eigenvalues", jcomplex_list(eig)},
                              {"degree", static_cast<int>(qroots.size())},
                              {"dimension", invariant_dimension(c)},
                              {"max_abs_diff", jnum(worst)}};
            out["diagnostics"] = sp.diagnostics;
        } else if (cmd_cont->parsed()) {
            inputs["l0"] = l0;
            inputs["l1"] = l1;
            inputs["m"] = mode_m;
            inputs["p"] = jnum(p_target);
            inputs["steps"] = steps;
            inputs["seed"] = seed;
            const auto path = continue_in_p(l0, l1, mode_m, p_target, steps, seed);
            if (format == "csv") {
                std::ostringstream csv;
                csv << "p,E_re,E_im,c_theta_re,c_theta_im,residual_theta\n";
                char buf[256];
                for (const auto& pt : path) {
                    std::snprintf(buf, sizeof(buf), "%.15g,%.15g,%.15g,%.15g,%.15g,%.15g\n", pt.p,
                                  pt.E.real(), pt.E.imag(), pt.c_theta.real(), pt.c_theta.imag(),
                                  pt.residual_theta);
                    csv << buf;
                }
                emit(out_path, csv.str());
                return 0;
            }
            json pts = json::array();
            for (const auto& pt : path)
                pts.push_back(json{{"p", jnum(pt.p)},
                                   {"E", jcomplex(pt.E)},
                                   {"t", jcomplex_list(pt.t)},
                                   {"c_theta", jcomplex(pt.c_theta)},
                                   {"residual_theta", jnum(pt.residual_theta)}});
            out["command"] = "continue";
            out["inputs"] = inputs;
            out["outputs"] = {{"path", pts}};
            out["diagnostics"] = json::array();
        } else if (cmd_pert->parsed()) {
            inputs["l0"] = l0;
            inputs["l1"] = l1;
            inputs["m"] = mode_m;
            inputs["order"] = order_k;
            const auto ps = rayleigh_schrodinger(l0, l1, mode_m, order_k);
            json ecoef = json::array();
            for (double e : ps.Ecoef) ecoef.push_back(jnum(e));
            json table = json::array();
            for (int k = 1; k <= ps.K; ++k) {
                json row = json::array();
                for (int mp = 0; mp <= ps.M; ++mp) {
                    const double v = ps.orders[static_cast<std::size_t>(k)][static_cast<std::size_t>(mp)];
                    if (v != 0.0) row.push_back(json::array({mp, jnum(v)}));
                }
                table.push_back(row);
            }
            out["command"] = "perturb";
            out["inputs"] = inputs;
            out["outputs"] = {{"E0", jnum(ps.E0)},
                              {"E_coefficients", ecoef},
                              {"eigenvector_table", table},
                              {"cutoff", ps.M}};
            out["diagnostics"] = json::array();
        } else if (cmd_verify->parsed()) {
            inputs["suite"] = suite;
            inputs["seed"] = seed;
            const auto results = run_suite(suite, seed);
            json checks = json::array();
            for (const auto& r : results) {
                std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
                if (!r.detail.empty()) std::cerr << " (" << r.detail << ")";
                std::cerr << "\n";
                checks.push_back(json{{"name", r.name},
                                      {"pass", r.pass},
                                      {"worst", jnum(r.worst)},
                                      {"bound", jnum(r.bound)},
                                      {"detail", r.detail}});
            }
            out["command"] = "verify";
            out["inputs"] = inputs;
            out["outputs"] = {{"checks", checks}, {"all_passed", all_passed(results)}};
            out["diagnostics"] = json::array();
            if (!all_passed(results)) rc = 1;
        }
    } catch (const std::exception& e) {
        out["command"] = app.get_subcommands().empty() ? "" : app.get_subcommands()[0]->get_name();
        out["inputs"] = inputs;
        out["error"] = error_object(e);
        emit(out_path, out.dump(2) + "\n");
        return 1;
    }

    emit(out_path, out.dump(2) + "\n");
    return rc;
}
