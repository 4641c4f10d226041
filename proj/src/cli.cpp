#include "besovkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "besovkit/config.hpp"
#include "besovkit/cover.hpp"
#include "besovkit/extend.hpp"
#include "besovkit/geometry.hpp"
#include "besovkit/interp.hpp"
#include "besovkit/norms.hpp"

namespace besovkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> refine;
};

struct Run {
    ExperimentConfig cfg;
    Domain dom;
    fs::path out;
    std::string tag;  // header comment shared by every CSV of the run

    double spacing() const {
        if (dom.space->is_grid()) return dom.space->lattice()->spacing;
        return dom.space->min_separation();
    }
    TGrid t_grid() const {
        const double lo = cfg.t_min > 0 ? cfg.t_min : 2.0 * spacing();
        return dyadic_t_grid(lo, 1.0);
    }
};

Run prepare(const Options& opt) {
    Run r;
    r.cfg = load_config(opt.config);
    if (opt.seed) r.cfg.seed = *opt.seed;
    if (opt.refine) r.cfg.refine = *opt.refine;
    r.dom = build_domain(r.cfg.domain, r.cfg.refine);
    r.out = opt.out.empty() ? fs::path(r.cfg.output) : fs::path(opt.out);
    fs::create_directories(r.out);
    r.tag = params_tag(r.cfg.params) + " seed=" + std::to_string(r.cfg.seed) + " refine=" +
            std::to_string(r.cfg.refine) + " domain=" + r.dom.description;
    return r;
}

std::string fmt(double v) { return format_double(v); }

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Relative comparison a <= b with the chain tolerance.
bool leq(double a, double b) { return a <= b + 1e-12 * std::max(std::abs(a), std::abs(b)); }

int cmd_norms(const Run& r) {
    const auto S = r.dom.subset();
    const auto& X = *r.dom.space;
    const auto& sp = r.cfg.params;
    const TGrid grid = r.t_grid();
    const std::string ptag = params_tag(sp);
    CsvWriter csv(r.out / "norms.csv", r.tag, {"function", "variant", "value", "params", "chain_ok"});

    bool all_ok = true;
    for (const auto& spec : r.cfg.functions) {
        const Function u = evaluate(spec, X, r.cfg.seed);
        HajlaszOptions ho;
        ho.exact = S.count() <= ho.cap;
        ho.padded = true;
        const NormReport rep = hajlasz_norms(u, S, sp, ho);
        std::vector<std::pair<std::string, double>> rows = rep.values;

        // homogeneous parts (*_semi) plus the full norms Lp + semi
        const double lp = rep.get("Lp");
        const ModulusProfile prof = modulus_profile(u, S, sp.p, grid);
        const double hatB = t_integral(prof.ep_hat, grid, sp.s, sp.q);
        const double calB = t_integral(prof.ep, grid, sp.s, sp.q);
        rows.emplace_back("hatB_semi", hatB);
        rows.emplace_back("calB_semi", calB);
        bool ok = leq(hatB, calB);
        if (X.is_grid()) {
            const double B = t_integral(prof.omega, grid, sp.s, sp.q);
            rows.emplace_back("B_semi", B);
            rows.emplace_back("B", lp + B);
            ok = ok && leq(calB, B);
        }
        rows.emplace_back("hatB", lp + hatB);
        rows.emplace_back("calB", lp + calB);
        if (sp.r < std::min(sp.p, sp.q)) {
            const double calF = lp_norm(tl_inner(u, S, sp, TLVariant::calF, grid, r.cfg.tau), S, sp.p);
            const double hatF = lp_norm(tl_inner(u, S, sp, TLVariant::hatF, grid, r.cfg.tau), S, sp.p);
            const double C = lp_norm(tl_inner(u, S, sp, TLVariant::C, grid, r.cfg.tau), S, sp.p);
            rows.emplace_back("hatF_semi", hatF);
            rows.emplace_back("calF_semi", calF);
            rows.emplace_back("C_semi", C);
            rows.emplace_back("hatF", lp + hatF);
            rows.emplace_back("calF", lp + calF);
            rows.emplace_back("C", lp + C);
            ok = ok && leq(hatF, calF);
        }
        if (std::isfinite(sp.p)) rows.emplace_back("Lorentz", lorentz_norm(u, S, sp.p, std::isfinite(sp.q) ? sp.q : kInf));
        all_ok = all_ok && ok;
        for (const auto& [name, v] : rows) csv.row({spec.name, name, fmt(v), ptag, ok ? "1" : "0"});
    }
    csv.save();
    if (!all_ok) std::cerr << "norm chain violated\n";
    return all_ok ? 0 : 1;
}

json cover_json(const WhitneyCover& c) {
    json j;
    j["centers"] = c.centers;
    j["radii"] = c.radii;
    j["reflected"] = c.reflected;
    j["overlap_bound"] = c.overlap_bound;
    j["small_threshold"] = c.small_threshold;
    j["small_count"] = c.small.size();
    return j;
}

int cmd_extend(const Run& r) {
    const auto S = r.dom.subset();
    const auto& X = *r.dom.space;
    const auto& sp = r.cfg.params;

    CsvWriter csv(r.out / "extend.csv", r.tag,
                  {"function", "restriction_exact", "validity_tilde", "violations_tilde", "validity_final",
                   "violations_final", "ratio_tl_gradient", "ratio_besov_gradient", "ratio_lp", "ratio_besov_norm"});
    json dump;
    dump["version"] = kVersion;
    dump["header"] = r.tag;
    bool ok = true;

    auto one = [&](const std::string& name, const Function& u, bool record) {
        const ExtensionResult res = extend(u, S, sp, r.cfg.extension);
        if (res.outside_v > 0) throw GeometryError("complement not covered by V");
        bool exact = true;
        for (PointId x = 0; x < X.size(); ++x)
            if (S.contains(x) && res.Eu[x] != u[x]) exact = false;
        const auto ratios = extension_ratios(res, u, S, sp);
        ok = ok && exact && res.validity_tilde.violations == 0 && res.validity_final.violations == 0;
        if (record) {
            csv.row({name, exact ? "1" : "0", fmt(res.validity_tilde.constant),
                     std::to_string(res.validity_tilde.violations), fmt(res.validity_final.constant),
                     std::to_string(res.validity_final.violations), fmt(ratios.tl_gradient),
                     fmt(ratios.besov_gradient), fmt(ratios.lp), fmt(ratios.besov_norm)});
            if (!dump.contains("cover")) dump["cover"] = cover_json(res.cover);
            dump["functions"][name] = {{"restriction_exact", exact},
                                       {"validity_tilde", res.validity_tilde.constant},
                                       {"validity_final", res.validity_final.constant},
                                       {"violations", res.validity_tilde.violations + res.validity_final.violations},
                                       {"k_L", res.cut.k_L}};
        }
        return ratios;
    };

    for (const auto& spec : r.cfg.functions) one(spec.name, evaluate(spec, X, r.cfg.seed), true);

    if (r.cfg.corpus > 0) {
        std::vector<double> tl, bg, lp, bn;
        for (std::size_t i = 0; i < r.cfg.corpus; ++i) {
            FunctionSpec spec;
            spec.name = "corpus_" + std::to_string(i);
            spec.kind = "random_smooth";
            spec.seed = 1000 + i;
            const auto ratios = one(spec.name, evaluate(spec, X, r.cfg.seed), false);
            tl.push_back(ratios.tl_gradient);
            bg.push_back(ratios.besov_gradient);
            lp.push_back(ratios.lp);
            bn.push_back(ratios.besov_norm);
        }
        CsvWriter sum(r.out / "extend_summary.csv", r.tag,
                      {"count", "tl_gradient_max", "tl_gradient_median", "besov_gradient_max", "besov_gradient_median",
                       "lp_max", "lp_median", "besov_norm_max", "besov_norm_median"});
        auto mx = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
        sum.row({std::to_string(r.cfg.corpus), fmt(mx(tl)), fmt(median_of(tl)), fmt(mx(bg)), fmt(median_of(bg)),
                 fmt(mx(lp)), fmt(median_of(lp)), fmt(mx(bn)), fmt(median_of(bn))});
        sum.save();
    }
    dump["ok"] = ok;
    csv.save();
    write_file(r.out / "extend.json", dump.dump(2) + "\n");
    if (!ok) std::cerr << "extension check failed\n";
    return ok ? 0 : 1;
}

int cmd_density(const Run& r) {
    const auto S = r.dom.subset();
    const double h = r.spacing();
    const double r_min = r.cfg.density_r_min.value_or(2.0 * h);
    const auto radii = log_radii(r_min, r.cfg.density_r_max, r.cfg.per_decade);
    const DensityReport rep = check_measure_density(S, r.cfg.c_m, radii);
    json j;
    j["version"] = kVersion;
    j["header"] = r.tag;
    j["passed"] = rep.passed;
    j["worst_ratio"] = rep.worst_ratio;
    j["witness"] = rep.witness;
    if (r.dom.space->has_coordinates()) {
        const auto c = r.dom.space->coords(rep.witness);
        j["witness_coords"] = std::vector<double>(c.begin(), c.end());
    }
    j["witness_radius"] = rep.witness_radius;
    j["c_m"] = rep.c_m;
    j["r_min"] = rep.r_min;
    j["r_max"] = rep.r_max;
    j["radii"] = radii.size();
    j["per_decade"] = r.cfg.per_decade;
    j["pairs_tested"] = rep.pairs_tested;
    j["pairs_skipped"] = rep.pairs_skipped;
    j["note"] = "certified only at the sampled radii";
    write_file(r.out / "density.json", j.dump(2) + "\n");
    return 0;
}

// The K-functional works on S as a space in its own right.
struct Induced {
    MetricMeasureSpace space;
    std::vector<PointId> ids;
};

Induced induced(const Run& r) {
    auto [space, ids] = r.dom.subset().induced_space();
    return {std::move(space), std::move(ids)};
}

Function restrict(const Function& u, const std::vector<PointId>& ids) {
    Function out(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) out[i] = u[ids[i]];
    return out;
}

int cmd_kfunc(const Run& r) {
    const auto ind = induced(r);
    const auto& sp = r.cfg.params;
    CsvWriter csv(r.out / "kfunc.csv", r.tag,
                  {"function", "t", "ep", "lower", "achieved", "upper", "certified", "overlap"});
    for (const auto& spec : r.cfg.functions) {
        const Function f = restrict(evaluate(spec, *r.dom.space, r.cfg.seed), ind.ids);
        const KProfile k = k_profile(f, ind.space, sp.p, r.cfg.k_scales);
        for (std::size_t i = 0; i < k.t.size(); ++i)
            csv.row({spec.name, fmt(k.t[i]), fmt(k.ep[i]), fmt(k.lower[i]), fmt(k.achieved[i]), fmt(k.upper[i]),
                     fmt(k.certified[i]), std::to_string(k.overlap[i])});
    }
    csv.save();
    return 0;
}

int cmd_embed(const Run& r) {
    const auto S = r.dom.subset();
    const auto& sp = r.cfg.params;
    double Q = 0.0;
    if (r.cfg.q_dimension) {
        Q = *r.cfg.q_dimension;
    } else {
        const double h = r.spacing();
        const auto radii = log_radii(4.0 * h, 0.5, 16);
        if (radii.size() < 2) throw ConfigError("domain too coarse to estimate Q; set embed.Q");
        Q = estimate_constants(*r.dom.space, radii).q_estimate;
    }
    if (!(sp.s * sp.p < Q)) throw ConfigError("supercritical; embedding check not applicable");
    CsvWriter csv(r.out / "embed.csv", r.tag + " Q=" + fmt(Q),
                  {"function", "lhs", "rhs", "ratio", "p_star", "c_best", "lhs_weak", "nesting_bound"});
    for (const auto& spec : r.cfg.functions) {
        const Function u = evaluate(spec, *r.dom.space, r.cfg.seed);
        const auto e = lorentz_embedding_check(u, S, sp.s, sp.p, sp.q, Q);
        csv.row({spec.name, fmt(e.lhs), fmt(e.rhs), fmt(e.ratio), fmt(e.p_star), fmt(e.c_best), fmt(e.lhs_weak),
                 fmt(e.nesting_bound)});
    }
    csv.save();
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"besovkit: fractional smoothness norms, extensions and interpolation on finite metric spaces"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;
    int refine = 0;
    auto add_flags = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
        sub->add_option("--out", opt.out, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "run seed (overrides the config)");
        sub->add_option("--refine", refine, "halve the grid spacing this many times")->check(CLI::Range(0, 6));
    };
    struct Command {
        const char* name;
        const char* help;
        int (*fn)(const Run&);
    };
    const Command commands[] = {
        {"norms", "all Besov and Triebel-Lizorkin variants per function", cmd_norms},
        {"extend", "extend functions off S and check the gradient", cmd_extend},
        {"density", "lower measure density of S across scales", cmd_density},
        {"kfunc", "K-functional profile on the induced space of S", cmd_kfunc},
        {"embed", "Lorentz embedding ratio for subcritical sp < Q", cmd_embed}};
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_flags(sub);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            if (subs[i]->count("--seed")) opt.seed = seed;
            if (subs[i]->count("--refine")) opt.refine = refine;
            const Run r = prepare(opt);
            return commands[i].fn(r);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace besovkit
