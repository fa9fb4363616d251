#include "tmx/config.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tmx/output.hpp"

namespace tmx {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string RunConfig::to_text() const {
    std::ostringstream o;
    o << "command = " << command << "\n";
    o << "mesh.kind = " << mesh_kind << "\n";
    o << "mesh.level = " << mesh_level << "\n";
    o << "mesh.width = " << fmt17(mesh_width) << "\n";
    o << "mesh.height = " << fmt17(mesh_height) << "\n";
    o << "mesh.nx = " << mesh_nx << "\n";
    o << "mesh.ny = " << mesh_ny << "\n";
    o << "mesh.path = " << mesh_path << "\n";
    o << "mesh.refine = " << mesh_refine << "\n";
    o << "params.lambda = " << fmt17(lambda) << "\n";
    o << "params.p = " << fmt17(p) << "\n";
    o << "params.variant = " << variant << "\n";
    o << "solver.cg_tol = " << fmt17(cg_tol) << "\n";
    o << "solver.el_tol = " << fmt17(el_tol) << "\n";
    o << "solver.max_iters = " << max_iters << "\n";
    o << "seeds.spec = " << seeds << "\n";
    o << "rng.seed = " << rng_seed << "\n";
    o << "potential.stride = " << stride << "\n";
    o << "bubble.eps = " << fmt17(eps) << "\n";
    o << "bubble.has_center = " << (has_center ? 1 : 0) << "\n";
    o << "bubble.center_x = " << fmt17(center_x) << "\n";
    o << "bubble.center_y = " << fmt17(center_y) << "\n";
    o << "radial.gamma = " << fmt17(gamma) << "\n";
    o << "radial.E_auto = " << (E_auto ? 1 : 0) << "\n";
    o << "radial.E = " << fmt17(E) << "\n";
    o << "radial.delta = " << fmt17(delta) << "\n";
    o << "scan.lambdas = " << lambdas << "\n";
    o << "threshold.bracket_lo = " << fmt17(bracket_lo) << "\n";
    o << "threshold.bracket_hi = " << fmt17(bracket_hi) << "\n";
    o << "threshold.tol = " << fmt17(threshold_tol) << "\n";
    o << "verify.quick = " << (verify_quick ? 1 : 0) << "\n";
    o << "verify.only = " << verify_only << "\n";
    o << "out.path = " << out_path << "\n";
    o << "out.save_field = " << save_field << "\n";
    return o.str();
}

RunConfig RunConfig::from_text(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        try {
            if (key == "command") c.command = val;
            else if (key == "mesh.kind") c.mesh_kind = val;
            else if (key == "mesh.level") c.mesh_level = std::stoi(val);
            else if (key == "mesh.width") c.mesh_width = std::stod(val);
            else if (key == "mesh.height") c.mesh_height = std::stod(val);
            else if (key == "mesh.nx") c.mesh_nx = std::stoi(val);
            else if (key == "mesh.ny") c.mesh_ny = std::stoi(val);
            else if (key == "mesh.path") c.mesh_path = val;
            else if (key == "mesh.refine") c.mesh_refine = std::stoi(val);
            else if (key == "params.lambda") c.lambda = std::stod(val);
            else if (key == "params.p") c.p = std::stod(val);
            else if (key == "params.variant") c.variant = val;
            else if (key == "solver.cg_tol") c.cg_tol = std::stod(val);
            else if (key == "solver.el_tol") c.el_tol = std::stod(val);
            else if (key == "solver.max_iters") c.max_iters = std::stoi(val);
            else if (key == "seeds.spec") c.seeds = val;
            else if (key == "rng.seed") c.rng_seed = std::stoull(val);
            else if (key == "potential.stride") c.stride = std::stoi(val);
            else if (key == "bubble.eps") c.eps = std::stod(val);
            else if (key == "bubble.has_center") c.has_center = std::stoi(val) != 0;
            else if (key == "bubble.center_x") c.center_x = std::stod(val);
            else if (key == "bubble.center_y") c.center_y = std::stod(val);
            else if (key == "radial.gamma") c.gamma = std::stod(val);
            else if (key == "radial.E_auto") c.E_auto = std::stoi(val) != 0;
            else if (key == "radial.E") c.E = std::stod(val);
            else if (key == "radial.delta") c.delta = std::stod(val);
            else if (key == "scan.lambdas") c.lambdas = val;
            else if (key == "threshold.bracket_lo") c.bracket_lo = std::stod(val);
            else if (key == "threshold.bracket_hi") c.bracket_hi = std::stod(val);
            else if (key == "threshold.tol") c.threshold_tol = std::stod(val);
            else if (key == "verify.quick") c.verify_quick = std::stoi(val) != 0;
            else if (key == "verify.only") c.verify_only = val;
            else if (key == "out.path") c.out_path = val;
            else if (key == "out.save_field") c.save_field = val;
            else throw ParseError("unknown config key '" + key + "'", lineno);
        } catch (const std::invalid_argument&) {
            throw ParseError("bad value for '" + key + "'", lineno);
        } catch (const std::out_of_range&) {
            throw ParseError("value out of range for '" + key + "'", lineno);
        }
    }
    return c;
}

namespace {

void parse_mesh_spec(RunConfig& c, const std::string& spec) {
    try {
        if (spec.rfind("disk:", 0) == 0) {
            c.mesh_kind = "disk";
            c.mesh_level = std::stoi(spec.substr(5));
            c.mesh_path.clear();
        } else if (spec.rfind("rect:", 0) == 0) {
            c.mesh_kind = "rect";
            std::stringstream ss(spec.substr(5));
            std::string tok;
            std::vector<std::string> parts;
            while (std::getline(ss, tok, ',')) parts.push_back(tok);
            if (parts.size() != 4) throw UsageError("rect mesh spec needs width,height,nx,ny");
            c.mesh_width = std::stod(parts[0]);
            c.mesh_height = std::stod(parts[1]);
            c.mesh_nx = std::stoi(parts[2]);
            c.mesh_ny = std::stoi(parts[3]);
            c.mesh_path.clear();
        } else {
            c.mesh_kind = "file";
            c.mesh_path = spec;
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("bad mesh spec '" + spec + "' (disk:<level> | rect:w,h,nx,ny | <file>)");
    }
}

}  // namespace

std::optional<RunConfig> parse_args(const std::vector<std::string>& argv, std::ostream& out) {
    CLI::App app{"tmx - numerical laboratory for perturbed planar exponential-growth extremals"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_file, mesh_spec, E_spec = "auto", center_spec;

    auto add_common = [&](CLI::App* sub, bool needs_mesh) {
        sub->add_option("--config", config_file, "key = value config file (flags win)");
        sub->add_option("--seed", cfg.rng_seed, "rng seed");
        sub->add_option("--out", cfg.out_path, "output path");
        if (needs_mesh)
            sub->add_option("--mesh", mesh_spec, "disk:<level> | rect:w,h,nx,ny | <file>");
    };

    auto* mesh_cmd = app.add_subcommand("mesh", "build or convert a mesh");
    add_common(mesh_cmd, true);
    mesh_cmd->add_option("--refine", cfg.mesh_refine, "extra refinements");

    auto* pot = app.add_subcommand("potential", "Robin function / harmonic center report");
    add_common(pot, true);
    pot->add_option("--stride", cfg.stride, "Robin sampling stride (0 = exact)");

    auto* maxc = app.add_subcommand("maximize", "maximize the perturbed functional");
    add_common(maxc, true);
    maxc->add_option("--lambda", cfg.lambda, "perturbation strength");
    maxc->add_option("--p", cfg.p, "perturbation exponent");
    maxc->add_option("--variant", cfg.variant, "with | without (the -1 term)");
    maxc->add_option("--seeds", cfg.seeds, "seed spec");
    maxc->add_option("--el-tol", cfg.el_tol, "Euler-Lagrange residual tolerance");
    maxc->add_option("--max-iters", cfg.max_iters, "ascent iteration cap");
    maxc->add_option("--save-field", cfg.save_field, "write the extremal field here");

    auto* bub = app.add_subcommand("bubble", "build a normalized test function");
    add_common(bub, true);
    bub->add_option("--eps", cfg.eps, "bubble parameter (0 < eps < 1/e)");
    bub->add_option("--center", center_spec, "x,y (default: harmonic center)");

    auto* rad = app.add_subcommand("radial", "radial shooting profile");
    add_common(rad, false);
    rad->add_option("--gamma", cfg.gamma, "peak height of v");
    rad->add_option("--E", E_spec, "normalizer (number or 'auto' = gamma^2 pi e)");
    rad->add_option("--lambda", cfg.lambda, "perturbation strength");
    rad->add_option("--p", cfg.p, "perturbation exponent");
    rad->add_option("--delta", cfg.delta, "cutoff t = delta gamma^2");

    auto* scan = app.add_subcommand("scan", "J_best over a lambda grid");
    add_common(scan, true);
    scan->add_option("--p", cfg.p, "perturbation exponent");
    scan->add_option("--lambdas", cfg.lambdas, "comma-separated non-decreasing grid");
    scan->add_option("--seeds", cfg.seeds, "seed spec");
    scan->add_option("--el-tol", cfg.el_tol, "Euler-Lagrange residual tolerance");
    scan->add_option("--max-iters", cfg.max_iters, "ascent iteration cap per seed");

    auto* thr = app.add_subcommand("threshold", "bisection estimate of lambda*(p)");
    add_common(thr, true);
    std::string bracket_spec;
    thr->add_option("--p", cfg.p, "perturbation exponent in [1,2]");
    thr->add_option("--bracket", bracket_spec, "lo,hi");
    thr->add_option("--tol", cfg.threshold_tol, "bracket width target");
    thr->add_option("--seeds", cfg.seeds, "seed spec");
    thr->add_option("--el-tol", cfg.el_tol, "Euler-Lagrange residual tolerance");
    thr->add_option("--max-iters", cfg.max_iters, "ascent iteration cap per seed");

    auto* ver = app.add_subcommand("verify", "run the identity/acceptance suite");
    add_common(ver, false);
    ver->add_flag("--quick", cfg.verify_quick, "sub-minute identity checks only");
    ver->add_option("--only", cfg.verify_only, "comma list of criterion ids");

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help() << "\n";
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();

    // merge order: defaults < config file < explicit flags. Flags were already
    // written into cfg; reapply them over the file copy.
    if (!config_file.empty()) {
        std::ifstream f(config_file);
        if (!f) throw UsageError("cannot open config file: " + config_file);
        std::stringstream ss;
        ss << f.rdbuf();
        RunConfig file_cfg = RunConfig::from_text(ss.str());
        file_cfg.command = cfg.command;
        RunConfig flags = cfg;
        cfg = file_cfg;
        auto passed = [&](const std::string& name) {
            return sub->count(name) > 0;
        };
        if (passed("--seed")) cfg.rng_seed = flags.rng_seed;
        if (passed("--out")) cfg.out_path = flags.out_path;
        if (sub->get_option_no_throw("--lambda") && passed("--lambda")) cfg.lambda = flags.lambda;
        if (sub->get_option_no_throw("--p") && passed("--p")) cfg.p = flags.p;
        if (sub->get_option_no_throw("--variant") && passed("--variant")) cfg.variant = flags.variant;
        if (sub->get_option_no_throw("--seeds") && passed("--seeds")) cfg.seeds = flags.seeds;
        if (sub->get_option_no_throw("--el-tol") && passed("--el-tol")) cfg.el_tol = flags.el_tol;
        if (sub->get_option_no_throw("--max-iters") && passed("--max-iters")) cfg.max_iters = flags.max_iters;
        if (sub->get_option_no_throw("--save-field") && passed("--save-field")) cfg.save_field = flags.save_field;
        if (sub->get_option_no_throw("--stride") && passed("--stride")) cfg.stride = flags.stride;
        if (sub->get_option_no_throw("--eps") && passed("--eps")) cfg.eps = flags.eps;
        if (sub->get_option_no_throw("--gamma") && passed("--gamma")) cfg.gamma = flags.gamma;
        if (sub->get_option_no_throw("--delta") && passed("--delta")) cfg.delta = flags.delta;
        if (sub->get_option_no_throw("--lambdas") && passed("--lambdas")) cfg.lambdas = flags.lambdas;
        if (sub->get_option_no_throw("--tol") && passed("--tol")) cfg.threshold_tol = flags.threshold_tol;
        if (sub->get_option_no_throw("--refine") && passed("--refine")) cfg.mesh_refine = flags.mesh_refine;
        if (sub->get_option_no_throw("--quick") && passed("--quick")) cfg.verify_quick = flags.verify_quick;
        if (sub->get_option_no_throw("--only") && passed("--only")) cfg.verify_only = flags.verify_only;
        if (!cfg.mesh_path.empty() && cfg.mesh_kind != "file")
            throw UsageError("config specifies both a builtin mesh kind and mesh.path");
    }

    if (!mesh_spec.empty()) parse_mesh_spec(cfg, mesh_spec);
    if (!bracket_spec.empty()) {
        auto comma = bracket_spec.find(',');
        if (comma == std::string::npos) throw UsageError("--bracket needs lo,hi");
        try {
            cfg.bracket_lo = std::stod(bracket_spec.substr(0, comma));
            cfg.bracket_hi = std::stod(bracket_spec.substr(comma + 1));
        } catch (const std::exception&) {
            throw UsageError("--bracket needs numeric lo,hi");
        }
    }
    if (!center_spec.empty()) {
        auto comma = center_spec.find(',');
        if (comma == std::string::npos) throw UsageError("--center needs x,y");
        try {
            cfg.center_x = std::stod(center_spec.substr(0, comma));
            cfg.center_y = std::stod(center_spec.substr(comma + 1));
            cfg.has_center = true;
        } catch (const std::exception&) {
            throw UsageError("--center needs numeric x,y");
        }
    }
    if (E_spec == "auto") {
        cfg.E_auto = true;
    } else {
        try {
            cfg.E = std::stod(E_spec);
            cfg.E_auto = false;
        } catch (const std::exception&) {
            throw UsageError("--E needs a number or 'auto'");
        }
    }
    return cfg;
}

}  // namespace tmx
