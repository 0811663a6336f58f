#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subrad/families.hpp"
#include "subrad/io.hpp"
#include "subrad/jsr.hpp"
#include "subrad/lsr.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using nlohmann::json;
using namespace subrad;

constexpr const char* kVersion = "subrad 0.1.0";

struct FamilySource {
    std::string family_file;
    std::string builtin;   // euler:R | pascal | illustrative | critical
    std::string random;    // d,m,density,seed
};

void add_family_flags(CLI::App* cmd, FamilySource& src) {
    auto* fam = cmd->add_option("--family", src.family_file, "family JSON file");
    auto* blt = cmd->add_option("--builtin", src.builtin,
                                "euler:R | pascal | illustrative | critical");
    auto* rnd = cmd->add_option("--random", src.random, "d,m,density,seed");
    fam->excludes(blt)->excludes(rnd);
    blt->excludes(rnd);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::uint64_t parsed_seed = 0;

MatrixFamily resolve_family(const FamilySource& src) {
    if (!src.family_file.empty()) return io::load_family(src.family_file);
    if (!src.builtin.empty()) {
        if (src.builtin == "pascal") return pascal_rhombus_family();
        if (src.builtin == "illustrative") return illustrative_family();
        if (src.builtin == "critical") return critical_family();
        if (src.builtin.rfind("euler:", 0) == 0)
            return euler_family(std::stoi(src.builtin.substr(6)));
        throw InvalidInputError("unknown builtin '" + src.builtin + "'");
    }
    if (!src.random.empty()) {
        const auto parts = split(src.random, ',');
        if (parts.size() != 4)
            throw InvalidInputError("--random expects d,m,density,seed");
        const auto d = static_cast<std::size_t>(std::stoul(parts[0]));
        const auto m = static_cast<std::size_t>(std::stoul(parts[1]));
        const double density = std::stod(parts[2]);
        parsed_seed = std::stoull(parts[3]);
        return random_family(d, m, density, parsed_seed);
    }
    throw InvalidInputError("one of --family, --builtin, --random is required");
}

int exit_code(Termination t) { return t == Termination::Accuracy ? 0 : 2; }

struct LsrArgs {
    FamilySource src;
    std::string algorithm = "a";
    double delta = 1e-6;
    long max_evals = 1000;
    double theta = 1.005;
    std::string init = "ones";
    bool transpose = false;
    std::string rescale;   // "auto" or a value
    std::string epsilons;  // comma list
    int max_iter = 0;      // >0 enables the rescaling driver
    std::string slp = "enumerate";
    std::string manifest_path;
    std::string vertices_out;  // final vertex set, for warm-starting later runs
};

json config_json(const LsrArgs& a) {
    json j;
    j["algorithm"] = a.algorithm;
    j["delta"] = a.delta;
    j["max_evals"] = a.max_evals;
    j["theta"] = a.theta;
    j["init"] = a.init;
    j["transpose"] = a.transpose;
    j["rescale"] = a.rescale.empty() ? "1" : a.rescale;
    j["epsilon"] = a.epsilons;
    j["max_iter"] = a.max_iter;
    j["slp"] = a.slp;
    if (!a.src.family_file.empty()) j["family"] = a.src.family_file;
    if (!a.src.builtin.empty()) j["builtin"] = a.src.builtin;
    if (!a.src.random.empty()) j["random"] = a.src.random;
    return j;
}

void write_manifest(const std::string& path, const std::string& command, const json& config,
                    const json& report, double wall_seconds) {
    if (path.empty()) return;
    json m;
    m["command"] = command;
    m["config"] = config;
    m["seed"] = parsed_seed;
    m["wall_seconds"] = wall_seconds;
    m["version"] = kVersion;
    m["report"] = report;
    io::write_text_file(path, m.dump(2) + "\n");
}

InitAntinorm parse_init(const std::string& init, std::size_t dim) {
    if (init == "ones") return InitAntinorm::ones();
    if (init.rfind("eig:", 0) == 0) return InitAntinorm::eigenvector(std::stoi(init.substr(4)));
    if (init.rfind("vertices:", 0) == 0)
        return InitAntinorm::explicit_vertices(io::load_vertices(init.substr(9), dim));
    throw InvalidInputError("--init expects ones | eig:IDX | vertices:FILE");
}

int run_lsr_cmd(const LsrArgs& args, const std::string& command) {
    const auto t0 = std::chrono::steady_clock::now();
    MatrixFamily f = resolve_family(args.src);
    if (args.transpose) f = transpose_family(f);

    LsrAlgorithm which;
    if (args.algorithm == "s") which = LsrAlgorithm::S;
    else if (args.algorithm == "a") which = LsrAlgorithm::A;
    else if (args.algorithm == "e") which = LsrAlgorithm::E;
    else throw InvalidInputError("--algorithm expects s | a | e");

    SolverConfig cfg;
    cfg.delta = args.delta;
    cfg.max_evals = args.max_evals;
    cfg.theta = args.theta;
    cfg.init = parse_init(args.init, f.dim);

    // --rescale auto runs a low-budget preliminary pass and applies 1/L
    if (!args.rescale.empty()) {
        if (args.rescale == "auto") {
            SolverConfig pre = cfg;
            pre.max_evals = std::max<long>(static_cast<long>(f.size()), 10);
            const SolverReport prep = run_lsr(f, pre, which);
            if (prep.lower > 0.0 && std::isfinite(prep.lower))
                f = rescale_family(f, 1.0 / prep.lower);
        } else {
            f = rescale_family(f, std::stod(args.rescale));
        }
    }

    const SlpMode mode = args.slp == "active" ? SlpMode::FromActive : SlpMode::EnumerateAll;

    json report;
    Termination term = Termination::Budget;
    std::vector<Vector> final_vertices;
    if (!args.epsilons.empty()) {
        std::vector<double> eps;
        for (const std::string& e : split(args.epsilons, ',')) eps.push_back(std::stod(e));
        const auto ladder = regularized_lsr(f, cfg, which, eps, parsed_seed);
        json arr = json::array();
        for (const auto& entry : ladder) {
            json item;
            item["epsilon"] = io::format_significant(entry.epsilon);
            item["report"] = io::report_to_json(entry.report);
            arr.push_back(std::move(item));
        }
        report["epsilon_ladder"] = std::move(arr);
        term = ladder.back().report.terminated_by;
        final_vertices = ladder.back().report.final_vertices;
    } else if (args.max_iter > 0) {
        if (which == LsrAlgorithm::S)
            throw InvalidInputError("--max-iter drives the adaptive variants (a or e)");
        DriverConfig dc;
        dc.inner = cfg;
        dc.max_iter = args.max_iter;
        const SolverReport rep = iterative_rescaling_driver(f, dc, which);
        report = io::report_to_json(rep);
        term = rep.terminated_by;
        final_vertices = rep.final_vertices;
    } else {
        SolverReport rep = run_lsr(f, cfg, which);
        rep.slp_candidates = identify_slp_candidates(f, rep, mode);
        report = io::report_to_json(rep);
        term = rep.terminated_by;
        final_vertices = rep.final_vertices;
    }

    if (!args.vertices_out.empty())
        io::write_text_file(args.vertices_out,
                            io::vertices_to_json(f.dim, final_vertices).dump(2) + "\n");

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << report.dump(2) << "\n";
    write_manifest(args.manifest_path, command, config_json(args), report, wall);
    return exit_code(term);
}

struct JsrArgs {
    FamilySource src;
    std::string algorithm = "adaptive";
    double delta = 1e-6;
    long max_evals = 1000;
    std::string init;  // vertices:FILE, empty = 1-norm
    std::string manifest_path;
};

int run_jsr_cmd(const JsrArgs& args, const std::string& command) {
    const auto t0 = std::chrono::steady_clock::now();
    const MatrixFamily f = resolve_family(args.src);
    JsrConfig cfg;
    cfg.delta = args.delta;
    cfg.max_evals = args.max_evals;
    if (!args.init.empty()) {
        if (args.init.rfind("vertices:", 0) != 0)
            throw InvalidInputError("--init expects vertices:FILE");
        cfg.init_vertices = io::load_vertices(args.init.substr(9), f.dim);
    }
    JsrReport rep;
    if (args.algorithm == "classic") {
        PolytopeNorm norm = cfg.init_vertices.empty()
                                ? identity_norm(f.dim, cfg.tol)
                                : PolytopeNorm{f.dim, cfg.init_vertices, cfg.tol};
        rep = gripenberg_jsr(f, cfg, norm);
    } else if (args.algorithm == "adaptive") {
        rep = adaptive_gripenberg_jsr(f, cfg);
    } else {
        throw InvalidInputError("--algorithm expects classic | adaptive");
    }
    try {
        rep.slp_candidates = identify_smp_candidates(f, rep);
    } catch (const EnumerationCapError&) {
        // candidate listing is informative only; leave it empty
    }
    const json report = io::report_to_json(rep);
    std::cout << report.dump(2) << "\n";
    json cfgj;
    cfgj["algorithm"] = args.algorithm;
    cfgj["delta"] = args.delta;
    cfgj["max_evals"] = args.max_evals;
    cfgj["init"] = args.init;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(args.manifest_path, command, cfgj, report, wall);
    return exit_code(rep.terminated_by);
}

struct BenchArgs {
    std::string dims = "4";
    std::string densities = "1.0";
    std::string seeds = "1";
    std::size_t members = 2;
    std::string algorithm = "e";
    std::string theta_grid = "1.005";
    double delta = 1e-6;
    long max_evals = 200;
    int max_iter = 0;
    int jobs = 0;
};

struct BenchEntry {
    std::size_t d;
    double density;
    std::uint64_t seed;
    double theta;
};

int run_bench_cmd(const BenchArgs& args) {
    std::vector<BenchEntry> entries;
    for (const std::string& ds : split(args.dims, ','))
        for (const std::string& rs : split(args.densities, ','))
            for (const std::string& ss : split(args.seeds, ','))
                for (const std::string& ts : split(args.theta_grid, ','))
                    entries.push_back({static_cast<std::size_t>(std::stoul(ds)), std::stod(rs),
                                       std::stoull(ss), std::stod(ts)});

    LsrAlgorithm which;
    if (args.algorithm == "s") which = LsrAlgorithm::S;
    else if (args.algorithm == "a") which = LsrAlgorithm::A;
    else if (args.algorithm == "e") which = LsrAlgorithm::E;
    else throw InvalidInputError("--algorithm expects s | a | e");

    int jobs = args.jobs;
    if (jobs <= 0) {
        if (const char* env = std::getenv("SUBRAD_JOBS")) jobs = std::atoi(env);
        if (jobs <= 0) jobs = 1;
    }

    std::vector<std::string> rows(entries.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
#endif
    for (long long idx = 0; idx < static_cast<long long>(entries.size()); ++idx) {
        const BenchEntry& e = entries[static_cast<std::size_t>(idx)];
        std::ostringstream row;
        row << e.d << ',' << args.members << ',' << io::format_significant(e.density) << ','
            << e.seed << ',' << io::format_significant(e.theta) << ',';
        const auto t0 = std::chrono::steady_clock::now();
        try {
            MatrixFamily f = random_family(e.d, args.members, e.density, e.seed);
            SolverConfig cfg;
            cfg.delta = args.delta;
            cfg.max_evals = args.max_evals;
            cfg.theta = e.theta;
            cfg.init = InitAntinorm::eigenvector(1);
            SolverReport rep;
            if (args.max_iter > 0 && which != LsrAlgorithm::S) {
                DriverConfig dc;
                dc.inner = cfg;
                dc.max_iter = args.max_iter;
                rep = iterative_rescaling_driver(f, dc, which);
            } else {
                rep = run_lsr(f, cfg, which);
            }
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            row << io::format_significant(rep.lower) << ',' << io::format_significant(rep.upper)
                << ',' << rep.metrics.l_slp << ',' << rep.metrics.l_opt << ',' << rep.metrics.n
                << ',' << rep.metrics.n_op << ',' << rep.metrics.j_max << ','
                << rep.final_vertices.size() << ',' << io::format_significant(wall, 6) << ",ok";
        } catch (const std::exception& ex) {
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            row << ",,,,,,,," << io::format_significant(wall, 6) << ",error:" << ex.what();
        }
        rows[static_cast<std::size_t>(idx)] = row.str();
    }

    std::cout << "d,m,density,seed,theta,lower,upper,l_slp,l_opt,n,n_op,j_max,vertex_count,"
                 "wall_seconds,status\n";
    for (const std::string& r : rows) std::cout << r << "\n";
    return 0;
}

struct GenArgs {
    FamilySource src;
    std::string out;
};

int run_gen_cmd(const GenArgs& args) {
    const MatrixFamily f = resolve_family(args.src);
    const json j = io::family_to_json(f);
    if (args.out.empty())
        std::cout << j.dump(2) << "\n";
    else
        io::write_text_file(args.out, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Guaranteed lower/joint spectral radius bounds via polytope antinorms and norms"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    LsrArgs lsr;
    auto* lsr_cmd = app.add_subcommand("lsr", "bound the lower spectral radius");
    add_family_flags(lsr_cmd, lsr.src);
    lsr_cmd->add_option("--algorithm", lsr.algorithm, "s | a | e");
    lsr_cmd->add_option("--delta", lsr.delta, "target accuracy");
    lsr_cmd->add_option("--max-evals", lsr.max_evals, "antinorm evaluation budget M");
    lsr_cmd->add_option("--theta", lsr.theta, "scaling parameter (algorithm e)");
    lsr_cmd->add_option("--init", lsr.init, "ones | eig:IDX | vertices:FILE");
    lsr_cmd->add_flag("--transpose", lsr.transpose, "solve the transpose family");
    lsr_cmd->add_option("--rescale", lsr.rescale, "auto | VALUE");
    lsr_cmd->add_option("--epsilon", lsr.epsilons, "regularization ladder, comma list");
    lsr_cmd->add_option("--max-iter", lsr.max_iter, "rescaling-driver iterations");
    lsr_cmd->add_option("--slp", lsr.slp, "enumerate | active");
    lsr_cmd->add_option("--manifest", lsr.manifest_path, "write a run manifest to this file");
    lsr_cmd->add_option("--save-vertices", lsr.vertices_out,
                        "write the final vertex set to this file (for --init vertices:FILE)");

    JsrArgs jsr;
    auto* jsr_cmd = app.add_subcommand("jsr", "bound the joint spectral radius");
    add_family_flags(jsr_cmd, jsr.src);
    jsr_cmd->add_option("--algorithm", jsr.algorithm, "classic | adaptive");
    jsr_cmd->add_option("--delta", jsr.delta, "target accuracy");
    jsr_cmd->add_option("--max-evals", jsr.max_evals, "norm evaluation budget M");
    jsr_cmd->add_option("--init", jsr.init, "vertices:FILE (default: 1-norm)");
    jsr_cmd->add_option("--manifest", jsr.manifest_path, "write a run manifest to this file");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "seeded random-family sweep, CSV on stdout");
    bench_cmd->add_option("--dims", bench.dims, "comma list of dimensions");
    bench_cmd->add_option("--densities", bench.densities, "comma list of sparsity densities");
    bench_cmd->add_option("--seeds", bench.seeds, "comma list of seeds");
    bench_cmd->add_option("--members", bench.members, "matrices per family");
    bench_cmd->add_option("--algorithm", bench.algorithm, "s | a | e");
    bench_cmd->add_option("--theta-grid", bench.theta_grid, "comma list of scaling parameters");
    bench_cmd->add_option("--delta", bench.delta, "target accuracy");
    bench_cmd->add_option("--max-evals", bench.max_evals, "budget per run");
    bench_cmd->add_option("--max-iter", bench.max_iter, "driver iterations (0 = plain run)");
    bench_cmd->add_option("--jobs", bench.jobs, "parallel sweep entries (default $SUBRAD_JOBS)");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "emit a family file");
    add_family_flags(gen_cmd, gen.src);
    gen_cmd->add_option("--out", gen.out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    std::string command;
    for (int i = 0; i < argc; ++i) {
        if (i) command += ' ';
        command += argv[i];
    }

    try {
        if (lsr_cmd->parsed()) return run_lsr_cmd(lsr, command);
        if (jsr_cmd->parsed()) return run_jsr_cmd(jsr, command);
        if (bench_cmd->parsed()) return run_bench_cmd(bench);
        if (gen_cmd->parsed()) return run_gen_cmd(gen);
    } catch (const std::exception& ex) {
        nlohmann::json err;
        err["error"] = ex.what();
        std::cout << err.dump(2) << "\n";
        return 1;
    }
    return 1;
}
