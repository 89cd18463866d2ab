#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <edmrepair/edmrepair.hpp>

using namespace edmrepair;

namespace {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kError = 2;

struct Global {
  bool exact = false;
  unsigned threads = 1;
  bool csv = false;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
};

std::uint64_t env_seed() {
  const char* s = std::getenv("EDMREPAIR_SEED");
  if (!s || !*s) return 0;
  try {
    return std::stoull(s);
  } catch (const std::logic_error&) {
    throw FormatError(std::string("EDMREPAIR_SEED is not an unsigned integer: ") + s);
  }
}

Config make_config(const Global& g) {
  Config c;
  c.threads = g.threads;
  if (g.exact) c.backend = Backend::exact;
  return c;
}

WeightedInstance load(const std::string& path, const Global& g, std::optional<int> dim = std::nullopt) {
  if (g.csv) {
    DistanceSpace s = read_csv_file(path);
    return WeightedInstance::unit(std::move(s), dim.value_or(1), 0, 0);
  }
  WeightedInstance inst = read_instance_file(path);
  if (dim) inst.d = *dim;
  return inst;
}

void print_solution(const WeightedInstance& inst, const std::optional<Solution>& sol) {
  std::cout << "answer: " << (sol ? "yes" : "no") << '\n';
  if (!sol) return;
  std::cout << "cost: " << sol->cost << '\n';
  std::cout << "outliers:";
  for (PointId p : sol->outliers) std::cout << ' ' << inst.space.label(p);
  std::cout << '\n';
  for (const auto& [p, v] : sol->modifications)
    std::cout << "modify " << inst.space.label(p.a) << ' ' << inst.space.label(p.b) << ": " << inst.space(p.a, p.b)
              << " -> " << round_significant(v) << '\n';
}

void print_realization(const DistanceSpace& s, const Realization& r) {
  for (const auto& [p, c] : r.coords) {
    std::cout << "  " << s.label(p) << ':';
    for (double v : c) std::cout << ' ' << round_significant(v);
    std::cout << '\n';
  }
}

void emit(const std::string& out, const json& j) {
  if (!out.empty()) write_json_file(out, j);
}

// ---------------------------------------------------------------------------

int cmd_check(const Global& g, const std::string& file, std::optional<int> dim, bool strong) {
  WeightedInstance inst = load(file, g, dim);
  const Config cfg = make_config(g);
  const DistanceSpace& s = inst.space;
  const bool ok = strong ? is_strongly_embeddable(s, s.points(), inst.d, cfg) : is_embeddable(s, s.points(), inst.d, cfg);
  std::cout << (strong ? "strongly embeddable in R^" : "embeddable in R^") << inst.d << ": " << (ok ? "yes" : "no")
            << '\n';
  if (auto r = embedding_dimension(s, s.points(), cfg)) std::cout << "embedding dimension: " << *r << '\n';
  if (!ok) return kNo;
  if (auto real = realize(s, s.points(), inst.d, cfg)) {
    std::cout << "realization:\n";
    print_realization(s, *real);
    std::cout << "max relative error: " << max_relative_error(s, *real) << '\n';
  }
  return kYes;
}

int cmd_solve(const Global& g, const std::string& file, const std::string& algo, std::uint64_t seed, int restarts,
              std::size_t max_points, const std::string& out) {
  WeightedInstance inst = load(file, g);
  const Config cfg = make_config(g);
  Timer timer;
  std::optional<Solution> sol;
  SolutionMeta meta;
  meta.algorithm = algo;
  meta.seed = seed;
  const bool outlier_only = inst.k_mod == 0;
  if (algo == "alg1" || algo == "alg2" || algo == "auto") {
    if (!outlier_only) throw std::invalid_argument("--algo " + algo + " needs k_mod = 0");
    if (algo == "alg1") {
      sol = alg1_branch(inst, cfg);
    } else if (algo == "alg2") {
      sol = alg2_branch(inst, {}, cfg);
    } else {
      meta.extra["dispatch"] = prefers_alg1(inst.d, inst.k_out) ? "alg1" : "alg2";
      sol = solve_eeo(inst, cfg);
    }
  } else if (algo == "weeo") {
    WeeoOptions opt;
    opt.seed = seed;
    opt.restarts = restarts;
    WeeoResult r = solve_weeo_detailed(inst, opt, cfg);
    sol = r.solution;
    meta.extra["reduced_points"] = r.compression.trace.kept.size();
  } else {
    OracleBudget budget;
    budget.max_points = max_points;
    sol = outlier_only ? brute_force_eeo(inst, budget, cfg) : brute_force_weeo(inst, budget, 100, seed, cfg);
  }
  meta.elapsed_ms = timer.ms();
  if (sol) {
    VerifyReport v = verify_solution(inst, *sol, cfg);
    meta.extra["verified"] = v.ok;
    if (!v.ok) meta.extra["verify_reason"] = v.reason;
  }
  print_solution(inst, sol);
  emit(out, solution_to_json(inst, sol, meta));
  return sol ? kYes : kNo;
}

int cmd_approx(const Global& g, const std::string& file, const std::string& algo, std::uint64_t seed,
               unsigned trials, const std::string& out) {
  WeightedInstance inst = load(file, g);
  const Config cfg = make_config(g);
  Timer timer;
  SolutionMeta meta;
  meta.algorithm = algo;
  meta.seed = seed;
  Solution sol;
  if (algo == "greedy") {
    sol.outliers = greedy_outliers(inst.space, inst.d, cfg);
  } else {
    if (inst.k_mod != 0 || !inst.unit_weights()) throw std::invalid_argument("two-approx accepts unweighted outlier-only instances");
    TwoApproxResult r = two_approx_outliers(inst.space, inst.d, seed, trials, cfg);
    sol.outliers = r.outliers;
    meta.extra["trials"] = r.trials;
    meta.extra["guesses"] = inst.d;
  }
  sol.cost = solution_cost(inst, sol);
  sol.realization = realize(inst.space, set_minus(inst.space.points(), sol.outliers), inst.d, cfg);
  meta.elapsed_ms = timer.ms();
  const bool within = verify_solution(inst, sol, cfg).ok;
  meta.extra["within_budget"] = within;
  std::cout << "outliers (" << sol.outliers.size() << "):";
  for (PointId p : sol.outliers) std::cout << ' ' << inst.space.label(p);
  std::cout << "\nwithin budget: " << (within ? "yes" : "no") << '\n';
  json j = solution_to_json(inst, sol, meta);
  j["answer"] = within ? "yes" : "no";
  emit(out, j);
  return kYes;
}

json labels_of(const DistanceSpace& s, const PointSet& p) {
  json a = json::array();
  for (PointId q : p) a.push_back(s.label(q));
  return a;
}

int cmd_compress(const Global& g, const std::string& file, const std::string& out) {
  WeightedInstance inst = load(file, g);
  const Config cfg = make_config(g);
  Timer timer;
  CompressResult r = compress(inst, cfg);
  const CompressionTrace& tr = r.trace;
  json trace;
  trace["hitting_set"] = labels_of(inst.space, tr.hitting_set);
  json forced = json::array();
  for (const ForcedOutlier& f : tr.forced_outliers) forced.push_back({{"point", inst.space.label(f.point)}, {"rule", f.rule}});
  trace["forced_outliers"] = forced;
  trace["unchanged"] = tr.unchanged;
  trace["marking_completed"] = tr.marking_completed;
  trace["h_star"] = tr.partition.h_star;
  trace["parts"] = tr.partition.parts.size();
  trace["marked"] = tr.marked;
  trace["elapsed_ms"] = timer.ms();

  if (r.kind == CompressResult::Kind::reduced) {
    std::cout << "reduced: " << inst.size() << " -> " << tr.kept.size() << " points"
              << (tr.unchanged ? " (unchanged)" : "") << '\n';
    std::cout << "forced outliers: " << tr.forced_outliers.size() << '\n';
    json j = instance_to_json(tr.reduced);
    j["trace"] = trace;
    emit(out, j);
    return kYes;
  }
  const std::optional<Solution> sol = r.kind == CompressResult::Kind::yes ? r.solution : std::nullopt;
  std::cout << "solved outright\n";
  print_solution(inst, sol);
  SolutionMeta meta;
  meta.algorithm = "compress";
  meta.elapsed_ms = timer.ms();
  meta.extra["trace"] = trace;
  emit(out, solution_to_json(inst, sol, meta));
  return sol ? kYes : kNo;
}

struct GenerateArgs {
  std::string kind;
  std::size_t n = 10;
  int d = 2;
  std::size_t k_out = 1;
  std::size_t k_mod = 0;
  int box = 10;
  std::string noise = "random";
  std::string graph;
  std::string matrix;
  int k = 1;
  std::size_t l = 1;
  std::size_t h = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, std::uint64_t seed) {
  WeightedInstance inst;
  std::optional<json> truth;
  if (a.kind == "planted") {
    PlantedSpec spec;
    spec.n = a.n;
    spec.d = a.d;
    spec.k_out_planted = a.k_out;
    spec.k_mod_planted = a.k_mod;
    spec.box = a.box;
    spec.noise = a.noise == "perturbed" ? NoiseKind::perturbed : NoiseKind::random_inconsistent;
    spec.seed = seed;
    PlantedInstance pi = planted_instance(spec);
    inst = pi.instance;
    SolutionMeta meta;
    meta.algorithm = "planted";
    meta.seed = seed;
    json t = solution_to_json(inst, pi.truth, meta);
    t["upper_bound_only"] = pi.upper_bound_only;
    truth = t;
  } else if (a.kind == "vc") {
    Graph gr = graph_from_json(read_json_file(a.graph));
    inst = vc_reduction(gr, a.k);
    const std::size_t vc = brute_force_vertex_cover(gr).size();
    truth = json{{"vertex_cover", vc}, {"answer", vc <= static_cast<std::size_t>(a.k) ? "yes" : "no"}};
  } else if (a.kind == "maxcut") {
    Graph gr = graph_from_json(read_json_file(a.graph));
    inst = maxcut_reduction(gr, a.l);
    const std::size_t mc = brute_force_maxcut(gr);
    truth = json{{"max_cut", mc}, {"answer", mc >= a.l ? "yes" : "no"}};
  } else if (a.kind == "rank") {
    auto rows = matrix_from_json(read_json_file(a.matrix));
    inst = rank_reduction(rows, a.h, a.k);
    const bool yes = brute_force_rank_reduction(rows, a.h, static_cast<std::size_t>(a.k));
    truth = json{{"rank", exact_rank(rows)}, {"answer", yes ? "yes" : "no"}};
  } else {
    inst = paper_example();
    SolutionMeta meta;
    meta.algorithm = "known witness";
    truth = solution_to_json(inst, paper_witness(), meta);
  }
  const json j = instance_to_json(inst);
  if (a.out.empty()) {
    std::cout << j.dump(2) << '\n';
    return kYes;
  }
  write_json_file(a.out, j);
  if (truth) write_json_file(a.out + ".truth.json", *truth);
  std::cout << "wrote " << a.out << " (" << inst.size() << " points, d=" << inst.d << ")\n";
  return kYes;
}

int cmd_oracle(const Global& g, const std::string& file, std::size_t max_points, int restarts, std::uint64_t seed,
               const std::string& out) {
  WeightedInstance inst = load(file, g);
  Timer timer;
  OracleBudget budget;
  budget.max_points = max_points;
  const Config cfg = make_config(g);
  std::optional<Solution> sol =
      inst.k_mod == 0 ? brute_force_eeo(inst, budget, cfg) : brute_force_weeo(inst, budget, restarts, seed, cfg);
  SolutionMeta meta;
  meta.algorithm = inst.k_mod == 0 ? "brute_force_eeo" : "brute_force_weeo";
  meta.seed = seed;
  meta.elapsed_ms = timer.ms();
  print_solution(inst, sol);
  emit(out, solution_to_json(inst, sol, meta));
  return sol ? kYes : kNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outlier and distance repair for Euclidean embeddings"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_flag("--exact", g.exact, "Use exact rational arithmetic");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_flag("--matrix-csv", g.csv, "Input is a bare squared-distance CSV matrix");

  std::uint64_t seed = 0;
  bool seed_given = false;
  auto seed_opt = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { seed = v, seed_given = true; }, "Random seed (default EDMREPAIR_SEED or 0)");
  };

  std::string file, out, algo;
  std::optional<int> dim;
  bool strong = false;
  auto* check = app.add_subcommand("check", "Test embeddability and print a realization");
  check->add_option("file", file, "Instance file")->required();
  check->add_option("--dim", dim, "Target dimension (default: the instance's d)");
  check->add_flag("--strong", strong, "Require embedding dimension exactly d");

  int restarts = 20;
  std::size_t max_points = 12;
  auto* solve = app.add_subcommand("solve", "Exact solvers");
  solve->add_option("file", file, "Instance file")->required();
  solve->add_option("--algo", algo, "alg1 | alg2 | auto | weeo | brute")
      ->default_val("auto")
      ->check(CLI::IsMember({"alg1", "alg2", "auto", "weeo", "brute"}));
  solve->add_option("--restarts", restarts, "Numeric restarts per feasibility check")->default_val(20);
  solve->add_option("--max-points", max_points, "Point cap for brute force")->default_val(12);
  solve->add_option("-o,--output", out, "Solution JSON");
  seed_opt(solve);

  unsigned trials = 0;
  std::string approx_algo;
  auto* approx = app.add_subcommand("approx", "Approximate outlier deletion");
  approx->add_option("file", file, "Instance file")->required();
  approx->add_option("--algo", approx_algo, "greedy | two-approx")
      ->default_val("greedy")
      ->check(CLI::IsMember({"greedy", "two-approx"}));
  approx->add_option("--trials", trials, "Trials per dimension guess (0 = 2^(d+1))");
  approx->add_option("-o,--output", out, "Solution JSON");
  seed_opt(approx);

  auto* comp = app.add_subcommand("compress", "Shrink an instance to an equivalent one");
  comp->add_option("file", file, "Instance file")->required();
  comp->add_option("-o,--output", out, "Reduced instance (or solution) JSON");

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a generated instance");
  gen->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  gen->add_option("--kind", ga.kind, "planted | vc | maxcut | rank | paper")
      ->required()
      ->check(CLI::IsMember({"planted", "vc", "maxcut", "rank", "paper"}));
  gen->add_option("--n", ga.n, "Points (planted)");
  gen->add_option("--d", ga.d, "Dimension (planted)");
  gen->add_option("--k-out", ga.k_out, "Planted outliers");
  gen->add_option("--k-mod", ga.k_mod, "Planted corrupted pairs");
  gen->add_option("--box", ga.box, "Coordinate half-width (planted)");
  gen->add_option("--noise", ga.noise, "random | perturbed")->check(CLI::IsMember({"random", "perturbed"}));
  gen->add_option("--graph", ga.graph, "Graph JSON (vc, maxcut)");
  gen->add_option("--matrix", ga.matrix, "Matrix JSON (rank)");
  gen->add_option("--k", ga.k, "Deletion budget (vc, rank)");
  gen->add_option("--l", ga.l, "Cut size (maxcut)");
  gen->add_option("--h", ga.h, "Rank drop (rank)");
  gen->add_option("-o,--output", ga.out, "Instance JSON; ground truth goes to <output>.truth.json");
  seed_opt(gen);

  auto* orc = app.add_subcommand("oracle", "Brute-force reference answer");
  orc->add_option("file", file, "Instance file")->required();
  orc->add_option("--max-points", max_points, "Point cap")->default_val(12);
  orc->add_option("--restarts", restarts, "Numeric restarts per feasibility check")->default_val(100);
  orc->add_option("-o,--output", out, "Solution JSON");
  seed_opt(orc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kError;
  }

  try {
    if (!seed_given) seed = env_seed();
    if (*check) return cmd_check(g, file, dim, strong);
    if (*solve) return cmd_solve(g, file, algo, seed, restarts, max_points, out);
    if (*approx) return cmd_approx(g, file, approx_algo, seed, trials, out);
    if (*comp) return cmd_compress(g, file, out);
    if (*gen) return cmd_generate(ga, seed);
    if (*orc) return cmd_oracle(g, file, max_points, restarts, seed, out);
  } catch (const OracleBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
