// Library walk-through on the 9-point example: check, repair, approximate.
#include <iostream>

#include <edmrepair/edmrepair.hpp>

using namespace edmrepair;

int main() {
  WeightedInstance inst = paper_example();
  const DistanceSpace& s = inst.space;

  std::cout << "embeddable in R^2 as given: " << (is_embeddable(s, 2) ? "yes" : "no") << '\n';
  if (auto obs = obstruction_set(s, 2)) {
    std::cout << "obstruction:";
    for (PointId p : *obs) std::cout << ' ' << s.label(p);
    std::cout << '\n';
  }

  // outliers only, budget 1: not enough here
  WeightedInstance outliers_only = WeightedInstance::unit(s, 2, 1, 0);
  std::cout << "one deletion suffices: " << (solve_eeo(outliers_only) ? "yes" : "no") << '\n';

  // deletions and modifications together
  if (auto sol = solve_weeo(inst)) {
    std::cout << "repair cost " << sol->cost << ", delete";
    for (PointId p : sol->outliers) std::cout << ' ' << s.label(p);
    std::cout << '\n';
    for (const auto& [pr, v] : sol->modifications)
      std::cout << "  set (" << s.label(pr.a) << "," << s.label(pr.b) << ") from " << s(pr.a, pr.b) << " to " << v << '\n';
    std::cout << "verified: " << (verify_solution(inst, *sol) ? "yes" : "no") << '\n';
    if (sol->realization) std::cout << "realization error: " << max_relative_error(repaired_space(s, *sol), *sol->realization) << '\n';
  }

  const PointSet g = greedy_outliers(s, 2);
  const TwoApproxResult r = two_approx_outliers(s, 2, 7);
  std::cout << "greedy deletes " << g.size() << ", two-approx deletes " << r.outliers.size() << " (" << r.trials
            << " trials per guess)\n";

  std::cout << instance_to_json(inst).dump() << '\n';
  return 0;
}
