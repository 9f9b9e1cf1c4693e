// Configuration-driven driver: JSON run configuration, discretization and
// solve pipelines for the benchmark cases, convergence ladders, CSV
// reporting, and the subcommand dispatch used by the command-line tool.
#pragma once

#include <uipdg/cases.hpp>
#include <uipdg/hybrid.hpp>

#include <cstdint>
#include <iosfwd>
#include <memory>

namespace uipdg {

/// Deterministic 64-bit generator (splitmix64) used by the seeded property
/// suites; avoids distribution objects so streams are reproducible across
/// standard libraries.
class SplitMix {
public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// uniform in [-1, 1]
  double uniform();

private:
  std::uint64_t state_;
};

struct RunConfig {
  std::string command = "run";
  std::string case_name = "test1";
  double lambda = 1.0;
  std::vector<SchemeKind> schemes = {SchemeKind::UIP};
  std::vector<int> epsilons = {1};
  std::vector<int> degrees = {1};
  int n = 8;       ///< coarsest structured mesh resolution
  int levels = -1; ///< -1 selects the per-command default
  double alpha0 = 8.0;
  TauForm tau_form = TauForm::FaceArea;
  double solver_tol = 1e-10;
  int max_iterations = 20000;
  int grid_samples = 256;
  std::uint64_t seed = 0;
  bool self_check = false;
  bool allow_low_penalty = false;
  std::string out_dir = ".";
  // mesh subcommand block
  int mesh_n = 8;
  Partition mesh_partition = Partition::Quadrant;
  int mesh_refinements = 0;
  BoundingBox mesh_domain{0.0, 0.0, 1.0, 1.0};
  std::string mesh_output = "mesh.txt";
};

/// Parses a JSON configuration (comments allowed).  Unknown or ill-typed
/// keys throw ConfigError naming the key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// Cross-field validation, including the coercivity threshold on alpha0
/// (> 6 required; below it, ConfigError unless allow_low_penalty, which
/// downgrades to a warning on stderr).
void validate_config(const RunConfig& cfg);

TestCase make_case(const RunConfig& cfg);

/// Everything tied to one mesh level; heap members keep the internal
/// pointers of DGSpace stable under moves.
struct Discretization {
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<Skeleton> skeleton;
  std::unique_ptr<DGSpace> space;
  DiffusionField diffusion;
  FaceCoefficientTable coeffs;
};

Discretization discretize(const TestCase& tc, const SchemeSpec& spec,
                          TauForm form, int n);

struct CaseSolution {
  DGFunction u;
  SolveReport solver;
  double seconds = 0.0; ///< assembly + solve wall time
};

CaseSolution solve_primal(const Discretization& d, const TestCase& tc,
                          const SchemeSpec& spec, const SolveOptions& opts);

ErrorReport measure(const Discretization& d, const TestCase& tc,
                    const DGFunction& u);

/// Extremes of u_h minus extremes of the exact solution over a uniform
/// point grid; quantifies spurious oscillation without image comparison.
struct OvershootReport {
  double max_overshoot = 0.0; ///< max(u_h) - max(u) over the grid
  double min_deficit = 0.0;   ///< min(u_h) - min(u)
  /// single ordering scalar: the worse of overshoot above the exact max
  /// and undershoot below the exact min, floored at zero
  double measure() const;
};

OvershootReport sample_overshoot(const Discretization& d, const TestCase& tc,
                                 const DGFunction& u, int grid_n);

/// One row of a convergence table.
struct LevelRow {
  SchemeKind scheme = SchemeKind::UIP;
  int epsilon = 1;
  int degree = 1;
  int level = 0;
  ErrorReport err;
  SolveReport solver;
  double seconds = 0.0;
};

/// Regenerates the structured mesh at n0 * 2^level for each level, solves,
/// and chains empirical rates between consecutive levels.
std::vector<LevelRow> convergence_study(const TestCase& tc,
                                        const SchemeSpec& spec, TauForm form,
                                        int n0, int levels,
                                        const SolveOptions& opts);

/// CSV with the commented metadata header followed by
/// scheme,epsilon,k,level,h,dofs,err_l2,ecr_l2,err_energy,ecr_energy,
/// solver_iters,residual,time_s.  Undefined rates print as "-".
void write_csv(std::ostream& out, const RunConfig& cfg, const TestCase& tc,
               const std::vector<LevelRow>& rows);

/// Seeded internal verification on the coarsest level: the elementwise vs
/// skeleton trace rearrangement, the mean/correction split of the
/// consistency form, and the face-coefficient identities.  Throws
/// CheckError on failure.
void run_self_check(const Discretization& d, std::uint64_t seed);

/// Executes the configured subcommand, writing artifacts under
/// cfg.out_dir.  Returns 0; failures surface as typed exceptions
/// (ConfigError/ParseError/TopologyError, SolverError, CheckError).
int execute(const RunConfig& cfg);

} // namespace uipdg
