#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nekmini/case_runner.hpp"
#include "nekmini/config.hpp"
#include "nekmini/error.hpp"
#include "nekmini/mesh.hpp"
#include "nekmini/partition.hpp"

using namespace nekmini;

namespace {

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  std::string t = s;
  for (auto& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  for (double v; in >> v;) out.push_back(v);
  if (out.empty()) throw ConfigError(0, "--values needs at least one number");
  return out;
}

CaseConfig load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
  CaseConfig cfg = load_config(path);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(0, "--set expects key=value");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int cmd_run(const std::string& cfg_path, int ranks, const std::string& report, const std::string& ckpt,
            const std::vector<std::string>& sets) {
  const CaseConfig cfg = load_with_overrides(cfg_path, sets);
  RunOptions opt;
  opt.ranks = ranks;
  opt.report_path = report;
  opt.checkpoint_path = ckpt;
  const RunReport r = run_case(cfg, opt);
  if (report.empty()) write_report_csv(std::cout, r);
  if (r.exit_code != 0) std::cerr << "nekmini: " << r.failure << "\n";
  return r.exit_code;
}

int cmd_partition(const std::string& mesh_path, int parts, const std::string& method) {
  std::ifstream f(mesh_path);
  if (!f) throw ConfigError(0, "cannot open mesh '" + mesh_path + "'");
  Mesh mesh = read_mesh_text(f);
  find_face_neighbors(mesh);
  const ElementGraph g = build_element_graph(mesh);
  const Partition p = method == "rcb" ? rcb(g.centroids, parts) : rsb(g, parts);
  const PartitionQuality q = partition_quality(g, p);
  std::cout << "elements " << mesh.num_elements << " parts " << parts << " method " << method << "\n";
  std::cout << "edge_cut " << q.edge_cut << " min_size " << q.min_size << " max_size " << q.max_size
            << " max_ngh " << q.max_neighbors << "\n";
  std::cout << "part,elements,ngh\n";
  std::vector<std::int64_t> sizes(parts, 0);
  for (int r : p.rank_of_element) ++sizes[r];
  for (int r = 0; r < parts; ++r) std::cout << r << "," << sizes[r] << "," << q.neighbors[r] << "\n";
  std::cout << "element,part\n";
  for (size_t e = 0; e < p.rank_of_element.size(); ++e) std::cout << e << "," << p.rank_of_element[e] << "\n";
  return 0;
}

int cmd_study(const std::string& cfg_path, const std::string& axis, const std::string& values,
              const std::vector<std::string>& sets) {
  const CaseConfig cfg = load_with_overrides(cfg_path, sets);
  const StudyResult s = convergence_study(cfg, axis, parse_values(values));
  std::cout << axis << ",error\n";
  for (size_t i = 0; i < s.values.size(); ++i) std::cout << s.values[i] << "," << s.errors[i] << "\n";
  std::cout << "# slope = " << s.slope << (axis == "N" ? " (log error per unit N)" : " (log error vs log dt)")
            << "\n";
  return 0;
}

int cmd_mesh(const std::string& cfg_path, const std::string& out_path) {
  const CaseConfig cfg = load_config(cfg_path);
  const Mesh m = build_box_mesh(box_spec(cfg));
  if (out_path.empty()) {
    write_mesh_text(std::cout, m);
  } else {
    std::ofstream f(out_path);
    if (!f) throw ConfigError(0, "cannot write '" + out_path + "'");
    write_mesh_text(f, m);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nekmini: spectral-element incompressible flow on simulated ranks"};
  app.require_subcommand(1);

  std::string cfg_path, report, ckpt, mesh_path, axis, values, out_path, method = "rsb";
  std::vector<std::string> sets;
  int ranks = 0, parts = 2;

  auto* run = app.add_subcommand("run", "Run a case");
  run->add_option("config", cfg_path, "Case configuration file")->required();
  run->add_option("--ranks", ranks, "Simulated ranks (overrides the config)");
  run->add_option("--report", report, "CSV report path (default: stdout)");
  run->add_option("--checkpoint", ckpt, "Write the final state to this file");
  run->add_option("--set", sets, "Override a key: --set key=value");

  auto* part = app.add_subcommand("partition", "Partition a mesh file and print quality metrics");
  part->add_option("mesh", mesh_path, "Mesh file (HEXMESH text format)")->required();
  part->add_option("--parts", parts, "Number of parts")->required();
  part->add_option("--method", method, "rsb or rcb")->check(CLI::IsMember({"rsb", "rcb"}));

  auto* study = app.add_subcommand("study", "Convergence study over N or dt");
  study->add_option("config", cfg_path, "Case configuration file")->required();
  study->add_option("--axis", axis, "N or dt")->required()->check(CLI::IsMember({"N", "dt"}));
  study->add_option("--values", values, "Comma separated values")->required();
  study->add_option("--set", sets, "Override a key: --set key=value");

  auto* ref = app.add_subcommand("config-reference", "Print the configuration key reference");

  auto* mesh = app.add_subcommand("mesh", "Write the box mesh of a case in text form");
  mesh->add_option("config", cfg_path, "Case configuration file")->required();
  mesh->add_option("-o,--output", out_path, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(cfg_path, ranks, report, ckpt, sets);
    if (*part) return cmd_partition(mesh_path, parts, method);
    if (*study) return cmd_study(cfg_path, axis, values, sets);
    if (*ref) {
      std::cout << config_reference();
      return 0;
    }
    if (*mesh) return cmd_mesh(cfg_path, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "nekmini: config error: " << e.what() << "\n";
    return 1;
  } catch (const NonConvergenceError& e) {
    std::cerr << "nekmini: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nekmini: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
