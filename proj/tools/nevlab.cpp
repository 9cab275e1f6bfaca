#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nevlab/cli.hpp"

namespace {

namespace cli = nevlab::cli;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Overrides {
  std::string document;
  std::optional<std::string> grid;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_psd, tol_rank, tol_eq;
  std::optional<std::string> out;
  std::vector<std::string> formats;
  // harnack without a document
  std::optional<std::string> z1, z2;
  int trials = 1000;
};

const std::map<std::string, std::set<std::string>> kGroups{
    {"classify", {"classify", "pair_check"}},
    {"invariance", {"invariance"}},
    {"harnack", {"harnack", "sandwich"}},
    {"analysis", {"split", "bounds", "schatten", "sweep"}},
    {"examples", {"decay", "fill", "form_domain"}},
};

void add_common(CLI::App* sub, Overrides& o, bool document_required) {
  auto* doc = sub->add_option("document", o.document, "Job document (nevlab/1 JSON)");
  if (document_required) doc->required()->check(CLI::ExistingFile);
  sub->add_option("--grid", o.grid, "default | extended | re,im;re,im;...");
  sub->add_option("--seed", o.seed, "Override the document seed");
  sub->add_option("--tol-psd", o.tol_psd, "PSD tolerance");
  sub->add_option("--tol-rank", o.tol_rank, "Rank tolerance");
  sub->add_option("--tol-eq", o.tol_eq, "Equality tolerance");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--format", o.formats, "Report formats")->check(CLI::IsMember({"json", "csv"}))->delimiter(',');
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

cli::Json complex_flag(const std::string& text) {
  const cli::Json g = cli::grid_from_flag(text);
  if (!g.is_array() || g.size() != 1) throw std::runtime_error("expected a single point re,im, got '" + text + "'");
  return g[0];
}

cli::JobDocument standalone_harnack(const Overrides& o) {
  if (!o.z1 || !o.z2) throw std::runtime_error("harnack: give a document or both --z1 and --z2");
  cli::JobDocument doc;
  cli::Task t;
  t.name = "harnack";
  t.kind = "harnack";
  t.params = {{"z1", complex_flag(*o.z1)}, {"z2", complex_flag(*o.z2)}, {"trials", o.trials}};
  doc.tasks.push_back(std::move(t));
  return doc;
}

int execute(const std::string& command, const Overrides& o) {
  cli::JobDocument doc;
  try {
    doc = (command == "harnack" && o.document.empty()) ? standalone_harnack(o) : cli::parse(read_file(o.document));
    if (o.seed) doc.seed = *o.seed;
    if (o.grid) doc.grid = cli::grid_from_flag(*o.grid);
    if (o.tol_psd) doc.tol.eps_psd = *o.tol_psd;
    if (o.tol_rank) doc.tol.eps_rank = *o.tol_rank;
    if (o.tol_eq) doc.tol.eps_eq = *o.tol_eq;
    if (o.out) doc.output.directory = *o.out;
    if (!o.formats.empty()) doc.output.formats = o.formats;
    if (const auto group = kGroups.find(command); group != kGroups.end()) {
      std::erase_if(doc.tasks, [&](const cli::Task& t) { return group->second.count(t.kind) == 0; });
    }
    if (const std::vector<std::string> issues = cli::validate(doc); !issues.empty()) throw cli::ParseError(issues);
  } catch (const cli::ParseError& e) {
    for (const std::string& issue : e.issues()) std::cerr << "error: " << issue << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const cli::RunResult result = cli::run(doc);
  try {
    cli::write_reports(result, doc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const cli::TaskResult& t : result.tasks) {
    std::printf("%-4s %s (%s)\n", t.pass ? "PASS" : "FAIL", t.name.c_str(), t.kind.c_str());
    if (t.summary.contains("error")) std::printf("     %s\n", t.summary["error"].get<std::string>().c_str());
  }
  std::printf("%zu task(s), reports in %s\n", result.tasks.size(), doc.output.directory.c_str());
  return result.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Herglotz-Nevanlinna verification toolkit"};
  app.set_version_flag("--version", std::string(cli::kVersion));
  app.require_subcommand(1);

  Overrides o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"run", "Run every task in a document"},
      {"classify", "Run classify and pair_check tasks"},
      {"invariance", "Run invariance tasks"},
      {"harnack", "Run harnack and sandwich tasks, or certify one pair of points"},
      {"analysis", "Run split, bounds, schatten and sweep tasks"},
      {"examples", "Run decay, fill and form_domain tasks"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, o, name != "harnack");
    subs[name] = sub;
  }
  subs["harnack"]->add_option("--z1", o.z1, "First point re,im");
  subs["harnack"]->add_option("--z2", o.z2, "Second point re,im");
  subs["harnack"]->add_option("--trials", o.trials, "Random cone members")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) return execute(name, o);
  }
  return kExitUsage;
}
