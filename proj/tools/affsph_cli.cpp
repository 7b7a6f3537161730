// Command-line front end: sample families, run verification suites, compose
// products and compare sphere constants.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or geometry error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "affsph/affsph.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct GridOptions {
  std::vector<int> counts{8};
  std::vector<std::string> ranges;
};

struct OutputOptions {
  std::string path;
  std::string format = "json";
};

std::pair<double, double> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw affsph::InvalidArgument("range must be lo:hi (got '" + s + "')");
  std::size_t used = 0;
  double lo = 0.0, hi = 0.0;
  try {
    lo = std::stod(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const std::string rest = s.substr(colon + 1);
    hi = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
  } catch (const std::logic_error&) {
    throw affsph::InvalidArgument("range must be lo:hi (got '" + s + "')");
  }
  return {lo, hi};
}

// One value applies to every axis; otherwise one value per axis.
affsph::Grid make_grid(const affsph::Family& fam, const GridOptions& g) {
  const int m = fam.dim();
  auto ranges = fam.f.domain().ranges();
  if (!g.ranges.empty()) {
    if (g.ranges.size() != 1 && static_cast<int>(g.ranges.size()) != m)
      throw affsph::InvalidArgument("--range needs 1 or " + std::to_string(m) + " values");
    for (int i = 0; i < m; ++i) ranges[i] = parse_range(g.ranges[g.ranges.size() == 1 ? 0 : i]);
  }
  std::vector<int> counts;
  if (g.counts.size() == 1) {
    counts.assign(m, g.counts[0]);
  } else if (static_cast<int>(g.counts.size()) == m) {
    counts = g.counts;
  } else {
    throw affsph::InvalidArgument("--grid needs 1 or " + std::to_string(m) + " counts");
  }
  return affsph::Grid(affsph::Box(ranges), counts);
}

void emit(const OutputOptions& out, const std::string& text) {
  if (out.path.empty() || out.path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw affsph::InvalidArgument("cannot open output path '" + out.path + "'");
  f << text;
  if (!f.flush()) throw affsph::InvalidArgument("cannot write output path '" + out.path + "'");
}

int cmd_list(const OutputOptions& out) {
  std::ostringstream os;
  const auto fams = affsph::list_families();
  if (out.format == "csv") {
    os << "name,domain_dim,ambient_dim,description\r\n";
    for (const auto& f : fams) {
      os << affsph::csv_field(f.name) << ',' << f.domain_dim << ',' << f.ambient_dim << ','
         << affsph::csv_field(f.description) << "\r\n";
    }
  } else {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& f : fams) {
      j.push_back({{"name", f.name}, {"description", f.description}, {"domain_dim", f.domain_dim},
                   {"ambient_dim", f.ambient_dim}});
    }
    os << j.dump(2) << '\n';
  }
  emit(out, os.str());
  return kExitOk;
}

int cmd_construct(const std::string& name, const GridOptions& g, const OutputOptions& out) {
  const affsph::Family fam = affsph::named_family(name);
  const affsph::Grid grid = make_grid(fam, g);
  const affsph::Sample s = affsph::sample_family(fam, grid);
  std::ostringstream os;
  if (out.format == "csv") {
    affsph::write_sample_csv(os, s);
  } else {
    os << affsph::sample_json(fam.name, grid, s).dump(2) << '\n';
  }
  emit(out, os.str());
  return kExitOk;
}

int cmd_verify(const std::string& name, const GridOptions& g, std::uint64_t seed, const OutputOptions& out) {
  const affsph::Family fam = affsph::named_family(name);
  const affsph::VerificationReport rep = affsph::run_suite(fam, make_grid(fam, g), seed);
  std::ostringstream os;
  if (out.format == "csv") {
    affsph::write_report_csv(os, rep);
  } else {
    affsph::write_report_json(os, rep);
  }
  emit(out, os.str());
  return rep.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_relation(const std::string& left, const std::string& right, const OutputOptions& out) {
  const affsph::Family a = affsph::named_family(left);
  const affsph::Family b = affsph::named_family(right);
  const affsph::CrossRelation cr = affsph::cross_relation(a.f, b.f);
  const affsph::CheckResult combined = affsph::cross_relation_check(left, right);
  std::ostringstream os;
  const std::vector<const affsph::CheckResult*> checks{&cr.lambda_alpha, &cr.calabi_lambda, &combined};
  if (out.format == "csv") {
    os << "name,max_residual,tolerance,pass\r\n";
    for (const auto* c : checks) {
      os << c->name << ',' << affsph::format_number(c->max_residual) << ',' << affsph::format_number(c->tolerance)
         << ',' << (c->pass ? "true" : "false") << "\r\n";
    }
  } else {
    nlohmann::ordered_json j;
    j["left"] = left;
    j["right"] = right;
    j["constants"] = {{"lambda", cr.lambda},
                      {"alpha", cr.alpha},
                      {"beta", cr.beta},
                      {"alpha_paracomplex", cr.alpha_paracomplex}};
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto* c : checks) {
      j["checks"].push_back({{"name", c->name},
                             {"max_residual", affsph::detail::finite_or_null(c->max_residual)},
                             {"tolerance", c->tolerance},
                             {"pass", c->pass}});
    }
    os << j.dump(2) << '\n';
  }
  emit(out, os.str());
  return combined.pass ? kExitOk : kExitCheckFailed;
}

void add_output(CLI::App* sub, OutputOptions& out) {
  sub->add_option("--output,-o", out.path, "output path (default: standard output)");
  sub->add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_grid(CLI::App* sub, GridOptions& g) {
  sub->add_option("--grid", g.counts, "cells per axis: one value or one per axis")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sub->add_option("--range", g.ranges, "lo:hi, once for all axes or once per axis")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine hypersphere constructions and identity checks"};
  app.require_subcommand(1);

  OutputOptions out;
  GridOptions grid;
  std::string family;
  std::vector<std::string> pair_names;
  std::string kind = "cp";
  std::uint64_t seed = 0;

  auto* list = app.add_subcommand("list-families", "registered family names");
  add_output(list, out);

  auto* construct = app.add_subcommand("construct", "sample a family on a grid");
  construct->add_option("--family", family, "family name")->required();
  add_grid(construct, grid);
  add_output(construct, out);

  auto* verify = app.add_subcommand("verify", "run the verification suite of a family");
  verify->add_option("--family", family, "family name")->required();
  add_grid(verify, grid);
  verify->add_option("--seed", seed, "seed for random tangent arguments");
  add_output(verify, out);

  auto* compose = app.add_subcommand("compose", "sample a product of two base spheres");
  compose->add_option("--family", pair_names, "two base sphere names")->required()->expected(2)->delimiter(',');
  compose->add_option("--kind", kind, "pair, sphere, cp or flat")
      ->check(CLI::IsMember({"pair", "sphere", "cp", "flat"}));
  add_grid(compose, grid);
  add_output(compose, out);

  auto* relation = app.add_subcommand("relation", "compare sphere constants of a pair across pipelines");
  relation->add_option("--family", pair_names, "two base sphere names")->required()->expected(2)->delimiter(',');
  add_output(relation, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*list) return cmd_list(out);
    if (*construct) return cmd_construct(family, grid, out);
    if (*verify) return cmd_verify(family, grid, seed, out);
    if (*compose) return cmd_construct(kind + ":" + pair_names[0] + ":" + pair_names[1], grid, out);
    if (*relation) return cmd_relation(pair_names[0], pair_names[1], out);
  } catch (const affsph::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
