#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "torus/dihedral.hpp"
#include "torus/survey.hpp"

using namespace torus;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kBound = 3, kUnknown = 10, kContradiction = 20 };

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    text = os.str();
  } else {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// "@file" reads a file, anything else is inline JSON.
json inline_or_file(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return read_json(arg.substr(1));
  try {
    return json::parse(arg);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("group spec: ") + e.what());
  }
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Common {
  std::string input = "-", output, format = "json";
  int jobs = 0;
};

int cmd_classify(const Common& c, int conjugator) {
  json job = read_json(c.input);
  GroupPtr G = make_group(job.at("group"));
  WeightedMultiset ms = WeightedMultiset::from_json(G, job.at("multiset"));
  if (job.contains("sylow_conjugator")) conjugator = job.at("sylow_conjugator").get<int>();
  if (conjugator < 0 || conjugator >= G->order()) throw std::invalid_argument("sylow_conjugator out of range");
  Verdict v = classify(ms, ClassifyOptions{conjugator});
  if (c.format == "text") {
    write_out(c.output, ms.describe() + "\n" + v.trace_text());
  } else {
    json out{{"group", job.at("group")}, {"multiset", ms.to_json()}, {"verdict", v.to_json()}};
    write_out(c.output, dump(out));
    if (!c.output.empty() && c.output != "-") std::cout << v.trace_text();
  }
  return v.level == Level::Unknown ? kUnknown : kOk;
}

int cmd_survey(const Common& c, const std::string& group, SurveyOptions opt) {
  json spec = inline_or_file(group);
  GroupPtr G = make_group(spec);
  Survey s = run_survey(G, opt, c.jobs);
  if (c.format == "text") {
    write_out(c.output, s.text());
  } else {
    json out = s.to_json();
    out["group"] = spec;
    out["max_members"] = opt.max_members;
    write_out(c.output, dump(out));
  }
  return s.contradiction ? kContradiction : kOk;
}

int cmd_verify_dihedral(const Common& c, long m, const std::string& emit) {
  QuasiPermutationCertificate q = certify_nzf2(m, c.jobs);
  json cert = q.to_json();
  if (!emit.empty()) write_out(emit, dump(cert));
  std::ostringstream os;
  os << "m = " << m << ", |G| = " << 4 * m << "\n"
     << "generator identities: " << (q.zfsj.ok ? "ok" : "FAILED") << "\n"
     << "coflabby resolution (" << q.coflabby.cases.size() << " cases): " << (q.coflabby.ok ? "ok" : "FAILED")
     << "\n"
     << "invertibility and splitting: " << (q.splitting.ok ? "ok" : "FAILED") << "\n"
     << "dual sequence with permutation flanks: "
     << (q.dual_exact && q.R_dual_permutation && q.E_dual_permutation ? "ok" : "FAILED") << "\n";
  for (auto& n : q.notes) os << "note: " << n << "\n";
  os << (q.ok ? "quasi-permutation certificate assembled\n" : "certificate incomplete\n");
  if (c.format == "json" && emit.empty())
    write_out(c.output, dump(cert));
  else
    write_out(c.output, os.str());
  return q.ok ? kOk : kContradiction;
}

int cmd_cohomology_table(const Common& c, const std::string& filter) {
  json job = read_json(c.input);
  GroupPtr G = make_group(job.at("group"));
  GLattice M;
  if (job.contains("lattice")) {
    M = GLattice::from_json(G, job.at("lattice"));
  } else if (job.contains("multiset")) {
    WeightedMultiset ms = WeightedMultiset::from_json(G, job.at("multiset"));
    std::string side = job.value("side", "J");
    if (side != "I" && side != "J") throw std::invalid_argument("side must be I or J");
    M = (side == "I" ? build_I(ms) : build_J(ms)).lattice;
  } else {
    throw std::invalid_argument("cohomology-table needs a lattice or a multiset");
  }
  SubgroupFilter f = filter == "all" ? SubgroupFilter::All : SubgroupFilter::PrimePower;
  CoflabbyReport r = coflabby_report(M, f, c.jobs);
  if (c.format == "text") {
    write_out(c.output, cohomology_table_text(r.table));
  } else {
    json out{{"group", job.at("group")}, {"rank", M.rank()}, {"coflabby", r.coflabby},
             {"table", cohomology_table_json(r.table)}};
    write_out(c.output, dump(out));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rationality of multinorm one tori: classification and certificates"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_input) {
    if (with_input) sub->add_option("-i,--input", common.input, "job JSON file, - for stdin");
    sub->add_option("-o,--output", common.output, "output file, default stdout");
    sub->add_option("--format", common.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--jobs", common.jobs, "worker threads, 0 for the OpenMP default")->check(CLI::NonNegativeNumber);
  };

  int conjugator = 0;
  CLI::App* classify_cmd = app.add_subcommand("classify", "classify one (group, multiset) job");
  add_common(classify_cmd, true);
  classify_cmd->add_option("--conjugator", conjugator, "conjugate Sylow subgroups by this element id");

  std::string group;
  SurveyOptions sopt;
  long d_filter = 0;
  CLI::App* survey_cmd = app.add_subcommand("survey", "verdicts for strongly reduced multisets up to conjugacy");
  add_common(survey_cmd, false);
  survey_cmd->add_option("--group", group, "group spec JSON, or @file")->required();
  survey_cmd->add_option("--max-members", sopt.max_members, "largest multiset size")->check(CLI::Range(1, 6));
  survey_cmd->add_option("--min-order", sopt.min_order, "smallest member order");
  survey_cmd->add_option("--max-order", sopt.max_order, "largest member order");
  auto* dopt = survey_cmd->add_option("--d", d_filter, "keep multisets with this gcd of indices");

  long m = 0;
  std::string emit;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify-dihedral", "quasi-permutation certificate for {<s^m>, <t>} in the dihedral group of order 4m, m odd");
  add_common(verify_cmd, false);
  verify_cmd->add_option("--m", m, "odd m")->required();
  verify_cmd->add_option("--emit", emit, "write the certificate JSON here");

  std::string filter = "all";
  CLI::App* coh_cmd = app.add_subcommand("cohomology-table", "H^1 per subgroup class of a lattice");
  add_common(coh_cmd, true);
  coh_cmd->add_option("--subgroups", filter, "all or prime-power")->check(CLI::IsMember({"all", "prime-power"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*classify_cmd) return cmd_classify(common, conjugator);
    if (*survey_cmd) {
      if (dopt->count()) sopt.d_filter = d_filter;
      return cmd_survey(common, group, sopt);
    }
    if (*verify_cmd) return cmd_verify_dihedral(common, m, emit);
    if (*coh_cmd) return cmd_cohomology_table(common, filter);
  } catch (const OrderOverflow& e) {
    std::cerr << "bound exceeded: " << e.what() << "\n";
    return kBound;
  } catch (const InternalContradiction& e) {
    std::cerr << "internal contradiction: " << e.what() << "\n";
    return kContradiction;
  } catch (const IdentityFailed& e) {
    std::cerr << "certificate failed: " << e.what() << "\n";
    return kContradiction;
  } catch (const CaseFailed& e) {
    std::cerr << "certificate failed: " << e.what() << "\n";
    return kContradiction;
  } catch (const GeneratorRecoveryFailed& e) {
    std::cerr << "certificate failed: " << e.what() << "\n";
    return kContradiction;
  } catch (const SplittingNotFound& e) {
    std::cerr << "certificate failed: " << e.what() << "\n";
    return kContradiction;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
