#include "gtvm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gtvm/corpus/corpus.hpp"
#include "gtvm/matcher_inc/rete.hpp"
#include "gtvm/matcher_ls/local_search.hpp"
#include "gtvm/modelspace/compare.hpp"
#include "gtvm/modelspace/snapshot.hpp"
#include "gtvm/rules/engine.hpp"
#include "gtvm/vtcl/vtcl.hpp"

namespace gtvm::cli {

namespace {

// Errors raised before execution starts map to kLoadError.
class LoadFailure : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadFailure("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

model::ModelSpace load_model(const std::string& path) {
  if (path.empty()) return model::ModelSpace(corpus::metamodels());
  if (!std::filesystem::exists(path)) throw LoadFailure("cannot read '" + path + "'");
  try {
    return model::load_snapshot_file(path, corpus::metamodels());
  } catch (const Error& e) {
    throw LoadFailure(path + ": " + e.what());
  }
}

rules::Program load_program(const std::vector<std::string>& files, const model::TypeRegistry& types) {
  std::vector<rules::Machine> machines;
  for (const auto& f : files) {
    auto text = read_file(f);
    try {
      machines.push_back(vtcl::parse(text));
    } catch (const ParseError& e) {
      throw LoadFailure(f + ":" + e.what());
    }
  }
  try {
    return vtcl::link(std::move(machines), types);
  } catch (const Error& e) {
    throw LoadFailure(e.what());
  }
}

rules::MatcherKind matcher_kind(const std::string& s) {
  return s == "ls" ? rules::MatcherKind::LocalSearch : rules::MatcherKind::Incremental;
}

void write_space(const model::ModelSpace& space, const std::string& path, std::ostream& out) {
  if (path.empty()) return;
  if (path == "-")
    model::write_snapshot(space, out);
  else
    model::save_snapshot_file(space, path);
}

std::string format_match(const std::vector<std::string>& params, const Tuple& t) {
  std::string line;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) line += ' ';
    line += params[i] + "=" + to_literal(t[i]);
  }
  return line;
}

struct RunArgs {
  std::vector<std::string> files;
  std::string model, out_file, matcher = "inc";
  bool log = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  auto space = load_model(a.model);
  auto program = load_program(a.files, space.types());
  auto options = rules::EngineOptions::from_env();
  options.matcher = matcher_kind(a.matcher);
  options.echo = &out;
  if (a.log) options.trace = &err;
  rules::ExecutionReport report;
  {
    rules::Engine engine(program, space, options);
    report = engine.run(program.machines.back().name);
  }
  for (const auto& r : report.results) out << r.name << " = " << to_display(r.value) << '\n';
  write_space(space, a.out_file, out);
  return kOk;
}

struct MatchArgs {
  std::vector<std::string> files;
  std::string model, pattern, matcher = "inc";
  bool count = false;
};

int cmd_match(const MatchArgs& a, std::ostream& out) {
  auto space = load_model(a.model);
  rules::Program program;
  if (a.files.empty()) {
    try {
      program = corpus::load_programs({"graphPatterns"}, space.types());
    } catch (const Error& e) {
      throw LoadFailure(e.what());
    }
  } else {
    program = load_program(a.files, space.types());
  }
  auto index = program.library.find(a.pattern);
  if (!index) throw LoadFailure("unknown pattern '" + a.pattern + "'");

  std::vector<Tuple> matches;
  if (a.matcher == "inc") {
    rete::ReteNetwork net(program.library, space);
    rete::PatternHandle h;
    try {
      h = net.register_pattern(*index);
    } catch (const ValidationError& e) {
      throw LoadFailure(e.what());
    }
    matches = net.matches(h);
    std::sort(matches.begin(), matches.end());
  } else {
    ls::Options opts;
    ls::LocalSearchMatcher lsm(program.library, space, opts);
    matches = lsm.match_all(*index);
  }
  if (a.count) {
    out << matches.size() << '\n';
    return kOk;
  }
  const auto& params = program.library.at(*index).params;
  for (const auto& m : matches) out << format_match(params, m) << '\n';
  return kOk;
}

struct DiffArgs {
  std::string a, b;
  bool ignore_ids = false, ignore_containment = false;
};

int cmd_diff(const DiffArgs& a, std::ostream& out) {
  auto x = load_model(a.a);
  auto y = load_model(a.b);
  auto result = model::compare(x, y, {a.ignore_ids, a.ignore_containment});
  if (result.equal) {
    out << "identical\n";
    return kOk;
  }
  for (const auto& d : result.differences) out << d << '\n';
  return 1;
}

struct CorpusArgs {
  std::string action, task, variant, fixture = "empty", matcher = "inc", out_file;
};

int cmd_corpus(const CorpusArgs& a, std::ostream& out) {
  if (a.action == "list") {
    for (const auto& n : corpus::program_names()) out << n << '\n';
    return kOk;
  }
  if (a.action == "tasks") {
    for (const char* t : {"2.1", "2.2", "2.3", "2.4", "2.5", "2.6"}) {
      out << t << ':';
      for (const auto& v : corpus::task_variants(t)) out << ' ' << v << '=' << corpus::task_program(t, v);
      out << '\n';
    }
    return kOk;
  }
  if (a.action == "show") {
    try {
      out << corpus::program_source(a.task);
    } catch (const Error& e) {
      throw LoadFailure(e.what());
    }
    return kOk;
  }
  // run
  model::ModelSpace space = [&] {
    try {
      return corpus::load_fixture(a.fixture);
    } catch (const Error& e) {
      throw LoadFailure(e.what());
    }
  }();
  try {
    corpus::task_program(a.task, a.variant);
  } catch (const Error& e) {
    throw LoadFailure(e.what());
  }
  auto result = corpus::run_task(a.task, a.variant, std::move(space), matcher_kind(a.matcher));
  out << result.report.render();
  write_space(result.space, a.out_file, out);
  return kOk;
}

struct FixtureArgs {
  std::vector<std::string> names;
  std::string out_file, dir;
};

int cmd_fixture(const FixtureArgs& a, std::ostream& out) {
  std::vector<std::string> names = a.names;
  if (names.empty()) names = corpus::fixture_names();
  for (const auto& n : names) {
    model::ModelSpace space = [&] {
      try {
        return corpus::build_fixture(n);
      } catch (const Error& e) {
        throw LoadFailure(e.what());
      }
    }();
    if (!a.dir.empty())
      model::save_snapshot_file(space, (std::filesystem::path(a.dir) / (n + ".gms")).string());
    else if (!a.out_file.empty())
      model::save_snapshot_file(space, a.out_file);
    else
      model::write_snapshot(space, out);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph transformation VM"};
  app.require_subcommand(1);
  const std::vector<std::string> matchers = {"inc", "ls"};

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Execute the main rule of the last machine");
  run->add_option("files", run_args.files, "Machine files; earlier ones are libraries")->required();
  run->add_option("--model", run_args.model, "Input model snapshot (.gms)");
  run->add_option("--matcher", run_args.matcher, "Pattern matcher")->check(CLI::IsMember(matchers));
  run->add_option("--out", run_args.out_file, "Write the final model here ('-' for stdout)");
  run->add_flag("--log", run_args.log, "Trace rule execution on stderr");

  MatchArgs match_args;
  auto* match = app.add_subcommand("match", "List the matches of a pattern");
  match->add_option("files", match_args.files, "Machine files (default: the shipped graphPatterns)");
  match->add_option("--model", match_args.model, "Model snapshot (.gms)");
  match->add_option("--pattern", match_args.pattern, "Qualified pattern name")->required();
  match->add_option("--matcher", match_args.matcher, "Pattern matcher")->check(CLI::IsMember(matchers));
  match->add_flag("--count", match_args.count, "Print the number of matches only");

  DiffArgs diff_args;
  auto* diff = app.add_subcommand("diff", "Compare two model snapshots");
  diff->add_option("a", diff_args.a)->required();
  diff->add_option("b", diff_args.b)->required();
  diff->add_flag("--ignore-ids", diff_args.ignore_ids, "Compare up to a renaming of ids");
  diff->add_flag("--ignore-containment", diff_args.ignore_containment, "Do not compare containment");

  CorpusArgs corpus_args;
  auto* corpus = app.add_subcommand("corpus", "Shipped task programs");
  corpus->require_subcommand(1);
  corpus->add_subcommand("list", "List program names")->callback([&] { corpus_args.action = "list"; });
  corpus->add_subcommand("tasks", "List tasks and their variants")->callback([&] { corpus_args.action = "tasks"; });
  auto* show = corpus->add_subcommand("show", "Print a program");
  show->add_option("program", corpus_args.task)->required();
  show->callback([&] { corpus_args.action = "show"; });
  auto* crun = corpus->add_subcommand("run", "Run one task variant on a fixture");
  crun->add_option("task", corpus_args.task, "Task id, 2.1 to 2.6")->required();
  crun->add_option("variant", corpus_args.variant)->required();
  crun->add_option("--fixture", corpus_args.fixture, "Fixture name or random:<n>:<e>:<seed>[:<dangling>]");
  crun->add_option("--matcher", corpus_args.matcher, "Pattern matcher")->check(CLI::IsMember(matchers));
  crun->add_option("--out", corpus_args.out_file, "Write the final model here ('-' for stdout)");
  crun->callback([&] { corpus_args.action = "run"; });

  FixtureArgs fixture_args;
  auto* fixture = app.add_subcommand("fixture", "Write fixture snapshots");
  fixture->add_option("names", fixture_args.names, "Fixture names (default: all shipped)");
  fixture->add_option("--out", fixture_args.out_file, "Output file for a single fixture");
  fixture->add_option("--dir", fixture_args.dir, "Write <name>.gms files into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kLoadError;
  }

  try {
    if (run->parsed()) return cmd_run(run_args, out, err);
    if (match->parsed()) return cmd_match(match_args, out);
    if (diff->parsed()) return cmd_diff(diff_args, out);
    if (corpus->parsed()) return cmd_corpus(corpus_args, out);
    if (fixture->parsed()) return cmd_fixture(fixture_args, out);
  } catch (const LoadFailure& e) {
    err << "error: " << e.what() << '\n';
    return kLoadError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kLoadError;
  } catch (const LinkError& e) {
    err << "error: " << e.what() << '\n';
    return kLoadError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kLoadError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace gtvm::cli
