#include "plc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "plc/causal.hpp"
#include "plc/error.hpp"
#include "plc/graph.hpp"
#include "plc/identification.hpp"
#include "plc/inference.hpp"
#include "plc/learning.hpp"
#include "plc/parser.hpp"
#include "plc/validate.hpp"

namespace plc {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io, "cannot read '" + path + "'");
  return text.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text) || !file.flush()) {
    throw Error(ErrorCode::io, "cannot write '" + path + "'");
  }
}

Program load_program(const std::string& path) {
  try {
    return parse_program(read_file(path));
  } catch (const Error& error) {
    if (error.code() == ErrorCode::io) throw;
    throw Error(error.code(), path + ":" + error.what());
  }
}

ClassDependencyGraph load_graph(const std::string& path) {
  try {
    return parse_graph(read_file(path));
  } catch (const Error& error) {
    if (error.code() == ErrorCode::io) throw;
    throw Error(error.code(), path + ":" + error.what());
  }
}

json envelope(const std::string& command, json inputs, json result, json diagnostics) {
  return {{"command", command},
          {"inputs", std::move(inputs)},
          {"result", std::move(result)},
          {"diagnostics", std::move(diagnostics)}};
}

json assignment_json(const std::map<std::string, bool>& values) {
  json object = json::object();
  for (const auto& [name, value] : values) object[name] = value;
  return object;
}

// Writes the failures of a reconstruction as `error[...]` lines and returns
// the exit status.
int report_failures(const ReconstructionResult& result, std::ostream& err) {
  for (const auto& [name, node] : result.nodes) {
    if (node.failure) {
      err << "error[" << to_string(node.failure->code()) << "]: " << name << ": "
          << node.failure->what() << '\n';
    }
  }
  return result.complete() ? 0 : 1;
}

struct ValidateArgs {
  std::string file;
  bool strict = false;
  bool json = false;
};

struct GraphArgs {
  std::string file;
  std::string format = "dot";
};

struct QueryArgs {
  std::string file;
  std::string prob;
  std::optional<std::string> given;
  std::optional<std::string> intervention;
  bool json = false;
  int precision = 6;
};

struct SampleArgs {
  std::string file;
  std::size_t rows = 0;
  std::uint64_t seed = 0;
  std::string output;
};

struct ReconstructArgs {
  std::string hidden;
  std::string graph;
  std::string output;
  std::string report;
  bool json = false;
  int digits = 12;
};

struct LearnArgs {
  std::string data;
  std::string graph;
  std::size_t min_support = default_min_support;
  std::optional<double> z;
  std::optional<double> tolerance;
  std::string output;
  std::string report;
  bool json = false;
  int digits = 6;
};

struct TwinArgs {
  std::string file;
  std::string intervention;
  std::string output;
};

int run_validate(const ValidateArgs& args, std::ostream& out) {
  const Program program = load_program(args.file);
  const ValidationReport report = validate(program, args.strict);
  if (args.json) {
    out << envelope("validate", {{"file", args.file}, {"strict", args.strict}},
                    json::parse(report.to_json()), json::array())
               .dump(2)
        << '\n';
  } else {
    out << report.to_text();
  }
  return 0;
}

int run_graph(const GraphArgs& args, std::ostream& out) {
  const auto graph = load_program(args.file).graph();
  out << (args.format == "dot" ? graph.to_dot() : graph.to_edge_list());
  return 0;
}

int run_query(const QueryArgs& args, std::ostream& out) {
  const Program program = load_program(args.file);
  const EngineOptions options = engine_options_from_environment();
  const Formula query = parse_formula(args.prob, program);
  std::map<std::string, bool> given, forced;
  if (args.given) given = parse_assignment(*args.given, program);
  if (args.intervention) forced = parse_assignment(*args.intervention, program);

  QueryResult result;
  std::string kind;
  if (args.given && args.intervention) {
    kind = "counterfactual";
    result = counterfactual_query(program, query, {given}, {forced}, options);
  } else if (args.intervention) {
    kind = "interventional";
    result = interventional_query(program, query, {forced}, options);
  } else if (args.given) {
    kind = "conditional";
    result = conditional(program, query, conjunction_of(given), options);
  } else {
    kind = "probability";
    result = probability(program, query, options);
  }

  if (args.json) {
    json inputs = {{"file", args.file}, {"prob", query.to_string()}};
    inputs["given"] = args.given ? assignment_json(given) : json(nullptr);
    inputs["do"] = args.intervention ? assignment_json(forced) : json(nullptr);
    json value = {{"kind", kind},
                  {"probability", result.probability},
                  {"worlds_evaluated", result.worlds_evaluated},
                  {"conditioning_mass", result.conditioning_mass}};
    out << envelope("query", std::move(inputs), std::move(value), json::array()).dump(2) << '\n';
  } else {
    out << result.format(args.precision) << '\n';
  }
  return 0;
}

int run_sample(const SampleArgs& args, std::ostream& out) {
  const Program program = load_program(args.file);
  write_output(args.output, forward_sample(program, args.rows, args.seed).to_csv(), out);
  return 0;
}

int finish_reconstruction(const std::string& command, json inputs, const ReconstructionResult& result,
                          int digits, const std::string& output, const std::string& report,
                          bool as_json, std::ostream& out, std::ostream& err) {
  const std::string text = print_program(round_probabilities(result.program, digits));
  if (!report.empty()) write_output(report, result.diagnostics().dump(2) + "\n", out);
  if (as_json) {
    json value = {{"program", text}, {"complete", result.complete()},
                  {"failed_nodes", result.failed_nodes()}};
    if (!output.empty()) write_output(output, text, out);
    out << envelope(command, std::move(inputs), std::move(value), result.diagnostics()).dump(2)
        << '\n';
  } else {
    write_output(output, text, out);
  }
  return report_failures(result, err);
}

int run_reconstruct(const ReconstructArgs& args, std::ostream& out, std::ostream& err) {
  const Program hidden = load_program(args.hidden);
  const ClassDependencyGraph graph = load_graph(args.graph);
  const ExactOracle oracle(hidden, engine_options_from_environment());
  const auto result = reconstruct(oracle, graph);
  return finish_reconstruction("reconstruct", {{"hidden", args.hidden}, {"graph", args.graph}},
                               result, args.digits, args.output, args.report, args.json, out, err);
}

int run_learn(const LearnArgs& args, std::ostream& out, std::ostream& err) {
  Dataset data;
  try {
    data = Dataset::from_csv(read_file(args.data));
  } catch (const Error& error) {
    if (error.code() == ErrorCode::io) throw;
    throw Error(error.code(), args.data + ":" + error.what());
  }
  const ClassDependencyGraph graph = load_graph(args.graph);
  LearningOptions options;
  options.min_support = args.min_support;
  if (args.tolerance) {
    options.tolerance = {DetectionTolerance::Rule::fixed, *args.tolerance, 0.0};
  } else if (args.z) {
    options.tolerance = DetectionTolerance::empirical(*args.z);
  }
  const auto result = learn(data, graph, options);
  json inputs = {{"data", args.data}, {"graph", args.graph}, {"min_support", args.min_support}};
  if (args.tolerance) inputs["tolerance"] = *args.tolerance;
  inputs["z"] = args.tolerance ? json(nullptr) : json(options.tolerance.z);
  return finish_reconstruction("learn", std::move(inputs), result, args.digits, args.output,
                               args.report, args.json, out, err);
}

int run_twin_export(const TwinArgs& args, std::ostream& out) {
  const Program program = load_program(args.file);
  const auto forced = parse_assignment(args.intervention, program);
  write_output(args.output, print_program(twin_program(program, {forced}).to_program()), out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact causal reasoning for propositional probabilistic logic programs.", "plc"};
  app.require_subcommand(1);

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Check acyclicity, positivity and normal form");
  validate_cmd->add_option("FILE", validate_args.file, "Program file")->required();
  validate_cmd->add_flag("--strict", validate_args.strict, "Require a fact at every sink");
  validate_cmd->add_flag("--json", validate_args.json, "JSON output");

  GraphArgs graph_args;
  auto* graph_cmd = app.add_subcommand("graph", "Print the class dependency graph");
  graph_cmd->add_option("FILE", graph_args.file, "Program file")->required();
  graph_cmd->add_option("--format", graph_args.format, "dot or edges")
      ->check(CLI::IsMember({"dot", "edges"}));

  QueryArgs query_args;
  auto* query_cmd = app.add_subcommand(
      "query", "Probability of a formula; --given conditions, --do intervenes, both: counterfactual");
  query_cmd->add_option("FILE", query_args.file, "Program file")->required();
  query_cmd->add_option("--prob", query_args.prob, "Query formula")->required();
  query_cmd->add_option("--given", query_args.given, "Observed literals, e.g. \"\\+t,r\"");
  query_cmd->add_option("--do", query_args.intervention, "Intervened literals");
  query_cmd->add_flag("--json", query_args.json, "JSON output");
  query_cmd->add_option("--precision", query_args.precision, "Decimal digits")
      ->check(CLI::Range(0, 17));

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "Draw a dataset by forward sampling");
  sample_cmd->add_option("FILE", sample_args.file, "Program file")->required();
  sample_cmd->add_option("-n", sample_args.rows, "Number of rows")->required();
  sample_cmd->add_option("--seed", sample_args.seed, "Random seed");
  sample_cmd->add_option("-o,--output", sample_args.output, "CSV file (default stdout)");

  ReconstructArgs reconstruct_args;
  auto* reconstruct_cmd =
      app.add_subcommand("reconstruct", "Rebuild a program from its graph and distribution");
  reconstruct_cmd->add_option("--hidden", reconstruct_args.hidden, "Hidden program file")
      ->required();
  reconstruct_cmd->add_option("--graph", reconstruct_args.graph, "Graph file (DOT or edges)")
      ->required();
  reconstruct_cmd->add_option("-o,--output", reconstruct_args.output, "Program output file");
  reconstruct_cmd->add_option("--report", reconstruct_args.report, "Diagnostics JSON file");
  reconstruct_cmd->add_flag("--json", reconstruct_args.json, "JSON output");
  reconstruct_cmd->add_option("--digits", reconstruct_args.digits, "Significant digits printed")
      ->check(CLI::Range(1, 17));

  LearnArgs learn_args;
  auto* learn_cmd = app.add_subcommand("learn", "Learn a program from samples and a graph");
  learn_cmd->add_option("--data", learn_args.data, "Dataset CSV")->required();
  learn_cmd->add_option("--graph", learn_args.graph, "Graph file (DOT or edges)")->required();
  learn_cmd->add_option("--min-support", learn_args.min_support, "Rows needed per parent pattern");
  auto* z_option = learn_cmd->add_option("--z", learn_args.z, "Standard errors for detection")
                       ->check(CLI::PositiveNumber);
  learn_cmd->add_option("--tolerance", learn_args.tolerance, "Fixed detection threshold")
      ->check(CLI::Range(0.0, 0.5))
      ->excludes(z_option);
  learn_cmd->add_option("-o,--output", learn_args.output, "Program output file");
  learn_cmd->add_option("--report", learn_args.report, "Diagnostics JSON file");
  learn_cmd->add_flag("--json", learn_args.json, "JSON output");
  learn_cmd->add_option("--digits", learn_args.digits, "Significant digits printed")
      ->check(CLI::Range(1, 17));

  TwinArgs twin_args;
  auto* twin_cmd = app.add_subcommand("twin-export", "Write the counterfactual twin program");
  twin_cmd->add_option("FILE", twin_args.file, "Program file")->required();
  twin_cmd->add_option("--do", twin_args.intervention, "Intervened literals")->required();
  twin_cmd->add_option("-o,--output", twin_args.output, "Output file (default stdout)");

  std::vector<std::string> storage{"plc"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& arg : storage) argv.push_back(arg.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto selected = app.get_subcommands();
    out << (selected.empty() ? app.help() : selected.front()->help());
    return 0;
  } catch (const CLI::ParseError& error) {
    std::string message = error.what();
    if (message.empty()) message = "missing subcommand";
    err << "error[usage]: " << message << '\n';
    return 2;
  }

  try {
    if (*validate_cmd) return run_validate(validate_args, out);
    if (*graph_cmd) return run_graph(graph_args, out);
    if (*query_cmd) return run_query(query_args, out);
    if (*sample_cmd) return run_sample(sample_args, out);
    if (*reconstruct_cmd) return run_reconstruct(reconstruct_args, out, err);
    if (*learn_cmd) return run_learn(learn_args, out, err);
    if (*twin_cmd) return run_twin_export(twin_args, out);
  } catch (const Error& error) {
    err << "error[" << to_string(error.code()) << "]: " << error.what() << '\n';
    return 1;
  } catch (const std::exception& error) {
    err << "error[internal]: " << error.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace plc
