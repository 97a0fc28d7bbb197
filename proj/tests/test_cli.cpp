#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "plc/causal.hpp"
#include "plc/cli.hpp"
#include "plc/inference.hpp"
#include "plc/learning.hpp"
#include "plc/parser.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = plc::run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string read(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Runs the tests in a scratch directory holding a copy of data/.
class Sandbox {
 public:
  Sandbox() : previous_(fs::current_path()) {
    dir_ = fs::temp_directory_path() / ("plc-test-" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    fs::copy(fs::path(PLC_SOURCE_DIR) / "data", dir_ / "data", fs::copy_options::recursive);
    fs::current_path(dir_);
  }
  ~Sandbox() {
    fs::current_path(previous_);
    fs::remove_all(dir_);
  }

 private:
  fs::path previous_;
  fs::path dir_;
};

// Splits a command line the way a POSIX shell does for plain words, single
// and double quotes (no expansions).
std::vector<std::string> shell_words(const std::string& line) {
  std::vector<std::string> words;
  std::string word;
  bool in_word = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == ' ' || c == '\t') {
      if (in_word) words.push_back(word);
      word.clear();
      in_word = false;
      continue;
    }
    in_word = true;
    if (c == '\'') {
      const auto end = line.find('\'', i + 1);
      REQUIRE(end != std::string::npos);
      word += line.substr(i + 1, end - i - 1);
      i = end;
    } else if (c == '"') {
      for (++i; i < line.size() && line[i] != '"'; ++i) {
        if (line[i] == '\\' && i + 1 < line.size() &&
            std::string("$`\"\\").find(line[i + 1]) != std::string::npos) {
          ++i;
        }
        word += line[i];
      }
      REQUIRE(i < line.size());
    } else if (c == '\\' && i + 1 < line.size()) {
      word += line[++i];
    } else {
      word += c;
    }
  }
  if (in_word) words.push_back(word);
  return words;
}

struct Example {
  std::string command;
  std::string expected;
};

std::vector<Example> console_examples(const std::string& markdown) {
  std::vector<Example> examples;
  std::istringstream in(markdown);
  bool inside = false;
  for (std::string line; std::getline(in, line);) {
    if (!inside) {
      inside = line == "```console";
      continue;
    }
    if (line == "```") {
      inside = false;
    } else if (line.rfind("$ ", 0) == 0) {
      examples.push_back({line.substr(2), ""});
    } else {
      REQUIRE_FALSE(examples.empty());
      examples.back().expected += line + "\n";
    }
  }
  return examples;
}

}  // namespace

TEST_CASE("shell word splitting") {
  CHECK(shell_words(R"(a "b c" 'd\e' "\+x, y" f\ g)") ==
        std::vector<std::string>{"a", "b c", "d\\e", "\\+x, y", "f g"});
}

TEST_CASE("every console example in the README") {
  const auto examples = console_examples(read(fs::path(PLC_SOURCE_DIR) / "README.md"));
  REQUIRE(examples.size() >= 15);
  Sandbox sandbox;
  for (const auto& example : examples) {
    auto words = shell_words(example.command);
    REQUIRE(!words.empty());
    REQUIRE(words.front() == "plc");
    words.erase(words.begin());
    const auto result = run(words);
    INFO("$ " << example.command);
    CHECK(result.out + result.err == example.expected);
  }
}

TEST_CASE("fixture commands") {
  Sandbox sandbox;
  CHECK(run({"query", "data/p1.pl", "--prob", "recovery", "--given", "\\+treatment,recovery", "--do",
             "treatment"})
            .out == "1.000000\n");
  CHECK(run({"query", "data/p1.pl", "--prob", "recovery", "--do", "treatment"}).out == "0.700000\n");
  CHECK(run({"reconstruct", "--hidden", "data/p1.pl", "--graph", "data/p1.edges"}).out ==
        plc::print_program(plc::parse_program(read("data/p1.pl"))));
}

TEST_CASE("exit statuses") {
  Sandbox sandbox;
  CHECK(run({}).status == 2);
  CHECK(run({"frobnicate"}).status == 2);
  const auto unknown_flag = run({"query", "data/p1.pl", "--prob", "recovery", "--bogus"});
  CHECK(unknown_flag.status == 2);
  CHECK(unknown_flag.err.rfind("error[usage]: ", 0) == 0);
  CHECK(run({"graph", "data/p1.pl", "--format", "svg"}).status == 2);

  const auto missing = run({"validate", "no-such-file.pl"});
  CHECK(missing.status == 1);
  CHECK(missing.err == "error[io]: cannot read 'no-such-file.pl'\n");

  std::ofstream("bad.pl") << "0.5 :: a.\n0.5 :: b :- .\n";
  const auto bad = run({"validate", "bad.pl"});
  CHECK(bad.status == 1);
  CHECK(bad.err.rfind("error[syntax]: bad.pl:2:", 0) == 0);

  const auto impossible = run({"query", "data/p1.pl", "--prob", "recovery", "--given", "treatment",
                               "--do", "treatment", "--precision", "99"});
  CHECK(impossible.status == 2);

  const auto help = run({"query", "--help"});
  CHECK(help.status == 0);
  CHECK(help.out.find("--prob") != std::string::npos);
}

TEST_CASE("json envelopes") {
  Sandbox sandbox;
  const auto query = run({"query", "data/p1.pl", "--prob", "recovery", "--given", "treatment", "--json"});
  REQUIRE(query.status == 0);
  const auto q = nlohmann::json::parse(query.out);
  CHECK(q["command"] == "query");
  CHECK(q["inputs"]["given"]["treatment"] == true);
  CHECK(q["inputs"]["do"].is_null());
  CHECK(q["result"]["kind"] == "conditional");
  CHECK(q["result"]["probability"].get<double>() == doctest::Approx(0.7));
  CHECK(q["result"]["conditioning_mass"].get<double>() == doctest::Approx(0.5));
  CHECK(q["diagnostics"].is_array());

  const auto validate = nlohmann::json::parse(run({"validate", "data/p2.pl", "--json"}).out);
  CHECK(validate["result"]["positive"] == false);
  CHECK(validate.contains("diagnostics"));

  const auto rebuilt = nlohmann::json::parse(
      run({"reconstruct", "--hidden", "data/p1.pl", "--graph", "data/p1.edges", "--json"}).out);
  CHECK(rebuilt["result"]["complete"] == true);
  CHECK(rebuilt["diagnostics"]["recovery"]["accepted_clauses"].size() == 2);
  CHECK(rebuilt["diagnostics"]["recovery"]["residuals"].size() == 2);
  for (const auto& key : {"command", "inputs", "result", "diagnostics"}) {
    CHECK(q.contains(key));
    CHECK(validate.contains(key));
    CHECK(rebuilt.contains(key));
  }
}

TEST_CASE("files written by one command are read by the next") {
  Sandbox sandbox;
  REQUIRE(run({"twin-export", "data/p2.pl", "--do", "treatment", "-o", "twin.pl"}).status == 0);
  const auto twin = plc::parse_program(read("twin.pl"));
  const double value = plc::conditional(twin, plc::parse_formula("recovery__i"),
                                        plc::parse_formula("!treatment__e & recovery__e"))
                           .probability;
  CHECK(value == doctest::Approx(0.7).epsilon(1e-12));

  REQUIRE(run({"sample", "data/p1.pl", "-n", "20000", "--seed", "3", "-o", "s.csv"}).status == 0);
  CHECK(plc::Dataset::from_csv(read("s.csv")) ==
        plc::forward_sample(plc::parse_program(read("data/p1.pl")), 20000, 3));
  const auto learned =
      run({"learn", "--data", "s.csv", "--graph", "data/p1.edges", "-o", "learned.pl", "--report",
           "report.json"});
  CHECK(learned.status == 0);
  CHECK(learned.out.empty());
  CHECK(plc::same_structure(plc::parse_program(read("learned.pl")),
                            plc::parse_program(read("data/p1.pl"))));
  CHECK(nlohmann::json::parse(read("report.json")).contains("recovery"));

  const auto starved = run({"learn", "--data", "s.csv", "--graph", "data/p1.edges", "--min-support",
                            "1000000"});
  CHECK(starved.status == 1);
  CHECK(starved.err.find("error[starved-pattern]: recovery:") != std::string::npos);
}

TEST_CASE("enumeration cap from the environment") {
  Sandbox sandbox;
  ::setenv("PLC_ENUMERATION_CAP", "2", 1);
  const auto capped = run({"query", "data/p1.pl", "--prob", "recovery"});
  ::setenv("PLC_ENUMERATION_CAP", "nonsense", 1);
  const auto malformed = run({"query", "data/p1.pl", "--prob", "recovery"});
  ::unsetenv("PLC_ENUMERATION_CAP");
  CHECK(capped.status == 1);
  CHECK(capped.err.rfind("error[enumeration-cap]: ", 0) == 0);
  CHECK(malformed.err.rfind("error[invalid-argument]: ", 0) == 0);
}

TEST_CASE("the installed binary reports status codes") {
  Sandbox sandbox;
  const std::string binary = PLC_BINARY;
  auto status_of = [&](const std::string& args) {
    const int raw = std::system((binary + " " + args + " >out.txt 2>err.txt").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status_of("query data/p1.pl --prob recovery --do treatment") == 0);
  CHECK(read("out.txt") == "0.700000\n");
  CHECK(status_of("query data/p1.pl --prob u1") == 1);
  CHECK(read("err.txt").rfind("error[external-proposition]: ", 0) == 0);
  CHECK(status_of("query data/p1.pl --nope") == 2);
}
