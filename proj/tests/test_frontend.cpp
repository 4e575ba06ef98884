#include <doctest.h>

#include <json.hpp>
#include <random>

#include "slicebench/harness/dataset.hpp"
#include "support.hpp"

using namespace slicebench;
using frontend::ParseError;

namespace {

std::string wrap(const std::string& body) {
  return "public class T {\n    public static int f(int n) {\n" + body + "\n        return n;\n    }\n}\n";
}

}  // namespace

TEST_CASE("source lines round-trip byte for byte") {
  for (const std::string text : {"a\nb\n", "a\r\nb", "", "\n\n", "x\ry\r\n"}) {
    const frontend::SourceProgram src("t", text);
    CHECK(src.join() == text);
  }
  const frontend::SourceProgram src("t", "one\r\ntwo\n");
  CHECK(src.line_count() == 2);
  CHECK(src.line(2) == "two");
  CHECK_THROWS_AS(src.line(3), std::out_of_range);
}

TEST_CASE("the corpus ingests without skips") {
  const auto ds = harness::ingest_dataset(testing::corpus_dir());
  CHECK(ds.programs.size() == 20);
  CHECK(ds.skipped.empty());
  CHECK(ds.tasks.size() == 40);
}

TEST_CASE("def/use sets match the hand annotations") {
  int checked = 0;
  for (int i = 1; i <= 20; ++i) {
    const auto id = testing::program_id(i);
    const auto ast = testing::load_corpus_program(id);
    const auto expected = nlohmann::json::parse(testing::read_file(testing::corpus_dir() / "expected" / (id + ".json")));
    for (const auto& row : expected.at("defuse")) {
      const auto& stmt = ast.stmt(frontend::statement_at(ast, row.at("line").get<int>()));
      auto defs = ast.names(stmt.method, stmt.defs);
      auto uses = ast.names(stmt.method, stmt.uses);
      std::sort(defs.begin(), defs.end());
      std::sort(uses.begin(), uses.end());
      INFO(id, " line ", row.at("line").get<int>());
      CHECK(defs == row.at("defs").get<std::vector<std::string>>());
      CHECK(uses == row.at("uses").get<std::vector<std::string>>());
      ++checked;
    }
  }
  CHECK(checked == 60);
}

TEST_CASE("constructs outside the subset raise ParseError") {
  const std::vector<std::string> bodies = {
      "        Runnable r = () -> {};",
      "        try {\n            n++;\n        } catch (Exception e) {\n        }",
      "        switch (n) {\n        case 1: n++;\n        }",
      "        var x = 1;",
      "        n = m;",
      "        outer: while (n > 0) { n--; }",
      "        boolean b = n instanceof Integer;",
      "        int[] a = new int[2] {1, 2};",
  };
  for (const auto& body : bodies) {
    INFO(body);
    CHECK_THROWS_AS(frontend::parse_program(wrap(body), "bad"), ParseError);
  }
}

TEST_CASE("parse errors carry a location") {
  try {
    frontend::parse_program(wrap("        int x = ;"), "bad");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
  }
}

TEST_CASE("statement lookup") {
  const auto ast = frontend::parse_program(R"(public class S {
    public static int f(int n) {
        int a = 1; int b = 2;
        if (n > 0) {
            a = n
                + b;
        }
        return a;
    }
})", "lookup");
  const auto both = frontend::statements_at(ast, 3);
  REQUIRE(both.size() == 2);
  CHECK(frontend::statement_at(ast, 3) == both.front());
  CHECK(frontend::statement_at(ast, 6) == frontend::statement_at(ast, 5));
  CHECK_THROWS_AS(frontend::statement_at(ast, 7), frontend::NotFound);
  const auto lines = ast.stmt(frontend::statement_at(ast, 5)).output_lines();
  CHECK(lines == std::vector<int>{5, 6});
}

TEST_CASE("mutated corpus programs only ever raise ParseError") {
  std::mt19937 rng(20240611);
  const auto text = testing::read_file(testing::corpus_dir() / "programs" / "p13.java");
  const std::string alphabet = "{}();=+-<>[]!&|.,\"' \nabcxyz019";
  int accepted = 0;
  for (int iter = 0; iter < 300; ++iter) {
    std::string mutated = text;
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < edits; ++k) {
      const std::size_t pos = rng() % mutated.size();
      switch (rng() % 3) {
        case 0: mutated.erase(pos, 1 + rng() % 6); break;
        case 1: mutated.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
        default: mutated[pos] = alphabet[rng() % alphabet.size()]; break;
      }
    }
    try {
      frontend::parse_program(mutated, "fuzz");
      ++accepted;
    } catch (const ParseError&) {
    }
  }
  CHECK(accepted < 300);
}
