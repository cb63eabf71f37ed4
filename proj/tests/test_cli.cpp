#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "genre_bayes/eval.hpp"
#include "genre_bayes/movielens.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using test_support::TempDir;
using test_support::read_text;
using test_support::write_text;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const std::string command =
      std::string(GENRE_BAYES_CLI_BIN) + " " + args + " 2>&1";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.output.append(buffer, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string toy_dir() { return GENRE_BAYES_TOY_DATA_DIR; }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("cli: stats writes the toy histogram and multiplicity tables") {
  TempDir out;
  const RunResult result = run_cli("stats --data-dir " + toy_dir() + " --out " +
                                   out.path().string());
  CAPTURE(result.output);
  REQUIRE(result.exit_code == 0);

  CHECK(read_text(out.path() / "rating_histogram.csv") ==
        "rating,count\n1,1\n2,1\n3,5\n4,7\n5,6\n");
  CHECK(read_text(out.path() / "genre_multiplicity.csv") ==
        "num_genres,fraction\n1,0.833333\n2,0.166667\n");
  CHECK(result.output.find("users: 8") != std::string::npos);
  CHECK(result.output.find("ratings: 20") != std::string::npos);
}

TEST_CASE("cli: an empty ratings file yields a zero histogram") {
  TempDir data;
  TempDir out;
  write_text(data.path() / "ratings.dat", "");
  write_text(data.path() / "movies.dat",
             "1::A (1990)::Action\n2::B (1991)::Comedy\n");
  const RunResult result = run_cli("stats --data-dir " + data.path().string() +
                                   " --out " + out.path().string());
  CAPTURE(result.output);
  REQUIRE(result.exit_code == 0);
  CHECK(read_text(out.path() / "rating_histogram.csv") ==
        "rating,count\n1,0\n2,0\n3,0\n4,0\n5,0\n");
}

TEST_CASE("cli: missing inputs name the missing file and fail") {
  TempDir data;  // empty directory
  const RunResult result =
      run_cli("stats --data-dir " + data.path().string() + " --out ./ignored");
  CHECK(result.exit_code != 0);
  CHECK(result.output.find("missing file") != std::string::npos);
  CHECK(result.output.find("ratings.dat") != std::string::npos);
}

TEST_CASE("cli: the data dir falls back to GENRE_BAYES_DATA_DIR") {
  TempDir out;
  // env assignment must precede the binary, so assemble the line by hand
  RunResult result;
  const std::string full = "GENRE_BAYES_DATA_DIR=" + toy_dir() + " " +
                           GENRE_BAYES_CLI_BIN + " stats --out " +
                           out.path().string() + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[1024];
  size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.output.append(buffer, n);
  }
  result.exit_code = WEXITSTATUS(pclose(pipe));
  CAPTURE(result.output);
  CHECK(result.exit_code == 0);
  CHECK(fs::exists(out.path() / "rating_histogram.csv"));
}

TEST_CASE("cli: evaluate writes both figure CSVs deterministically") {
  TempDir out_a;
  TempDir out_b;
  const std::string common = "evaluate --data-dir " + toy_dir() +
                             " --fractions 0.5 --repetitions 2 --levels 3,4"
                             " --seed 11 --threads 2 --out ";
  const RunResult first = run_cli(common + out_a.path().string());
  CAPTURE(first.output);
  REQUIRE(first.exit_code == 0);
  const RunResult second = run_cli(common + out_b.path().string());
  REQUIRE(second.exit_code == 0);

  const std::string rates = read_text(out_a.path() / "prediction_rates.csv");
  CHECK(rates == read_text(out_b.path() / "prediction_rates.csv"));
  CHECK(read_text(out_a.path() / "baseline_rates.csv") ==
        read_text(out_b.path() / "baseline_rates.csv"));

  const std::vector<std::string> rows = lines_of(rates);
  REQUIRE(rows.size() == 3);  // header + 2 levels at one fraction
  CHECK(rows[0] == "fraction,level,mean_rate,std_rate");
  CHECK(rows[1].substr(0, 6) == "0.5,3,");
  CHECK(rows[2].substr(0, 6) == "0.5,4,");
}

TEST_CASE("cli: evaluate with one repetition reports zero stds") {
  TempDir out;
  const RunResult result = run_cli(
      "evaluate --data-dir " + toy_dir() +
      " --fractions 0.5 --repetitions 1 --levels 3 --out " +
      out.path().string());
  REQUIRE(result.exit_code == 0);
  const std::vector<std::string> rows =
      lines_of(read_text(out.path() / "prediction_rates.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].substr(rows[1].size() - 9) == ",0.000000");
}

TEST_CASE("cli: evaluate --levels best prints a single headline per fraction") {
  TempDir out;
  const RunResult result = run_cli(
      "evaluate --data-dir " + toy_dir() +
      " --fractions 0.5 --repetitions 2 --levels best --out " +
      out.path().string());
  CAPTURE(result.output);
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.find("0.5,best=") != std::string::npos);
  // all five levels still land in the CSV
  const std::vector<std::string> rows =
      lines_of(read_text(out.path() / "prediction_rates.csv"));
  CHECK(rows.size() == 6);
}

TEST_CASE("cli: predict ranks genres by posterior and exposes the truth") {
  const RunResult result =
      run_cli("predict --data-dir " + toy_dir() +
              " --movie-id 4 --level 3 --fraction 0.5 --seed 7");
  CAPTURE(result.output);
  REQUIRE(result.exit_code == 0);

  const std::vector<std::string> rows = lines_of(result.output);
  REQUIRE(rows.size() >= 5);
  CHECK(rows[0].find("# movie 4 \"Delta Force (1993)\"") == 0);
  CHECK(rows[1] == "# true genres: Action|Comedy");

  // the body is genre,posterior,log_posterior sorted by posterior
  size_t header = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] == "genre,posterior,log_posterior") header = i;
  }
  REQUIRE(header > 0);
  double total = 0.0;
  double previous = 2.0;
  std::vector<std::pair<std::string, double>> printed;
  for (size_t i = header + 1; i < rows.size(); ++i) {
    const size_t comma = rows[i].find(',');
    REQUIRE(comma != std::string::npos);
    const double posterior = std::stod(rows[i].substr(comma + 1));
    CHECK(posterior <= previous + 1e-12);
    previous = posterior;
    total += posterior;
    printed.push_back({rows[i].substr(0, comma), posterior});
  }
  REQUIRE(printed.size() == 3);
  CHECK(std::abs(total - 1.0) < 1e-6);

  // independent check: rebuild the same held-out split and compute the
  // posterior with the linear-space oracle
  using namespace genre_bayes;
  const GenreLabels labels =
      parse_movies(fs::path(toy_dir()) / "movies.dat");
  const RatingMatrices matrices =
      build_matrices(parse_ratings(fs::path(toy_dir()) / "ratings.dat"),
                     labels);
  const uint32_t movie = labels.index_of(4).value();
  std::vector<double> half = {0.5};
  SplitPlan plan = std::move(make_splits(6, half, 1, 7)[0]);
  auto in_train =
      std::find(plan.train_movies.begin(), plan.train_movies.end(), movie);
  if (in_train != plan.train_movies.end()) {
    *in_train = plan.test_movies.front();
    plan.test_movies.front() = movie;
  }

  std::vector<LabeledExample> examples;
  for (uint32_t train_movie : plan.train_movies) {
    LabeledExample example;
    for (uint32_t user : matrices.level(3).row(train_movie)) {
      example.document.push_back({user, 1});
    }
    const double weight = labels.label_weight(train_movie);
    for (uint32_t genre : labels.genre_ids(train_movie)) {
      example.labels.push_back({genre, weight});
    }
    examples.push_back(std::move(example));
  }
  const test_support::LinearNB oracle =
      test_support::linear_fit(examples, matrices.user_count(), 3);
  long double scores[3];
  long double norm = 0.0L;
  for (uint32_t g = 0; g < 3; ++g) {
    scores[g] = oracle.prior[g];
    for (uint32_t user : matrices.level(3).row(movie)) {
      scores[g] *= oracle.p(g, user);
    }
    norm += scores[g];
  }
  for (const auto& [name, posterior] : printed) {
    uint32_t genre = 3;
    for (uint32_t g = 0; g < 3; ++g) {
      if (labels.genres().name(g) == name) genre = g;
    }
    REQUIRE(genre < 3);
    CHECK(posterior ==
          doctest::Approx(double(scores[genre] / norm)).epsilon(1e-6));
  }
}

TEST_CASE("cli: predict rejects unknown movie ids") {
  const RunResult result = run_cli("predict --data-dir " + toy_dir() +
                                   " --movie-id 999 --level 3");
  CHECK(result.exit_code != 0);
  CHECK(result.output.find("unknown movie id 999") != std::string::npos);
}

TEST_CASE("cli: export-tables emits row-stochastic P(u|g) and score matrices") {
  TempDir out;
  const RunResult result = run_cli("export-tables --data-dir " + toy_dir() +
                                   " --level 4 --fraction 0.5 --seed 3 --out " +
                                   out.path().string());
  CAPTURE(result.output);
  REQUIRE(result.exit_code == 0);

  const std::vector<std::string> user_rows =
      lines_of(read_text(out.path() / "user_given_genre_level4.csv"));
  REQUIRE(user_rows.size() == 4);  // header + 3 genres
  CHECK(user_rows[0] == "genre,u1,u2,u3,u4,u5,u6,u7,u8");
  for (size_t i = 1; i < user_rows.size(); ++i) {
    std::istringstream row(user_rows[i]);
    std::string cell;
    std::getline(row, cell, ',');  // genre name
    double sum = 0.0;
    int users = 0;
    while (std::getline(row, cell, ',')) {
      sum += std::stod(cell);
      ++users;
    }
    CHECK(users == 8);
    CHECK(std::abs(sum - 1.0) < 1e-6);
  }

  const std::vector<std::string> score_rows =
      lines_of(read_text(out.path() / "movie_log_scores_level4.csv"));
  REQUIRE(score_rows.size() == 7);  // header + 6 movies
  CHECK(score_rows[0] == "movie_id,Action,Comedy,Drama");
}

TEST_CASE("cli: identical flags produce byte-identical outputs") {
  TempDir out_a;
  TempDir out_b;
  const std::string args = "export-tables --data-dir " + toy_dir() +
                           " --level 3 --fraction 0.5 --seed 21 --out ";
  REQUIRE(run_cli(args + out_a.path().string()).exit_code == 0);
  REQUIRE(run_cli(args + out_b.path().string()).exit_code == 0);
  CHECK(read_text(out_a.path() / "user_given_genre_level3.csv") ==
        read_text(out_b.path() / "user_given_genre_level3.csv"));
  CHECK(read_text(out_a.path() / "movie_log_scores_level3.csv") ==
        read_text(out_b.path() / "movie_log_scores_level3.csv"));
}
