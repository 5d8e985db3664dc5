#include <doctest.h>

#include "support.hpp"
#include "splitchain/error.hpp"
#include "splitchain/representation.hpp"

using namespace splitchain;

namespace {

RepresentationFile sample(std::vector<SampleId> ids, int width, std::uint64_t seed) {
  Rng rng(seed);
  RepresentationFile r;
  r.ids = std::move(ids);
  r.rows.resize(static_cast<Eigen::Index>(r.ids.size()), width);
  for (Eigen::Index i = 0; i < r.rows.size(); ++i) r.rows.data()[i] = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0, 5);
  return r;
}

}  // namespace

TEST_CASE("representation csv round trip is bit exact") {
  const auto r = sample({1, 4, 9, 12}, 3, 1);
  const std::string csv = r.to_csv();
  CHECK(csv.rfind("id,f1,f2,f3\n", 0) == 0);
  const auto back = RepresentationFile::parse_csv(csv, "node1");
  CHECK(back.ids == r.ids);
  CHECK(back.rows == r.rows);
  CHECK(back.source == "node1");
  CHECK(classify_payload(to_bytes(csv)) == PayloadKind::Representation);
  CHECK(classify_payload(to_bytes("id,Income,CCAvg\n1,2,3\n")) == PayloadKind::FeatureTable);
  CHECK(classify_payload(to_bytes("garbage")) == PayloadKind::Unknown);
}

TEST_CASE("parse sorts by id and rejects malformed payloads") {
  const auto r = RepresentationFile::parse_csv("id,f1\n5,1\n2,0\n", "x");
  CHECK(r.ids == std::vector<SampleId>{2, 5});
  CHECK(r.rows(0, 0) == 0.0);
  auto kind = [](std::string_view text) {
    try {
      RepresentationFile::parse_csv(text, "x");
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::State;
  };
  CHECK(kind("id,a\n1,2\n") == ErrorKind::Parse);
  CHECK(kind("id,f1,f2\n1,2\n") == ErrorKind::Shape);
  CHECK(kind("id,f1\n1,-2\n") != ErrorKind::State);
  CHECK(kind("id,f1\n1,2\n1,3\n") != ErrorKind::State);
}

TEST_CASE("concatenation joins on id in node order") {
  const auto a = sample({1, 2, 3}, 2, 1);
  const auto b = RepresentationFile::parse_csv("id,f1,f2,f3\n3,1,2,3\n1,4,5,6\n2,7,8,9\n", "n2");
  const auto j = concatenate_representations(a, b);
  CHECK(j.width() == 5);
  CHECK(j.ids == std::vector<SampleId>{1, 2, 3});
  CHECK(j.rows.leftCols(2) == a.rows);
  CHECK(j.rows.rightCols(3) == b.rows);

  const auto c = sample({1, 2}, 3, 3);
  try {
    concatenate_representations(a, c);
    FAIL("join with a missing id succeeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Join);
    CHECK(std::string(e.what()).find('3') != std::string::npos);
  }
}

TEST_CASE("extraction uses the third hidden layer") {
  const auto m = testing::random_model(3, 4);
  FeatureTable t;
  t.ids = {9, 3};
  t.columns = {"a", "b", "c"};
  t.values = (nn::MatrixXd(2, 3) << 1, 2, 3, -1, 0, 1).finished();
  const auto r = extract_representation(m, t, "node1");
  CHECK(r.ids == std::vector<SampleId>{3, 9});
  const auto pass = nn::forward<double>(m, t.values);
  CHECK(r.rows.row(0) == pass.representation().row(1));
  CHECK(r.rows.row(1) == pass.representation().row(0));
  CHECK(r.width() == 3);
  t.columns.pop_back();
  t.values.conservativeResize(2, 2);
  CHECK_THROWS_AS(extract_representation(m, t), Error);
}
