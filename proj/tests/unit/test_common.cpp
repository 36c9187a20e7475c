#include <cmath>

#include "doctest.h"
#include "nutrieval/checksum.hpp"
#include "nutrieval/csv.hpp"
#include "nutrieval/error.hpp"
#include "nutrieval/nutrients.hpp"

using namespace nutrieval;

TEST_CASE("format_decimal trims to minimal form") {
  CHECK(format_decimal(22) == "22");
  CHECK(format_decimal(15.6) == "15.6");
  CHECK(format_decimal(314.68) == "314.68");
  CHECK(format_decimal(96.00) == "96");
  CHECK(format_decimal(0.004) == "0");
  CHECK(format_decimal(-0.0) == "0");
  CHECK(format_decimal(1.005e3) == "1005");
}

TEST_CASE("nutrient names and codes are in serialization order") {
  CHECK(nutrient_key(Nutrient::kEnergy) == "kcal");
  CHECK(nutrient_key(Nutrient::kFat) == "fat");
  CHECK(nutrient_code(Nutrient::kEnergy) == "DRxIKCAL");
  CHECK(nutrient_code(Nutrient::kProtein) == "DRxIPROT");
  CHECK(nutrient_code(Nutrient::kFiber) == "DRxIFIBE");
  CHECK(nutrient_unit(Nutrient::kEnergy) == "kcal");
  CHECK(nutrient_unit(Nutrient::kSugars) == "g");
}

TEST_CASE("NutrientVector validity") {
  NutrientVector v;
  CHECK(v.valid());
  v[Nutrient::kFat] = -1;
  CHECK_FALSE(v.valid());
  v[Nutrient::kFat] = std::nan("");
  CHECK_FALSE(v.valid());
}

TEST_CASE("sha256 of known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv parses quotes, CRLF and embedded newlines") {
  auto t = csv::Table::parse("a,b\r\n\"x, y\",\"he said \"\"hi\"\"\"\r\n\"multi\nline\",2\n", "mem.csv");
  REQUIRE(t.rows() == 2);
  CHECK(t.text(0, 0) == "x, y");
  CHECK(t.text(0, 1) == "he said \"hi\"");
  CHECK(t.text(1, 0) == "multi\nline");
  CHECK(t.number(1, 1) == 2.0);
  CHECK(t.integer(1, 1) == 2);
}

TEST_CASE("csv errors name file, row and column") {
  auto t = csv::Table::parse("id,grams\nA,abc\n", "recalls.csv");
  try {
    (void)t.number(0, t.column("grams"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.file() == "recalls.csv");
    CHECK(e.row() == 1);
    CHECK(e.column() == "grams");
  }
  CHECK_THROWS_AS(t.column("missing"), DataError);
  CHECK_THROWS_AS(csv::Table::parse("a,b\n1\n", "x.csv"), DataError);
  CHECK_THROWS_AS(t.require_header({"id"}), DataError);
}

TEST_CASE("csv escape round-trips") {
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("q\"") == "\"q\"\"\"");
}
