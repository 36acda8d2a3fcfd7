#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "cinemaloop/image_io.hpp"
#include "cinemaloop/zip.hpp"
#include "test_support.hpp"
#include "zip_reader.hpp"

using namespace cinemaloop;
using namespace cinemaloop::testing;

TEST_CASE("png round trip keeps RGB order and leaves the input untouched") {
  std::mt19937 rng(1);
  for (int iter = 0; iter < 10; ++iter) {
    const auto img = random_image(rng, 13 + iter, 7 + iter, 3);
    const auto copy = img;
    const auto bytes = encode_png(img);
    CHECK(img == copy);
    CHECK(decode_png_rgb(bytes) == img);
  }
  ImageU8 red(2, 2, 3);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) red.at(x, y, 0) = 255;
  const auto back = decode_png_rgb(encode_png(red));
  CHECK(back.at(1, 1, 0) == 255);
  CHECK(back.at(1, 1, 2) == 0);
}

TEST_CASE("grayscale png decodes to RGB and to a thresholded mask") {
  ImageU8 gray(3, 1, 1);
  gray.at(0, 0) = 0;
  gray.at(1, 0) = 127;
  gray.at(2, 0) = 128;
  const auto bytes = encode_png(gray);
  const auto mask = decode_png_mask(bytes);
  CHECK_FALSE(mask.at(0, 0));
  CHECK_FALSE(mask.at(1, 0));
  CHECK(mask.at(2, 0));
  const auto rgb = decode_png_rgb(bytes);
  CHECK(rgb.channels() == 3);
  CHECK(rgb.at(1, 0, 2) == 127);
  CHECK(decode_png_mask(encode_png(mask_to_image(mask))) == mask);
}

TEST_CASE("png decode failures are format errors") {
  const std::string junk = "definitely not a png";
  CHECK_THROWS_AS(decode_png_rgb(std::as_bytes(std::span(junk.data(), junk.size()))), FormatError);
  CHECK_THROWS_AS(decode_png_mask({}), FormatError);
  CHECK_THROWS_AS(encode_png(ImageU8(2, 2, 2)), ArgumentError);
}

TEST_CASE("zip archives hold stored entries in order") {
  const std::vector<ZipEntry> entries = {{"a.txt", "hello"}, {"frame_0001.png", std::string(1000, '\x7f')}, {"empty", ""}};
  const std::string zip = make_zip(entries);
  const auto files = read_zip(zip);
  REQUIRE(files.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(files[i].name == entries[i].name);
    CHECK(files[i].data == entries[i].data);
  }
  CHECK(make_zip(entries) == zip);
  CHECK(read_zip(make_zip({})).empty());
  CHECK_THROWS_AS(make_zip({{"", "x"}}), ArgumentError);
}
