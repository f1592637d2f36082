#pragma once

// Hand-built 9x9 skeleton fixtures for the pixel criteria. Expected maps use
// '.' background, 'c' chain, 'i' isolated, and '1'/'2'/'3' for a vertex pixel
// and the criterion it meets.

#include <string>
#include <vector>

#include "raster_fixtures.hpp"
#include "streetnet/extract.hpp"

namespace streetnet::testing {

struct CriteriaFixture {
  std::string name;
  std::vector<std::string> image;
  std::vector<std::string> expected;
};

inline const std::vector<CriteriaFixture>& criteria_fixtures() {
  static const std::vector<CriteriaFixture> fixtures = {
      {"endpoint",
       {".........", ".........", ".........", ".........", ".####....", ".........", ".........", ".........",
        "........."},
       {".........", ".........", ".........", ".........", ".1cc1....", ".........", ".........", ".........",
        "........."}},
      {"t_junction",
       {".........", ".........", ".........", ".........", ".#######.", "....#....", "....#....", "....#....",
        "........."},
       {".........", ".........", ".........", ".........", ".1c222c1.", "....2....", "....c....", "....1....",
        "........."}},
      {"x_junction",
       {".........", "....#....", "....#....", "....#....", ".#######.", "....#....", "....#....", "....#....",
        "........."},
       {".........", "....1....", "....c....", "....2....", ".1c222c1.", "....2....", "....c....", "....1....",
        "........."}},
      {"corner",
       {".........", "....#....", "....#....", "....#....", "....####.", ".........", ".........", ".........",
        "........."},
       {".........", "....1....", "....c....", "....2....", "....32c1.", ".........", ".........", ".........",
        "........."}},
      {"oblique_corner",
       {".........", ".........", "..#......", "...#.....", "....####.", ".........", ".........", ".........",
        "........."},
       {".........", ".........", "..1......", "...c.....", "....3cc1.", ".........", ".........", ".........",
        "........."}},
      {"north_south_east",
       {".........", ".........", ".........", "....#....", "....##...", "....#....", ".........", ".........",
        "........."},
       {".........", ".........", ".........", "....3....", "....22...", "....3....", ".........", ".........",
        "........."}},
      {"straight_chain",
       {".........", ".#.......", "..#......", "...#.....", "....#....", ".....#...", "......#..", ".......#.",
        "........."},
       {".........", ".1.......", "..c......", "...c.....", "....c....", ".....c...", "......c..", ".......1.",
        "........."}},
      {"isolated",
       {".........", ".........", "..#......", ".........", "....#....", ".........", ".........", ".......#.",
        "........."},
       {".........", ".........", "..i......", ".........", "....i....", ".........", ".........", ".......i.",
        "........."}},
  };
  return fixtures;
}

inline char classification_code(const PixelClassification& c, int x, int y) {
  switch (c.label(x, y)) {
    case PixelLabel::Background: return '.';
    case PixelLabel::Chain: return 'c';
    case PixelLabel::Isolated: return 'i';
    case PixelLabel::Vertex: return static_cast<char>('0' + static_cast<int>(c.criterion(x, y)));
  }
  return '?';
}

inline std::vector<std::string> classification_map(const PixelClassification& c) {
  std::vector<std::string> rows(c.height, std::string(c.width, '.'));
  for (int y = 0; y < c.height; ++y)
    for (int x = 0; x < c.width; ++x) rows[y][x] = classification_code(c, x, y);
  return rows;
}

}  // namespace streetnet::testing
