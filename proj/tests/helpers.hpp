#ifndef TAP_TESTS_HELPERS_HPP
#define TAP_TESTS_HELPERS_HPP

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "tap/core.hpp"

namespace tap::test {

// The three-box pile used across the suite (2D, pile width 4):
//
//       +----+
//   A A | C C|
//   A A +----+
//   A A  B B
//
// A 2x2 at (0,0), B 2x1 at (2,0), C 2x2 at (2,1). A is wall-flush left,
// B and C are wall-flush right. C shadows B from above; A walls B and C
// on their left; B and C wall A on its right.
inline ProblemInstance f1() {
  ProblemInstance inst;
  inst.dims_mode = 2;
  inst.init_width = 4;
  inst.init_depth = 1;
  inst.target_width = 5;
  inst.target_depth = 1;
  inst.boxes = {{0, {2, 2, 1}, 0}, {1, {2, 1, 1}, 0}, {2, {2, 2, 1}, 0}};
  inst.initial_placements = {{0, 0, 0, 0, 0, 0},
                             {1, 0, 2, 0, 0, 0},
                             {2, 0, 2, 1, 0, 0}};
  return inst;
}

// Single-use scratch directory, removed on scope exit.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("tap_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace tap::test

#endif
