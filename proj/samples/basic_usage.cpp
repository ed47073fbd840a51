// Three overlapping boxes where greedy NMS keeps a stray duplicate and
// inverted NMS does not.

#include <cstdio>
#include <vector>

#include "invnms/invnms.hpp"

int main() {
  using invnms::BoundingBox;
  using invnms::Detection;
  const std::vector<Detection> dets = {
      {BoundingBox(0, 0, 10, 10), 0.9, 0},
      {BoundingBox(2, 0, 12, 10), 0.8, 1},
      {BoundingBox(4, 0, 14, 10), 0.7, 2},
  };
  for (invnms::Method m : {invnms::Method::Greedy, invnms::Method::Inverted}) {
    const auto result = invnms::suppress(dets, invnms::SuppressionConfig::defaults(m));
    std::printf("%-9s kept %zu:", std::string(invnms::method_name(m)).c_str(), result.kept.size());
    for (const Detection& d : result.kept) std::printf(" #%zu(%.2f)", d.input_index, d.score);
    std::printf("\n");
  }
  return 0;
}
