#pragma once

#include <string>

namespace tdcarp {

enum class MoveKind { SingleInsertion, DoubleInsertion, Swap };

inline constexpr int kNewRoute = -1;

const char* to_string(MoveKind kind);

/// One neighborhood action.
///
/// Insertions remove the task(s) at (src_route, src_pos[, src_pos + 1]) and
/// insert them at index dst_pos of dst_route, where dst_pos indexes the
/// destination after the removal. dst_route may be kNewRoute.
/// Swaps exchange (src_route, src_pos) with (dst_route, dst_pos).
/// rev_a / rev_b are the orientations the first / second moved task take.
struct Move {
  MoveKind kind = MoveKind::SingleInsertion;
  int src_route = 0;
  int src_pos = 0;
  int dst_route = 0;
  int dst_pos = 0;
  bool rev_a = false;
  bool rev_b = false;

  bool operator==(const Move&) const = default;
};

std::string describe(const Move& move);

}  // namespace tdcarp
