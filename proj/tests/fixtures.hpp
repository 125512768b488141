#pragma once

// Shared fixture networks.
//
// CHAIN3 / CHAIN4: feedforward chains 1 -> 2 -> ... -> n with a self-loop at
// the end; the closure is {id, s, ..., s^{n-1}} with s^n = s^{n-1}.
// RING3: cyclic shift on three cells; closure is the group Z3.
// Q8: left translations of the quaternion group generated by i and j; the
// closure is Q8 itself (8 elements).

#include <string>

#include "ccn/linmaps.hpp"
#include "ccn/monoid.hpp"
#include "ccn/network.hpp"

namespace fixtures {

inline const char* kChain3 = R"({
  "version": 1,
  "cells": ["1", "2", "3"],
  "maps": {
    "s": {"1": "2", "2": "3", "3": "3"}
  }
})";

inline const char* kChain4 = R"({
  "version": 1,
  "cells": ["1", "2", "3", "4"],
  "maps": {
    "s": {"1": "2", "2": "3", "3": "4", "4": "4"}
  }
})";

inline const char* kRing3 = R"({
  "version": 1,
  "cells": ["1", "2", "3"],
  "maps": {
    "s": {"1": "2", "2": "3", "3": "1"}
  }
})";

// Cells are quaternion units; color "i" is p -> i*p, color "j" is p -> j*p.
inline const char* kQ8 = R"({
  "version": 1,
  "cells": ["1", "-1", "i", "-i", "j", "-j", "k", "-k"],
  "maps": {
    "i": {"1": "i", "-1": "-i", "i": "-1", "-i": "1",
          "j": "k", "-j": "-k", "k": "-j", "-k": "j"},
    "j": {"1": "j", "-1": "-j", "i": "-k", "-i": "k",
          "j": "-1", "-j": "1", "k": "i", "-k": "-i"}
  }
})";

inline ccn::Network network(const char* text) {
  return ccn::parse_network(text).network;
}

inline ccn::MonoidTable closure(const char* text) {
  return ccn::monoid_closure(network(text));
}

}  // namespace fixtures
