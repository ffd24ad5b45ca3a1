#pragma once

#include <cstdio>
#include <string>

#include "nvq/mdp.hpp"

namespace nvq::detail {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string pair_label(const FiniteMdp& mdp, Index p) {
    return "(" + mdp.state_label(mdp.pair_state(p)) + ", " + mdp.action_label(mdp.pair_action(p)) + ")";
}

}  // namespace nvq::detail
