#pragma once

#include "fdnoma/channel.hpp"

// Small configs used across the test suites.
namespace testutil {

inline fdnoma::SystemConfig tiny_config() {
  fdnoma::SystemConfig c;
  c.n_subcarriers = 1;
  c.n_dl_users = 2;
  c.n_ul_users = 2;
  c.n_eavesdroppers = 1;
  c.n_antennas = 2;
  c.fill_defaults();
  c.validate();
  return c;
}

inline fdnoma::SystemConfig desk_config() {
  fdnoma::SystemConfig c;
  c.n_subcarriers = 2;
  c.n_dl_users = 2;
  c.n_ul_users = 2;
  c.n_eavesdroppers = 1;
  c.n_antennas = 3;
  c.fill_defaults();
  c.validate();
  return c;
}

}  // namespace testutil
