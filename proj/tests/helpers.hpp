#pragma once

#include <string>

#include "doctest.h"
#include "nvx/error.hpp"

// Runs f, which must throw nvx::Error, and hands back the code for CHECKs.
template <typename F>
nvx::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const nvx::Error& e) {
    return e.code();
  }
  FAIL("expected an nvx::Error");
  return nvx::ErrorCode::Io;
}

template <typename F>
std::string error_message_of(F&& f) {
  try {
    f();
  } catch (const nvx::Error& e) {
    return e.what();
  }
  FAIL("expected an nvx::Error");
  return {};
}
